#pragma once

#include "sml/tensor_kron.hpp"

// The product-of-FIR filter: K length-M FIR branches whose outputs are
// multiplied together. Equivalent to contracting the K-fold Kronecker
// power of the regressor with the rank-one tensor of the branch weights,
// but evaluated in O(KM).

namespace sml {

// The K factor vectors parametrizing the filter, all of length M.
struct FactorWeights {
  std::vector<Vec> factors;

  int order() const { return static_cast<int>(factors.size()); }    // K
  int length() const {                                              // M
    return factors.empty() ? 0 : static_cast<int>(factors.front().size());
  }
};

FactorWeights zero_weights(int order, int length);

// Delay-line view of the input at one time step: u(i), u(i-1), ...,
// u(i-M+1), newest sample first.
using Regressor = Vec;

// Regressor at time i from a signal, zero-padded before t = 0.
Regressor regressor_at(const Vec& signal, std::size_t i, int length);

// Per-branch FIR outputs y_o[s] = u . w_s.
Vec factor_outputs(const Regressor& u, const FactorWeights& w);

// Leave-one-out products y_loo[s] = prod_{t != s} y_o[t], computed by
// direct products (no division) so zero branches are exact. The empty
// product at K = 1 is 1.
Vec leave_one_out(const Vec& branch_outputs);

// Filter output: the product of the K branch outputs.
double output(const Regressor& u, const FactorWeights& w);

// Branch outputs, leave-one-out products and the output evaluated in one
// pass, in the order the adaptive update consumes them: y is formed as
// y_loo[K-1] * y_o[K-1].
struct FactorOutputs {
  Vec y_o;
  Vec y_loo;
  double y = 0.0;
};

FactorOutputs evaluate_branches(const Regressor& u, const FactorWeights& w);

}  // namespace sml
