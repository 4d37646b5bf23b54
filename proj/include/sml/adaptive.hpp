#pragma once

#include <stdexcept>
#include <string>

#include "sml/mse_surface.hpp"

// Online stochastic-gradient filtering: the product-of-FIR LMS update and
// a reduced (multiset-basis) Volterra-LMS baseline, both with per-step
// multiplication counts.

namespace sml {

// Raised when an adaptive update produces nonfinite values. Step sizes
// are the caller's responsibility; nothing is clamped.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(long iteration, const std::string& detail)
      : std::runtime_error("divergence at iteration " + std::to_string(iteration) +
                           ": " + detail),
        iteration_(iteration),
        detail_(detail) {}
  long iteration() const { return iteration_; }
  const std::string& detail() const { return detail_; }

 private:
  long iteration_;
  std::string detail_;
};

struct StepResult {
  double error = 0.0;       // e(i) = d(i) - y(i)
  double prediction = 0.0;  // y(i), formed from the pre-update weights
};

class AdaptiveFilter {
 public:
  virtual ~AdaptiveFilter() = default;
  virtual StepResult step(const Regressor& u, double desired) = 0;
  virtual int input_length() const = 0;
  virtual long iterations() const = 0;
  virtual long mult_count_last() const = 0;
};

// Initial weights for the product-of-FIR update. kTable is the halving
// scheme with a zero last factor: w_j = [2^(1-j) 0 ... 0]^T for
// j = 1..K-1 and w_K = 0. kTextVariant additionally sets the last entry
// of each nonzero factor to 1 (for M = 1 the halving entry wins).
enum class InitScheme { kTable, kTextVariant };

FactorWeights sml_init(int order, int length, InitScheme scheme = InitScheme::kTable);

// Per-iteration multiplication census of the product-of-FIR update for
// real data: branch outputs M*K, leave-one-out running products K*(K-1)
// (each formed as K-1 multiplies starting from 1), output 1, error-scaled
// regressor M+1, and the weight-update row charged as one M-multiply
// vector scaling. Totals M*K + K^2 - K + 2*M + 2.
long sml_mult_census(int length, int order);

// Multiset-basis size C(M+K-1, K) of the degree-K Volterra baseline.
long volterra_basis_size(int length, int order);

class SmlLms : public AdaptiveFilter {
 public:
  SmlLms(int order, int length, double step_size,
         InitScheme scheme = InitScheme::kTable);

  StepResult step(const Regressor& u, double desired) override;
  int input_length() const override { return weights_.length(); }
  long iterations() const override { return iter_; }
  long mult_count_last() const override { return mult_count_last_; }

  const FactorWeights& weights() const { return weights_; }
  void set_weights(const FactorWeights& w);
  double step_size() const { return mu_; }

 private:
  FactorWeights weights_;
  double mu_;
  long iter_ = 0;
  long mult_count_last_ = 0;
  Vec y_o_, y_loo_, f_;
};

class VolterraLms : public AdaptiveFilter {
 public:
  VolterraLms(int order, int length, double step_size);

  StepResult step(const Regressor& u, double desired) override;
  int input_length() const override { return length_; }
  long iterations() const override { return iter_; }
  long mult_count_last() const override { return mult_count_last_; }

  const Vec& coefficients() const { return coeffs_; }
  void set_coefficients(const Vec& c);
  // Nondecreasing delay multisets (i_1 <= ... <= i_K) in lexicographic
  // order; one coefficient per multiset.
  static std::vector<MultiIndex> monomial_basis(int order, int length);

 private:
  int order_;
  int length_;
  double mu_;
  long iter_ = 0;
  long mult_count_last_ = 0;
  std::vector<MultiIndex> basis_;
  Vec coeffs_, phi_;
};

// True iff one update step from `state` changes the weights by exactly
// -mu times the one-sample gradient estimate assembled from the dense
// Kronecker operators (single-sample moments substituted into the exact
// gradient formula, applied through partial_simple_tensor).
bool sml_step_matches_gradient(const SmlLms& state, const Regressor& u, double desired,
                               double tol = 1e-10);

// Per-iteration records of an adaptive run. `excess` holds the a-priori
// plant/filter output mismatch (pre-update weights) and is empty when no
// plant was supplied.
struct ErrorTrace {
  std::vector<double> error;
  std::vector<double> prediction;
  std::vector<double> excess;
  bool has_excess = false;

  std::size_t size() const { return error.size(); }
};

// Drives a filter over a signal with the delay-line regressor structure.
// Divergence errors propagate with their iteration index.
ErrorTrace run_filter(AdaptiveFilter& filter, const Vec& inputs, const Vec& desired,
                      const Plant* plant = nullptr);

// CSV with columns iter,e,y,excess_err; 17 significant digits; excess_err
// is nan when the trace has no plant reference.
void write_trace_csv(const ErrorTrace& trace, const std::string& path);
ErrorTrace read_trace_csv(const std::string& path);

}  // namespace sml
