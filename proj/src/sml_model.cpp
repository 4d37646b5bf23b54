#include "sml/sml_model.hpp"

#include <stdexcept>
#include <string>

namespace sml {

namespace {

void check_dims(const Regressor& u, const FactorWeights& w, const char* where) {
  if (w.order() < 1) throw std::invalid_argument(std::string(where) + ": no factors");
  const std::size_t m = u.size();
  if (m == 0) throw std::invalid_argument(std::string(where) + ": empty regressor");
  for (const Vec& f : w.factors) {
    if (f.size() != m)
      throw std::invalid_argument(std::string(where) +
                                  ": regressor/factor length mismatch");
  }
}

}  // namespace

FactorWeights zero_weights(int order, int length) {
  if (order < 1 || length < 1)
    throw std::invalid_argument("zero_weights: order and length must be >= 1");
  FactorWeights w;
  w.factors.assign(static_cast<std::size_t>(order),
                   Vec(static_cast<std::size_t>(length), 0.0));
  return w;
}

Regressor regressor_at(const Vec& signal, std::size_t i, int length) {
  if (length < 1) throw std::invalid_argument("regressor_at: length must be >= 1");
  Regressor u(static_cast<std::size_t>(length), 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (i >= j && i - j < signal.size()) u[j] = signal[i - j];
  }
  return u;
}

Vec factor_outputs(const Regressor& u, const FactorWeights& w) {
  check_dims(u, w, "factor_outputs");
  Vec y_o(w.factors.size());
  for (std::size_t s = 0; s < w.factors.size(); ++s) {
    const Vec& ws = w.factors[s];
    double acc = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) acc += u[j] * ws[j];
    y_o[s] = acc;
  }
  return y_o;
}

Vec leave_one_out(const Vec& branch_outputs) {
  if (branch_outputs.empty())
    throw std::invalid_argument("leave_one_out: no branch outputs");
  const std::size_t k = branch_outputs.size();
  Vec y_loo(k);
  for (std::size_t s = 0; s < k; ++s) {
    double acc = 1.0;
    for (std::size_t t = 0; t < k; ++t)
      if (t != s) acc *= branch_outputs[t];
    y_loo[s] = acc;
  }
  return y_loo;
}

double output(const Regressor& u, const FactorWeights& w) {
  const Vec y_o = factor_outputs(u, w);
  double y = 1.0;
  for (double v : y_o) y *= v;
  return y;
}

FactorOutputs evaluate_branches(const Regressor& u, const FactorWeights& w) {
  FactorOutputs out;
  out.y_o = factor_outputs(u, w);
  out.y_loo = leave_one_out(out.y_o);
  out.y = out.y_loo.back() * out.y_o.back();
  return out;
}

}  // namespace sml
