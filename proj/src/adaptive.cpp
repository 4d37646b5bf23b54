#include "sml/adaptive.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "csv_util.hpp"

namespace sml {

FactorWeights sml_init(int order, int length, InitScheme scheme) {
  if (order < 1 || length < 1)
    throw std::invalid_argument("sml_init: order and length must be >= 1");
  FactorWeights w = zero_weights(order, length);
  for (int j = 1; j <= order - 1; ++j) {
    Vec& wj = w.factors[static_cast<std::size_t>(j - 1)];
    wj[0] = std::ldexp(1.0, 1 - j);  // 2^(1-j)
    if (scheme == InitScheme::kTextVariant && length > 1) wj.back() = 1.0;
  }
  // last factor stays zero
  return w;
}

long sml_mult_census(int length, int order) {
  const long m = length, k = order;
  return m * k + k * k - k + 2 * m + 2;
}

long volterra_basis_size(int length, int order) {
  if (order < 1 || length < 1)
    throw std::invalid_argument("volterra_basis_size: order and length must be >= 1");
  // C(M+K-1, K), exact at every intermediate step
  long long r = 1;
  for (long long i = 1; i <= order; ++i) r = r * (length - 1 + i) / i;
  return static_cast<long>(r);
}

SmlLms::SmlLms(int order, int length, double step_size, InitScheme scheme)
    : weights_(sml_init(order, length, scheme)), mu_(step_size) {
  if (!(step_size > 0.0)) throw std::invalid_argument("SmlLms: step size must be > 0");
  y_o_.assign(static_cast<std::size_t>(order), 0.0);
  y_loo_.assign(static_cast<std::size_t>(order), 0.0);
  f_.assign(static_cast<std::size_t>(length), 0.0);
}

void SmlLms::set_weights(const FactorWeights& w) {
  if (w.order() != weights_.order() || w.length() != weights_.length())
    throw std::invalid_argument("SmlLms::set_weights: dimension mismatch");
  weights_ = w;
}

StepResult SmlLms::step(const Regressor& u, double desired) {
  const std::size_t m = static_cast<std::size_t>(weights_.length());
  const std::size_t k = static_cast<std::size_t>(weights_.order());
  if (u.size() != m)
    throw std::invalid_argument("SmlLms::step: regressor length mismatch");

  long mults = 0;

  // branch outputs y_o[s] = u . w_s
  for (std::size_t s = 0; s < k; ++s) {
    const Vec& ws = weights_.factors[s];
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += u[j] * ws[j];
    y_o_[s] = acc;
  }
  mults += static_cast<long>(m * k);

  // leave-one-out running products
  for (std::size_t s = 0; s < k; ++s) {
    double acc = 1.0;
    for (std::size_t t = 0; t < k; ++t) {
      if (t == s) continue;
      acc *= y_o_[t];
      ++mults;
    }
    y_loo_[s] = acc;
  }

  // output from the last leave-one-out product, then the error
  const double y = y_loo_[k - 1] * y_o_[k - 1];
  mults += 1;
  const double e = desired - y;

  // f = (mu * e) * u
  const double g = mu_ * e;
  mults += 1;
  for (std::size_t j = 0; j < m; ++j) f_[j] = g * u[j];
  mults += static_cast<long>(m);

  // weight update w_s += f * y_loo[s], all from the pre-update branch
  // values; the census charges this row as a single vector scaling
  for (std::size_t s = 0; s < k; ++s) {
    const double ys = y_loo_[s];
    Vec& ws = weights_.factors[s];
    for (std::size_t j = 0; j < m; ++j) ws[j] += f_[j] * ys;
  }
  mults += static_cast<long>(m);

  ++iter_;
  mult_count_last_ = mults;

  bool finite = std::isfinite(y);
  for (const Vec& ws : weights_.factors)
    for (double v : ws) finite = finite && std::isfinite(v);
  if (!finite) throw DivergenceError(iter_, "product-of-FIR LMS produced nonfinite values");

  return {e, y};
}

std::vector<MultiIndex> VolterraLms::monomial_basis(int order, int length) {
  if (order < 1 || length < 1)
    throw std::invalid_argument("monomial_basis: order and length must be >= 1");
  std::vector<MultiIndex> basis;
  MultiIndex cur(static_cast<std::size_t>(order), 0);
  while (true) {
    basis.push_back(cur);
    int t = order - 1;
    while (t >= 0 && cur[static_cast<std::size_t>(t)] == length - 1) --t;
    if (t < 0) break;
    ++cur[static_cast<std::size_t>(t)];
    for (int r = t + 1; r < order; ++r) cur[static_cast<std::size_t>(r)] = cur[static_cast<std::size_t>(t)];
  }
  return basis;
}

VolterraLms::VolterraLms(int order, int length, double step_size)
    : order_(order), length_(length), mu_(step_size) {
  if (!(step_size > 0.0)) throw std::invalid_argument("VolterraLms: step size must be > 0");
  basis_ = monomial_basis(order, length);
  coeffs_.assign(basis_.size(), 0.0);
  phi_.assign(basis_.size(), 0.0);
}

void VolterraLms::set_coefficients(const Vec& c) {
  if (c.size() != coeffs_.size())
    throw std::invalid_argument("VolterraLms::set_coefficients: dimension mismatch");
  coeffs_ = c;
}

StepResult VolterraLms::step(const Regressor& u, double desired) {
  if (static_cast<int>(u.size()) != length_)
    throw std::invalid_argument("VolterraLms::step: regressor length mismatch");

  long mults = 0;
  const std::size_t b = basis_.size();
  const std::size_t k = static_cast<std::size_t>(order_);

  // degree-K delay monomials
  for (std::size_t i = 0; i < b; ++i) {
    const MultiIndex& mi = basis_[i];
    double phi = u[static_cast<std::size_t>(mi[0])];
    for (std::size_t t = 1; t < k; ++t) {
      phi *= u[static_cast<std::size_t>(mi[t])];
      ++mults;
    }
    phi_[i] = phi;
  }

  double y = 0.0;
  for (std::size_t i = 0; i < b; ++i) y += coeffs_[i] * phi_[i];
  mults += static_cast<long>(b);

  const double e = desired - y;
  const double g = mu_ * e;
  mults += 1;
  for (std::size_t i = 0; i < b; ++i) coeffs_[i] += g * phi_[i];
  mults += static_cast<long>(b);

  ++iter_;
  mult_count_last_ = mults;

  bool finite = std::isfinite(y);
  for (double v : coeffs_) finite = finite && std::isfinite(v);
  if (!finite) throw DivergenceError(iter_, "Volterra-LMS produced nonfinite values");

  return {e, y};
}

bool sml_step_matches_gradient(const SmlLms& state, const Regressor& u, double desired,
                               double tol) {
  const FactorWeights before = state.weights();
  SmlLms probe = state;
  probe.step(u, desired);
  const FactorWeights& after = probe.weights();

  // one-sample moment estimates in dense coordinates
  const int k = before.order();
  const Vec uk = kron_power(u, k);
  const Vec w_dense = simple_tensor(before.factors);
  const std::size_t n = uk.size();

  Matrix r_one(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) r_one(p, q) = uk[p] * uk[q];
  Vec r_ud(n);
  for (std::size_t p = 0; p < n; ++p) r_ud[p] = desired * uk[p];

  // bracket = -r_ud + w^T r_one, then one gradient row per factor
  Vec bracket(n, 0.0);
  for (std::size_t q = 0; q < n; ++q) {
    double acc = 0.0;
    for (std::size_t p = 0; p < n; ++p) acc += w_dense[p] * r_one(p, q);
    bracket[q] = acc - r_ud[q];
  }

  const double mu = state.step_size();
  for (int s = 0; s < k; ++s) {
    const Matrix open = partial_simple_tensor(before.factors, s);
    for (std::size_t c = 0; c < open.cols(); ++c) {
      double est = 0.0;
      for (std::size_t p = 0; p < n; ++p) est += bracket[p] * open(p, c);
      const double actual = after.factors[static_cast<std::size_t>(s)][c] -
                            before.factors[static_cast<std::size_t>(s)][c];
      const double expected = -mu * est;
      const double scale = std::max(1.0, std::abs(expected));
      if (std::abs(actual - expected) > tol * scale) return false;
    }
  }
  return true;
}

ErrorTrace run_filter(AdaptiveFilter& filter, const Vec& inputs, const Vec& desired,
                      const Plant* plant) {
  if (inputs.size() != desired.size())
    throw std::invalid_argument("run_filter: input/desired length mismatch");
  ErrorTrace trace;
  trace.has_excess = plant != nullptr;
  trace.error.reserve(inputs.size());
  trace.prediction.reserve(inputs.size());
  if (plant) trace.excess.reserve(inputs.size());
  const int m = filter.input_length();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Regressor u = regressor_at(inputs, i, m);
    const StepResult r = filter.step(u, desired[i]);
    trace.error.push_back(r.error);
    trace.prediction.push_back(r.prediction);
    if (plant) trace.excess.push_back(output(u, plant->factors) - r.prediction);
  }
  return trace;
}

using detail::fmt17;
using detail::parse_csv_row;

void write_trace_csv(const ErrorTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "iter,e,y,excess_err\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double ex = trace.has_excess ? trace.excess[i]
                                       : std::numeric_limits<double>::quiet_NaN();
    out << (i + 1) << ',' << fmt17(trace.error[i]) << ',' << fmt17(trace.prediction[i])
        << ',' << fmt17(ex) << '\n';
  }
  if (!out) throw std::runtime_error("write_trace_csv: write failed for " + path);
}

ErrorTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trace_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "iter,e,y,excess_err")
    throw std::runtime_error("read_trace_csv: bad header in " + path);
  ErrorTrace trace;
  bool any_finite_excess = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> f = parse_csv_row(line, 4, path);
    trace.error.push_back(f[1]);
    trace.prediction.push_back(f[2]);
    trace.excess.push_back(f[3]);
    if (!std::isnan(f[3])) any_finite_excess = true;
  }
  trace.has_excess = any_finite_excess;
  if (!trace.has_excess) trace.excess.clear();
  return trace;
}

}  // namespace sml
