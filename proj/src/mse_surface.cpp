#include "sml/mse_surface.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "csv_util.hpp"

namespace sml {

namespace {

void check_dims(const FactorWeights& w, const MomentSet& mom, const char* where) {
  if (w.order() != mom.order || w.length() != mom.length)
    throw std::invalid_argument(std::string(where) + ": weights do not match moment set");
  const std::size_t n = dense_length(static_cast<std::size_t>(mom.length), mom.order);
  if (mom.r_uk.rows() != n || mom.r_uk.cols() != n || mom.r_ukd.size() != n)
    throw std::invalid_argument(std::string(where) + ": inconsistent moment set");
}

// r_uk * w - r_ukd^T, the (half-)gradient direction in dense coordinates.
Vec normal_defect(const Vec& w_dense, const MomentSet& mom) {
  const std::size_t n = w_dense.size();
  Vec defect(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    double acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) acc += mom.r_uk(p, q) * w_dense[q];
    defect[p] = acc - mom.r_ukd[p];
  }
  return defect;
}

}  // namespace

using detail::fmt17;

MomentSet estimate_moments(const std::vector<Regressor>& regressors, const Vec& desired,
                           int order) {
  if (regressors.empty()) throw std::invalid_argument("estimate_moments: empty input");
  if (regressors.size() != desired.size())
    throw std::invalid_argument("estimate_moments: regressor/desired length mismatch");
  if (order < 1) throw std::invalid_argument("estimate_moments: order must be >= 1");
  const std::size_t m = regressors.front().size();
  const std::size_t n = dense_length(m, order);

  MomentSet mom;
  mom.length = static_cast<int>(m);
  mom.order = order;
  mom.sample_count = static_cast<long>(regressors.size());
  mom.r_uk = Matrix(n, n);
  mom.r_ukd.assign(n, 0.0);
  mom.r_d = 0.0;

  for (std::size_t i = 0; i < regressors.size(); ++i) {
    if (regressors[i].size() != m)
      throw std::invalid_argument("estimate_moments: ragged regressor lengths");
    const Vec uk = kron_power(regressors[i], order);
    for (std::size_t p = 0; p < n; ++p) {
      const double up = uk[p];
      for (std::size_t q = 0; q < n; ++q) mom.r_uk(p, q) += up * uk[q];
      mom.r_ukd[p] += desired[i] * up;
    }
    mom.r_d += desired[i] * desired[i];
  }

  const double inv_n = 1.0 / static_cast<double>(regressors.size());
  for (double& v : mom.r_uk.data()) v *= inv_n;
  for (double& v : mom.r_ukd) v *= inv_n;
  mom.r_d *= inv_n;
  return mom;
}

double mse(const FactorWeights& weights, const MomentSet& mom) {
  check_dims(weights, mom, "mse");
  const Vec w = simple_tensor(weights.factors);
  const std::size_t n = w.size();
  double cross = 0.0;
  for (std::size_t p = 0; p < n; ++p) cross += mom.r_ukd[p] * w[p];
  double quad = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    double row = 0.0;
    for (std::size_t q = 0; q < n; ++q) row += mom.r_uk(p, q) * w[q];
    quad += w[p] * row;
  }
  return mom.r_d - 2.0 * cross + quad;
}

std::vector<Vec> grad(const FactorWeights& weights, const MomentSet& mom) {
  check_dims(weights, mom, "grad");
  const Vec w = simple_tensor(weights.factors);
  const Vec defect = normal_defect(w, mom);
  const std::size_t m = static_cast<std::size_t>(mom.length);

  std::vector<Vec> g(static_cast<std::size_t>(weights.order()));
  for (int s = 0; s < weights.order(); ++s) {
    const Matrix open = partial_simple_tensor(weights.factors, s);
    Vec gs(m, 0.0);
    for (std::size_t p = 0; p < open.rows(); ++p) {
      const double d = defect[p];
      if (d == 0.0) continue;
      for (std::size_t c = 0; c < m; ++c) gs[c] += d * open(p, c);
    }
    for (double& v : gs) v *= 2.0;
    g[static_cast<std::size_t>(s)] = std::move(gs);
  }
  return g;
}

double normal_residual(const FactorWeights& weights, const MomentSet& mom) {
  check_dims(weights, mom, "normal_residual");
  const Vec w = simple_tensor(weights.factors);
  const Vec defect = normal_defect(w, mom);
  double acc = 0.0;
  for (double v : defect) acc += v * v;
  return std::sqrt(acc);
}

void save_moments(const MomentSet& mom, const std::string& path) {
  const std::size_t n = dense_length(static_cast<std::size_t>(mom.length), mom.order);
  if (mom.r_uk.rows() != n || mom.r_uk.cols() != n || mom.r_ukd.size() != n)
    throw std::invalid_argument("save_moments: inconsistent moment set");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_moments: cannot open " + path);
  out << mom.length << ' ' << mom.order << ' ' << mom.sample_count << '\n';
  out << fmt17(mom.r_d) << '\n';
  for (std::size_t p = 0; p < n; ++p) out << (p ? " " : "") << fmt17(mom.r_ukd[p]);
  out << '\n';
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) out << (q ? " " : "") << fmt17(mom.r_uk(p, q));
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_moments: write failed for " + path);
}

MomentSet load_moments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_moments: cannot open " + path);
  MomentSet mom;
  if (!(in >> mom.length >> mom.order >> mom.sample_count))
    throw std::runtime_error("load_moments: bad header in " + path);
  if (mom.length < 1 || mom.order < 1)
    throw std::runtime_error("load_moments: invalid dimensions in " + path);
  const std::size_t n = dense_length(static_cast<std::size_t>(mom.length), mom.order);
  if (!(in >> mom.r_d)) throw std::runtime_error("load_moments: bad r_d in " + path);
  mom.r_ukd.assign(n, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    if (!(in >> mom.r_ukd[p])) throw std::runtime_error("load_moments: truncated r_ukd");
  mom.r_uk = Matrix(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      if (!(in >> mom.r_uk(p, q))) throw std::runtime_error("load_moments: truncated r_uk");
  for (double v : mom.r_ukd)
    if (!std::isfinite(v)) throw std::runtime_error("load_moments: nonfinite value");
  for (double v : mom.r_uk.data())
    if (!std::isfinite(v)) throw std::runtime_error("load_moments: nonfinite value");
  return mom;
}

}  // namespace sml
