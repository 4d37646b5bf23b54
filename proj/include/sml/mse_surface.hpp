#pragma once

#include <string>

#include "sml/sml_model.hpp"

// The mean-square-error surface of the product-of-FIR model over the
// second-order-in-w statistics of the data: exact cost, exact gradient,
// and the normal-equation residual. This is the dense analysis path,
// capped at oracle scale; the adaptive filter never touches it.

namespace sml {

// Statistics defining the MSE surface. r_uk is the M^K x M^K correlation
// of the Kronecker-power regressor (symmetric, PSD, and singular for
// K > 1 because the power has repeated entries); r_ukd is the row
// E[d * u^(x)K]; r_d is E[d^2].
struct MomentSet {
  Matrix r_uk;
  Vec r_ukd;
  double r_d = 0.0;
  int length = 0;  // M
  int order = 0;   // K
  long sample_count = 0;  // 0 when analytic
};

// Ground-truth system: factor vectors plus measurement-noise variance.
struct Plant {
  FactorWeights factors;
  double noise_var = 0.0;
};

// Plain sample averages over the given data. `order` is the model order K
// (not derivable from the data). Throws on empty input or when M^K
// objects exceed the dense cap.
MomentSet estimate_moments(const std::vector<Regressor>& regressors, const Vec& desired,
                           int order);

// r_d - 2 * r_ukd . w + w^T r_uk w with w = simple_tensor(weights). When
// the moments are sample averages this equals the empirical mean squared
// error of the filter on that data.
double mse(const FactorWeights& weights, const MomentSet& mom);

// Gradient of mse with respect to each factor vector, in the
// directional-derivative convention:
//   mse(W + eps*D) - mse(W) ~= eps * sum_s grad_s . D_s.
std::vector<Vec> grad(const FactorWeights& weights, const MomentSet& mom);

// Euclidean norm of r_uk * simple_tensor(weights) - r_ukd^T. Zero exactly
// when the weights solve the normal equations; at the plant weights with
// noiseless data it vanishes to rounding.
double normal_residual(const FactorWeights& weights, const MomentSet& mom);

// Plain-text export/import. Layout: a header line "M K sample_count",
// then r_d on its own line, then r_ukd on one line, then the M^K rows of
// r_uk. All values with 17 significant digits.
void save_moments(const MomentSet& mom, const std::string& path);
MomentSet load_moments(const std::string& path);

}  // namespace sml
