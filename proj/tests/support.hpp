#pragma once

#include <cmath>
#include <random>
#include <string>

#include "frontier/dataset.hpp"
#include "frontier/model.hpp"

namespace support {

using namespace frontier;

inline Dataset make_dataset(const MatrixXd& x, const VectorXd& y) {
  Dataset ds;
  ds.x = x;
  ds.y = y;
  for (Index k = 0; k < x.cols(); ++k) ds.x_names.push_back("x" + std::to_string(k + 1));
  ds.y_names = {"y"};
  return ds;
}

/// Observations of a concave increasing function, no noise.
inline Dataset concave_sample(Index n, Index m, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  MatrixXd x(n, m);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Index k = 0; k < m; ++k) {
      x(i, k) = u(eng);
      s += std::sqrt(x(i, k));
    }
    y[i] = s;
  }
  return make_dataset(x, y);
}

/// Small random instance with noise, inputs in [1, 5].
inline Dataset noisy_sample(Index n, Index m, std::uint64_t seed, double noise = 0.5) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  std::normal_distribution<double> e(0.0, noise);
  MatrixXd x(n, m);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    double s = 1.0;
    for (Index k = 0; k < m; ++k) {
      x(i, k) = u(eng);
      s *= std::pow(x(i, k), 0.8 / static_cast<double>(m));
    }
    y[i] = s + e(eng);
  }
  return make_dataset(x, y);
}

/// Residuals as a single vector whatever the family.
inline VectorXd residuals(const FrontierEstimate& e) { return e.composite_residuals(); }

inline double max_abs_diff(const VectorXd& a, const VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace support
