#pragma once

#include <random>

#include "cpreg/types.hpp"

namespace cpreg::testing {

inline MatrixXd random_matrix(std::mt19937_64& rng, Index n, Index p) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd X(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) X(i, j) = normal(rng);
  }
  return X;
}

inline VectorXd random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline VectorXd random_uniform(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = uniform(rng);
  return v;
}

inline Dataset random_dataset(std::mt19937_64& rng, Index n, Index p) {
  return Dataset(random_vector(rng, n), random_matrix(rng, n, p), random_uniform(rng, n));
}

// Sparse coefficient vector with the first `nonzero` entries drawn at random.
inline VectorXd sparse_coefficients(std::mt19937_64& rng, Index p, Index nonzero) {
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd v = VectorXd::Zero(p);
  for (Index j = 0; j < std::min(nonzero, p); ++j) v[j] = normal(rng);
  return v;
}

}  // namespace cpreg::testing
