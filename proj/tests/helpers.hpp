#pragma once

#include <random>

#include "hkl2/exterior_algebra.hpp"

namespace testing_support {

inline hkl2::ext::FormVector random_form(int dim, int degree, std::mt19937_64& rng, bool complex = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXcd block(hkl2::ext::degree_size(dim, degree));
  for (Eigen::Index i = 0; i < block.size(); ++i) block(i) = {u(rng), complex ? u(rng) : 0.0};
  return hkl2::ext::FormVector::from_block(dim, degree, block);
}

inline hkl2::ext::FormVector random_mixed(int dim, std::mt19937_64& rng) {
  hkl2::ext::FormVector f(dim);
  for (int p = 0; p <= dim; ++p) f += random_form(dim, p, rng);
  return f;
}

} // namespace testing_support
