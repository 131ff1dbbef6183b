#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "rcgrf/error.hpp"

namespace rcgrf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

/// Matrix-vector product with an explicit dimension check.
Vec matvec(const Mat& m, const Vec& v);

/// Elementwise logistic; finite input never produces NaN.
Vec sigmoid(const Vec& v);

/// Elementwise hyperbolic tangent.
Vec tanh(const Vec& v);

/// Counter-based splittable generator. A given seed produces the same
/// stream on every platform (integer mixing only). Instances are cheap
/// values; never share one between consumers, split a child instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();                       // standard normal

  /// Independent child stream; a pure function of (parent seed, stream),
  /// the parent is not advanced.
  Rng split(std::uint64_t stream) const;

 private:
  Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// n pseudo-normal draws; std = 0 yields a vector of `mean` exactly.
Vec gaussian(Rng rng, Index n, double mean, double std);

}  // namespace rcgrf
