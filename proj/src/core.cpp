#include "rcgrf/core.hpp"

#include <cmath>
#include <numbers>

namespace rcgrf {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShape: return "shape_error";
    case ErrorCode::kParameter: return "parameter_error";
    case ErrorCode::kData: return "data_error";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kSchema: return "schema_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kConfig: return "config_error";
    case ErrorCode::kSequenceTooShort: return "sequence_too_short";
    case ErrorCode::kDegenerateFeature: return "degenerate_feature";
    case ErrorCode::kSplitTooSmall: return "split_too_small";
    case ErrorCode::kTrainingDiverged: return "training_diverged";
  }
  return "unknown_error";
}

Vec matvec(const Mat& m, const Vec& v) {
  if (m.cols() != v.size()) {
    fail(ErrorCode::kShape,
         "matvec: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
             " but vector has length " + std::to_string(v.size()));
  }
  return m * v;
}

Vec sigmoid(const Vec& v) {
  // 1/(1+exp(-x)) saturates to 0/1 at the extremes but never NaNs.
  return (1.0 / (1.0 + (-v.array()).exp())).matrix();
}

Vec tanh(const Vec& v) { return v.array().tanh().matrix(); }

Rng::Rng(std::uint64_t seed) : key_(mix64(seed + kGamma)) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  // Box-Muller; the half-step offset keeps u1 strictly positive.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(mix64(key_ ^ mix64(stream + kGamma)), 0);
}

Vec gaussian(Rng rng, Index n, double mean, double std) {
  if (n <= 0) {
    fail(ErrorCode::kParameter, "gaussian: n must be positive, got " + std::to_string(n));
  }
  if (std < 0.0) {
    fail(ErrorCode::kParameter, "gaussian: std must be nonnegative, got " + std::to_string(std));
  }
  Vec out(n);
  for (Index i = 0; i < n; ++i) {
    const double z = rng.normal();
    out[i] = std == 0.0 ? mean : mean + std * z;
  }
  return out;
}

}  // namespace rcgrf
