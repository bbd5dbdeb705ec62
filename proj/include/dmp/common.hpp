#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmp {

using Vec = std::vector<double>;

// Thrown when a mixing matrix has a nonzero entry outside the communication
// graph's edge set.
struct TopologyViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when random graph generation exhausts its retry budget.
struct GenerationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an exact metric (duality gap, LP value) is requested for a
// problem class it does not support.
struct UnsupportedProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a solver encounters non-finite state; message carries the
// iteration index.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_sq(const Vec& a) { return dot(a, a); }

inline double norm2(const Vec& a) { return std::sqrt(norm2_sq(a)); }

inline double norm1(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += std::fabs(v);
  return s;
}

inline double norm_inf(const Vec& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::fabs(v));
  return s;
}

inline bool all_finite(const Vec& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Dense row-major matrix. All problem sizes here are desk scale, so no
// attempt at sparsity.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  Vec apply(const Vec& v) const {
    Vec out(rows, 0.0);
    for (int i = 0; i < rows; ++i) {
      double s = 0.0;
      for (int j = 0; j < cols; ++j) s += (*this)(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

  Vec apply_transpose(const Vec& v) const {
    Vec out(cols, 0.0);
    for (int i = 0; i < rows; ++i) {
      const double vi = v[i];
      if (vi == 0.0) continue;
      for (int j = 0; j < cols; ++j) out[j] += (*this)(i, j) * vi;
    }
    return out;
  }
};

// Deterministic, implementation-independent uniform helpers on top of
// mt19937_64. Distributions from <random> are not pinned by the standard,
// so seeded runs stay reproducible only if we derive variates ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {
    // splitmix64 warmup so nearby seeds decorrelate
    for (int i = 0; i < 4; ++i) next();
  }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace dmp
