#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ivdep {

/// The single seeded generator behind every random choice. Uniform doubles
/// are built from the top 53 bits so output does not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  static constexpr std::string_view algorithm = "mt19937_64/top53";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Point on the probability simplex of dimension n (flat Dirichlet).
  std::vector<double> simplex(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

/// Samples indices from a fixed discrete distribution by inverse CDF.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights);
  std::size_t operator()(Rng& rng) const;

 private:
  std::vector<double> cdf_;
};

}  // namespace ivdep
