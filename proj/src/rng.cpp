#include "ivdep/rng.hpp"

#include <algorithm>
#include <cmath>

#include "ivdep/error.hpp"

namespace ivdep {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "empty range");
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

std::vector<double> Rng::simplex(std::size_t n) {
  std::vector<double> out(n);
  double total = 0;
  for (auto& v : out) {
    v = -std::log(1.0 - uniform());
    total += v;
  }
  for (auto& v : out) v /= total;
  return out;
}

DiscreteSampler::DiscreteSampler(const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) {
    if (w < 0 || !std::isfinite(w)) throw Error(ErrorCode::invalid_distribution, "negative or non-finite weight");
    total += w;
    cdf_.push_back(total);
  }
  if (total <= 0) throw Error(ErrorCode::invalid_distribution, "weights sum to zero");
  for (auto& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

std::size_t DiscreteSampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
}

}  // namespace ivdep
