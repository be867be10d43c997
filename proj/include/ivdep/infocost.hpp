#pragma once

#include <array>

#include "ivdep/strategies.hpp"

namespace ivdep {

/// h(p) in bits with 0·log 0 = 0. Throws Error(out_of_range) outside [0, 1].
double binary_entropy(double p);

/// 1 − h((1−k)/2): the least I(X;Λ) that lets a uniform binary instrument
/// produce Pearl value k. Returns 0 for k ≥ 0; throws Error(out_of_range) for k < −1.
double min_info_cost(double k_value);

/// I(λx ; (λa, λb)) in bits.
template <class T>
double mutual_information(const LatentJoint<T>& joint);

/// Witness reaching min_info_cost for pearl-00 under uniform X.
///
/// λa is fixed to f ≡ 0. λb takes the tables g ≡ 0 (group E = 0) and g ≡ 1
/// (group E = 1) with mass 1/2 each, and p(X = E | λ) = (1 − k)/2.
template <class T>
struct InfoCostModel {
  T k_value{0};
  LatentJoint<T> witness;
  std::array<int, 4> grouping{-1, -1, -1, -1};  // λb -> E, −1 if unused
};

/// Requires −1 ≤ k < 0, else Error(out_of_range).
template <class T>
InfoCostModel<T> achievability_model(const T& k_value);

}  // namespace ivdep
