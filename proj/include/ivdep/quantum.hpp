#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "ivdep/inequalities.hpp"
#include "ivdep/scenario.hpp"

namespace ivdep {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

/// Two-qubit state with instrument-dependent measurements on the first qubit
/// and treatment-dependent measurements on the second.
struct QuantumSetup {
  Mat4 state = Mat4::Zero();
  std::vector<std::array<Mat2, 2>> meas_a;  // meas_a[x][a] = M^x_a
  std::array<std::array<Mat2, 2>, 2> meas_b;  // meas_b[a][b] = N^a_b

  int x_card() const { return static_cast<int>(meas_a.size()); }
};

/// Hermiticity, unit trace and positivity of the state (all principal minors),
/// positivity and completeness of every measurement. Tolerance 1e-9.
ValidationReport validate_setup(const QuantumSetup& setup);

/// |ψ⟩ = sin(state_angle)|00⟩ + cos(state_angle)|11⟩,
/// M^x_a = ½(𝟙 + (−1)^a (sin θ_x σ_X + cos θ_x σ_Z)), N^a_b likewise with η_a.
struct AngleFamily {
  double state_angle = 0;
  std::vector<double> theta;
  std::array<double, 2> eta{};
};

QuantumSetup setup_from_angles(const AngleFamily& angles);

/// ½(𝟙 + (−1)^outcome (sin φ σ_X + cos φ σ_Z))
Mat2 projector(double phi, int outcome);

/// p_Q(a,b|x) = tr[(M^x_a ⊗ N^a_b) ρ]. Throws Error(invalid_distribution) on an invalid setup.
ObservedDistribution<double> born_probabilities(const QuantumSetup& setup, const std::vector<double>& p_x);

/// p_Q(b|do(a)) = tr[(𝟙 ⊗ N^a_b) ρ].
InterventionalDistribution<double> quantum_do(const QuantumSetup& setup);

/// max over (a, a', b) of |tr[(𝟙 ⊗ (N^a_b − N^{a'}_b)) ρ]|.
double qace(const QuantumSetup& setup);

/// −K_inst on quantum statistics, with ACE taken as qACE.
double quantum_violation(const InequalitySpec& spec, const QuantumSetup& setup);

struct OptimizerConfig {
  int grid = 20;            // points per angle on the coarse grid
  std::uint64_t seed = 1;   // offsets the grid
  double tolerance = 1e-10;  // Nelder–Mead stop: spread of simplex values
  int starts = 8;           // refined grid points
  int threads = 0;          // 0: IVDEP_THREADS or hardware concurrency
};

struct QuantumOptimum {
  AngleFamily angles;
  double alpha = 0;
  ObservedDistribution<double> p;  // uniform p_x
  InterventionalDistribution<double> p_do;
  std::size_t evaluations = 0;
};

/// Coarse grid over (state angle, η0, η1), each θ_x set to its best value in
/// closed form, then Nelder–Mead from the best grid points.
QuantumOptimum maximize_violation(const InequalitySpec& spec, const OptimizerConfig& config = {});

}  // namespace ivdep
