// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nosig/behavior.hpp"
#include "nosig/signaling.hpp"

namespace nosig {

namespace qtol {
inline constexpr double matrix = 1e-10;  // Hermiticity, idempotence, trace
}

/// Dense density matrix. Aggregates stay open so validators can inspect
/// deliberately broken inputs; loaders validate once, then the entries are
/// trusted.
struct DensityMatrix {
  Eigen::MatrixXcd rho;
  std::size_t dim() const { return static_cast<std::size_t>(rho.rows()); }
};

/// Projective measurement given as an explicit projector list; outcome k of
/// the measurement carries label `outcomes.labels[k]`.
struct ProjectiveMeasurement {
  std::string name;
  OutcomeSet outcomes;
  std::vector<Eigen::MatrixXcd> projectors;
  std::size_t dim() const {
    return projectors.empty()
               ? 0
               : static_cast<std::size_t>(projectors.front().rows());
  }
};

/// Bipartite scenario: a state on d_A * d_B with measurement menus for the
/// two regions. Tensor index convention: local factor first, so basis vector
/// a * d_B + b is |a> ⊗ |b>.
struct BipartiteSetup {
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  DensityMatrix state;
  std::vector<ProjectiveMeasurement> local_measurements;
  std::vector<ProjectiveMeasurement> remote_measurements;
};

/// Violation kinds: "shape", "hermiticity", "trace", "negative-eigenvalue".
ValidationReport validate_state(const DensityMatrix& m,
                                double tau = qtol::matrix);

/// Violation kinds: "shape", "hermiticity", "idempotence", "orthogonality",
/// "completeness". Indices are projector positions.
ValidationReport validate_measurement(const ProjectiveMeasurement& m,
                                      double tau = qtol::matrix);

/// Validates the state, every measurement, and dimensional consistency.
ValidationReport validate_setup(const BipartiteSetup& s,
                                double tau = qtol::matrix);

/// Throws ConstructionError listing the violations unless the report is
/// clean.
void require_clean(const ValidationReport& report, const std::string& what);

/// Sequential two-measurement table, A measured first:
/// P(i, j) = Tr(P_i rho P_i Q_j), returned row-major over (i, j).
std::vector<double> joint_probability(const DensityMatrix& rho,
                                      const ProjectiveMeasurement& a,
                                      const ProjectiveMeasurement& b);

struct PreConditioned {
  double probability = 0.0;
  DensityMatrix state;
};

/// Collapse onto a projector: (Tr(P rho), P rho P / Tr(P rho)). Throws
/// ConditioningError when the probability is below tau_zero.
PreConditioned pre_condition(const DensityMatrix& rho,
                             const Eigen::MatrixXcd& projector,
                             double tau_zero = tol::zero);

/// P(i|j) = Tr(P_i rho P_i Q_j) / sum_k Tr(P_k rho P_k Q_j). Throws
/// ConditioningError when the denominator is below tau_zero.
double post_condition(const DensityMatrix& rho, const ProjectiveMeasurement& a,
                      const ProjectiveMeasurement& b, std::size_t i,
                      std::size_t j, double tau_zero = tol::zero);

/// Largest j-wise gap of the post-conditioned probability of the shared
/// projector when the rest of the first measurement changes:
/// max_j |P(shared|j; A) - P(shared|j; A')|. A strictly positive value
/// witnesses that no fixed conditioned density matrix reproduces
/// post-conditioning. Throws ConstructionError unless both measurements
/// contain `shared` as a projector (entry-wise within qtol::matrix).
double post_condition_witness(const DensityMatrix& rho,
                              const ProjectiveMeasurement& b,
                              const Eigen::MatrixXcd& shared,
                              const ProjectiveMeasurement& a,
                              const ProjectiveMeasurement& a_prime,
                              double tau_zero = tol::zero);

/// Simultaneous measurement of the two factors:
/// P(i, j | E, D) = Tr((P_i ⊗ Q_j) rho), one preparation named "W0".
JointBehavior bipartite_behavior(const BipartiteSetup& s);

struct CollapsedState {
  double c = 0.0;
  DensityMatrix state;  // on dim_a
};

/// Remote conditioning: c_j = Tr((I ⊗ Q_j) rho) and the local reduced state
/// of (I ⊗ Q_j) rho (I ⊗ Q_j) / c_j. Throws ConditioningError when c_j is
/// below tau_zero.
CollapsedState collapsed_remote_state(const BipartiteSetup& s, std::size_t d,
                                      std::size_t j,
                                      double tau_zero = tol::zero);

/// Single-region behavior of a state over a measurement menu:
/// P(i | E) = Tr(P_i rho), one preparation named `prep`.
Behavior behavior_from_state(const DensityMatrix& rho,
                             const std::vector<ProjectiveMeasurement>& menus,
                             const std::string& prep = "W0");

/// Kronecker product, left factor local.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Contract the remote factor: out(a, a') = sum_b M(a*d_b + b, a'*d_b + b).
Eigen::MatrixXcd partial_trace_remote(const Eigen::MatrixXcd& m,
                                      std::size_t d_a, std::size_t d_b);

/// Rank-1 projectors onto the columns of a unitary.
ProjectiveMeasurement basis_measurement(const std::string& name,
                                        const Eigen::MatrixXcd& unitary);

/// Standard basis {|0>, ..., |d-1>}.
Eigen::MatrixXcd computational_basis(std::size_t d);

/// Discrete-Fourier basis; for d = 2 this is the x basis {|+>, |->}.
Eigen::MatrixXcd fourier_basis(std::size_t d);

/// Haar-ish random unitary: QR of a complex Gaussian matrix with the R
/// diagonal phase-fixed. Deterministic per generator state.
Eigen::MatrixXcd random_unitary(std::size_t d, std::mt19937_64& g);

/// Random pure state |psi><psi| from a normalized complex Gaussian vector.
DensityMatrix random_pure(std::size_t d, std::mt19937_64& g);

/// Random full-rank state G G^dagger / Tr(G G^dagger), G complex Gaussian.
DensityMatrix random_density(std::size_t d, std::mt19937_64& g);

/// Two-qubit singlet (|01> - |10>) / sqrt(2).
DensityMatrix singlet_state();

/// Random bipartite setup: random state on d_a * d_b, `n_local` and
/// `n_remote` random bases per side. Deterministic per generator state.
BipartiteSetup random_setup(std::size_t d_a, std::size_t d_b,
                            std::size_t n_local, std::size_t n_remote,
                            std::mt19937_64& g);

}  // namespace nosig
