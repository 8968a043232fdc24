// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nosig/behavior.hpp"
#include "nosig/rng.hpp"
#include "nosig/signaling.hpp"

namespace nosig {

/// A point of theory space is a joint behavior: one probability simplex per
/// (preparation, local context, remote context) block.
using TheoryPoint = JointBehavior;

/// Block-shape declaration for generated scenarios. Names are generated
/// (W0..., E0..., D0...; outcome labels "0", "1", ...).
struct BehaviorStructure {
  std::size_t preps = 0;
  std::size_t locals = 0;
  std::size_t remotes = 0;
  std::size_t local_outcomes = 0;
  std::size_t remote_outcomes = 0;

  /// Grammar "PxLxRxN" or "PxLxRxNxM": preparations x local contexts x
  /// remote contexts x local outcomes [x remote outcomes, default N].
  static BehaviorStructure parse(const std::string& text);
  static BehaviorStructure of(const JointBehavior& jb);

  std::vector<std::string> preparations() const;
  std::vector<Context> local_contexts() const;
  std::vector<Context> remote_contexts() const;
  std::size_t table_size() const;
  TheoryPoint make(std::vector<double> table) const;
  /// Every block uniform.
  TheoryPoint uniform() const;
};

/// Finite probe of the weak topology: which preparations and context pairs
/// an experiment resolves, and at what radius.
struct WeakProbe {
  std::vector<std::size_t> preps;
  std::vector<std::pair<std::size_t, std::size_t>> context_pairs;  // (e, d)
  double eps = 0.0;
};

/// Probe covering every coordinate of `jb` at radius eps.
WeakProbe full_probe(const JointBehavior& jb, double eps);

/// Sup over probed coordinates of |p - q|. Throws ConstructionError for an
/// empty probe or non-positive radius, IndexError for bad indices,
/// ShapeError when the points disagree in structure.
double weak_distance(const TheoryPoint& p, const TheoryPoint& q,
                     const WeakProbe& probe);

/// Sup over all coordinates.
double sup_distance(const TheoryPoint& p, const TheoryPoint& q);

/// Overall signaling size of a point: the larger of the two directional
/// measures, no reference.
double signaling_size(const TheoryPoint& p);

/// Independent uniform (flat Dirichlet) draw on every block simplex.
TheoryPoint sample_theory(const BehaviorStructure& structure,
                          std::uint64_t seed);

/// Random point Q with sup_distance(P, Q) <= eps: per block, a centered
/// direction scaled to stay on the simplex. eps = 0 returns P unchanged.
TheoryPoint perturb_in_ball(const TheoryPoint& p, double eps,
                            std::uint64_t seed);

/// Explicit signaling perturbation of a no-signaling point: moves mass
/// eps' <= eps within one local row of one block, across two remote
/// outcomes, leaving sibling local contexts untouched, so the remote
/// marginal under that local context shifts by eps'. Falls back to a move
/// within one remote column (shifting a local marginal across remote
/// contexts) when no block supports the first move. Throws SignalingError
/// when P already signals beyond tau_sig, ConstructionError when no
/// feasible move exists.
TheoryPoint construct_signaling_perturbation(const TheoryPoint& p, double eps,
                                             double tau_sig = tol::sig);

/// Largest outcome count summed in any no-signaling equality.
std::size_t max_outcome_count(const TheoryPoint& p);

/// sig(P) / (2 * N_max): every Q closer than this still signals, by the
/// Lipschitz bound |sig(P) - sig(Q)| <= 2 * N_max * sup_distance(P, Q).
double openness_radius(const TheoryPoint& p);

/// One no-signaling equality: sum of entries `plus` minus sum of entries
/// `minus` vanishes on the constraint set. Entries are flat table indices.
struct SumEquality {
  std::vector<std::size_t> plus;
  std::vector<std::size_t> minus;
};

/// The equality family for one direction (consecutive context pairs; the
/// chain implies all pairs). `all_pairs` emits every pair instead, for
/// cross-checks.
std::vector<SumEquality> equality_family(const JointBehavior& jb,
                                         SignalDirection direction,
                                         bool all_pairs = false);

/// Largest |violation| of a family at a point.
double max_equality_violation(const TheoryPoint& p,
                              const std::vector<SumEquality>& family);

struct ProjectionResult {
  TheoryPoint point;
  std::size_t iterations = 0;
  double final_move = 0.0;
  /// Sup-distance between the two set projections, per iteration.
  std::vector<double> gap_history;
};

/// Nearest no-signaling point: Dykstra alternation between the product of
/// simplices and the affine no-signaling subspace. Cap 10^4 iterations,
/// convergence when successive iterates move < 1e-12 in sup norm; throws
/// ConvergenceError with residuals otherwise. The returned point lies on
/// the simplices exactly (up to rounding) with sig below 1e-9.
ProjectionResult project_no_signaling(const TheoryPoint& p,
                                      std::size_t max_iterations = 10000,
                                      double move_tol = 1e-12);

struct TrialRecord {
  double sig_to_remote = 0.0;
  double sig_to_local = 0.0;
};

struct StabilityOptions {
  std::size_t trials = 1000;
  double tolerance = 1e-6;
  std::uint64_t seed = kDefaultSeed;
  std::size_t histogram_bins = 20;
  std::size_t density_points = 8;
  std::vector<double> density_eps = {1e-2, 1e-4};
  std::size_t openness_points = 8;
  std::size_t openness_probes = 32;
  bool parallel = true;
};

struct StabilityResult {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double signaling_fraction = 0.0;
  double min_sig = 0.0;
  double max_sig = 0.0;
  /// Counts over [0, 1] in equal bins; the top edge closes the last bin.
  std::vector<std::size_t> histogram;
  std::size_t density_attempted = 0;
  std::size_t density_succeeded = 0;
  std::size_t openness_probes_run = 0;
  std::size_t openness_failures = 0;
  std::vector<TrialRecord> per_trial;
};

/// Samples `trials` uniform theories, measures signaling, then runs the
/// density check (perturb projected no-signaling points at each eps and
/// re-measure) and the openness check (probe inside 0.9 * openness_radius
/// of signaling points). Deterministic per seed, independent of threading.
StabilityResult stability_experiment(const BehaviorStructure& structure,
                                     const StabilityOptions& options);

/// Serial reference kernel, kept for testing and benchmarking.
StabilityResult stability_experiment_serial(const BehaviorStructure& structure,
                                            StabilityOptions options);

}  // namespace nosig
