// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nosig/behavior.hpp"

namespace nosig {

/// Which family of no-signaling equalities a check refers to. The retrograde
/// case (region in the time-like past) is the same set of checks with the
/// regions relabeled, so every function here takes a direction rather than
/// duplicating code.
enum class SignalDirection {
  LocalToRemote,  // remote marginals must not depend on the local context
  RemoteToLocal,  // local marginals must not depend on the remote context
};

/// Marker "remote context" slot meaning the comparison was made against a
/// reference single-region behavior rather than a sibling context.
inline constexpr std::size_t kReference = static_cast<std::size_t>(-1);

/// Argmax tuple for a remote-marginal discrepancy: the remote marginal of
/// `remote_outcome` under `remote_ctx` differs between local contexts a, b.
struct RemoteMarginalWitness {
  std::size_t prep = 0;
  std::size_t remote_ctx = 0;
  std::size_t remote_outcome = 0;
  std::size_t local_ctx_a = 0;
  std::size_t local_ctx_b = 0;
  double value = 0.0;
};

/// Argmax tuple for a local-marginal discrepancy: the local marginal of
/// `local_outcome` under `local_ctx` differs between remote contexts a, b, or
/// (when remote_ctx_b == kReference) between remote context a and the
/// reference behavior.
struct LocalMarginalWitness {
  std::size_t prep = 0;
  std::size_t local_ctx = 0;
  std::size_t local_outcome = 0;
  std::size_t remote_ctx_a = 0;
  std::size_t remote_ctx_b = 0;
  double value = 0.0;
};

/// Sup-norm violation of the no-signaling equalities in both directions,
/// with the index tuples attaining them.
struct SignalingReport {
  double sig_to_remote = 0.0;
  double sig_to_local = 0.0;
  std::optional<RemoteMarginalWitness> to_remote;
  std::optional<LocalMarginalWitness> to_local;
};

/// Raised when an operation requires a context-independent conditioning
/// probability and the input signals instead.
class SignalingError : public Error {
public:
  SignalingError(const std::string& what, SignalingReport report)
      : Error(what), report_(std::move(report)) {}
  const SignalingReport& report() const { return report_; }

private:
  SignalingReport report_;
};

/// Probability vector over local outcomes: sum_j P(w, e, d, i, j).
std::vector<double> marginal_local(const JointBehavior& jb, std::size_t w,
                                   std::size_t e, std::size_t d);
std::vector<double> marginal_local(const JointBehavior& jb,
                                   const std::string& prep,
                                   const std::string& local,
                                   const std::string& remote);

/// Probability vector over remote outcomes: sum_i P(w, e, d, i, j).
std::vector<double> marginal_remote(const JointBehavior& jb, std::size_t w,
                                    std::size_t e, std::size_t d);
std::vector<double> marginal_remote(const JointBehavior& jb,
                                    const std::string& prep,
                                    const std::string& local,
                                    const std::string& remote);

/// Exact maxima over all index tuples; `reference`, when given, must share
/// the preparation and local context structure of `jb` (ShapeError
/// otherwise) and adds the marginal-agreement comparison to sig_to_local.
/// Parallelized over preparations; identical output to the serial kernel.
SignalingReport signaling_measure(const JointBehavior& jb,
                                  const Behavior* reference = nullptr);

/// Serial reference kernel, kept for testing and benchmarking.
SignalingReport signaling_measure_serial(const JointBehavior& jb,
                                         const Behavior* reference = nullptr);

/// Recompute the discrepancy a witness points at.
double reevaluate(const JointBehavior& jb, const RemoteMarginalWitness& w);
double reevaluate(const JointBehavior& jb, const LocalMarginalWitness& w,
                  const Behavior* reference = nullptr);

/// Throws ShapeError unless `reference` matches jb's preparations and local
/// contexts (names and outcome labels).
void check_reference_shape(const JointBehavior& jb, const Behavior& reference);

/// A conditioned ("collapsed") state: the conditioning probability c and the
/// single-region behavior over the local contexts.
struct Conditioned {
  double c = 0.0;
  Behavior behavior;
};

/// Condition on remote outcome `j` of remote context `d`. Requires the
/// conditioning probability to be independent of the local context within
/// tau_sig (SignalingError otherwise) and above tau_zero (ConditioningError
/// otherwise).
Conditioned condition(const JointBehavior& jb, std::size_t w, std::size_t d,
                      std::size_t j, double tau_sig = tol::sig,
                      double tau_zero = tol::zero);
Conditioned condition(const JointBehavior& jb, const std::string& prep,
                      const std::string& remote, const std::string& outcome,
                      double tau_sig = tol::sig, double tau_zero = tol::zero);

/// Max over local outcomes of |sum_j c_j w_j(i) - marginal_local(i)|; an
/// algebraic identity, so ~1e-16 for any valid table. Terms with c_j below
/// tau_zero contribute their raw sums.
double total_probability_check(const JointBehavior& jb, std::size_t w,
                               std::size_t e, std::size_t d,
                               double tau_zero = tol::zero);

struct PrepEquivalence {
  bool equivalent = false;
  double max_deviation = 0.0;
};

/// Statistical equivalence of two preparations: all rows agree within tol.
PrepEquivalence equivalent_preparations(const Behavior& b, std::size_t w1,
                                        std::size_t w2, double tolerance);

/// Statistical equivalence of two contexts: a permutation pi with
/// P(w, e1, i) == P(w, e2, pi(i)) for every preparation, within tol.
/// Profiles are compared in sup-norm over preparations; ties are broken by
/// ascending outcome label. Returns std::nullopt when no permutation works.
std::optional<std::vector<std::size_t>> equivalent_observations(
    const Behavior& b, std::size_t e1, std::size_t e2, double tolerance);

enum class Verdict {
  NoSignalingCollapse,
  SignalsRemoteToLocal,
  SignalsLocalToRemote,
  Both,
};

std::string to_string(Verdict v);

/// One member of the conditioned family {W|j}.
struct ConditionedState {
  std::size_t prep = 0;
  std::size_t remote_ctx = 0;
  std::size_t remote_outcome = 0;
  double c = 0.0;
  Behavior behavior;
};

struct ExtensionDiagnosis {
  Verdict verdict = Verdict::NoSignalingCollapse;
  SignalingReport report;
  /// Present iff sig_to_remote <= tau_sig; holds every conditioned state
  /// with c above tau_zero.
  std::optional<std::vector<ConditionedState>> conditioned;
};

/// Classify the extension: no-signaling with well-defined collapse, or a
/// signaling direction (or both). The reference is the marginal theory the
/// local region already has; agreement with it is part of the local check.
ExtensionDiagnosis diagnose_extension(const JointBehavior& jb,
                                      const Behavior& reference,
                                      double tau_sig = tol::sig,
                                      double tau_zero = tol::zero);

}  // namespace nosig
