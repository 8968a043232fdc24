// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: nine quantitative criteria, one [PASS]/[FAIL] line each.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nosig/json_io.hpp"
#include "nosig/quantum.hpp"
#include "nosig/rng.hpp"
#include "nosig/signaling.hpp"
#include "nosig/theory_space.hpp"
#include "test_util.hpp"

using namespace nosig;

namespace {

const std::string kFixtures = NOSIG_FIXTURES_DIR;

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(bool ok, const std::string& line) {
  if (!ok) ++failures;
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0,
                double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

BipartiteSetup seeded_setup(std::size_t k) {
  auto g = make_rng(2000 + k);
  const std::size_t da = 2 + k % 2;
  const std::size_t db = 2 + (k / 2) % 2;
  return random_setup(da, db, 2, 2, g);
}

double simplex_violation_of(const TheoryPoint& p) {
  double worst = 0.0;
  for (std::size_t w = 0; w < p.prep_count(); ++w)
    for (std::size_t e = 0; e < p.local_count(); ++e)
      for (std::size_t d = 0; d < p.remote_count(); ++d) {
        const auto block = p.block(w, e, d);
        double sum = 0.0;
        for (const double v : block) {
          sum += v;
          worst = std::max(worst, -v);
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
  return worst;
}

// 1. Law of total probability as an identity of the table arithmetic:
//    1000 random joint behaviors, every (prep, context pair), residual
//    <= 1e-12, under 5 s.
void criterion_total_probability() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::size_t t = 0; t < 1000; ++t) {
    const BehaviorStructure s{1 + t % 3,        1 + (t / 3) % 3,
                              1 + (t / 9) % 3,  2 + (t / 27) % 3,
                              2 + (t / 81) % 3};
    const TheoryPoint p = sample_theory(s, 1000 + t);
    for (std::size_t w = 0; w < s.preps; ++w)
      for (std::size_t e = 0; e < s.locals; ++e)
        for (std::size_t d = 0; d < s.remotes; ++d)
          worst = std::max(worst, total_probability_check(p, w, e, d));
  }
  const double dt = seconds_since(t0);
  report(worst <= 1e-12 && dt < 5.0,
         "1. total probability: 1000 random joint behaviors, max residual " +
             fmt("%.3g (tol 1e-12), %.2fs (cap 5s)", worst, dt));
}

// 2. Quantum behaviors respect no-signaling: 100 random bipartite setups
//    with factor dimensions in {2, 3}, both measures <= 1e-10, under 10 s.
void criterion_quantum_no_signaling() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::size_t k = 0; k < 100; ++k) {
    const JointBehavior jb = bipartite_behavior(seeded_setup(k));
    const SignalingReport r = signaling_measure(jb);
    worst = std::max(worst, std::max(r.sig_to_remote, r.sig_to_local));
  }
  const double dt = seconds_since(t0);
  report(worst <= 1e-10 && dt < 10.0,
         "2. quantum no-signaling: 100 random setups, max measure " +
             fmt("%.3g (tol 1e-10), %.2fs (cap 10s)", worst, dt));
}

// 3. Collapse consistency: conditioning the joint behavior equals the
//    behavior of the collapsed remote state, entry-wise within 1e-10, on
//    the same 100 setups.
void criterion_collapse_consistency() {
  double worst = 0.0;
  for (std::size_t k = 0; k < 100; ++k) {
    const BipartiteSetup s = seeded_setup(k);
    const JointBehavior jb = bipartite_behavior(s);
    for (std::size_t d = 0; d < s.remote_measurements.size(); ++d)
      for (std::size_t j = 0;
           j < s.remote_measurements[d].projectors.size(); ++j) {
        const Conditioned via_behavior = condition(jb, 0, d, j);
        const CollapsedState via_state = collapsed_remote_state(s, d, j);
        worst = std::max(worst, std::abs(via_behavior.c - via_state.c));
        const Behavior from_state =
            behavior_from_state(via_state.state, s.local_measurements);
        for (std::size_t e = 0; e < s.local_measurements.size(); ++e)
          for (std::size_t i = 0;
               i < s.local_measurements[e].projectors.size(); ++i)
            worst = std::max(
                worst, std::abs(via_behavior.behavior.at(0, e, i) -
                                from_state.at(0, e, i)));
      }
  }
  report(worst <= 1e-10,
         "3. collapse consistency: 100 setups, max deviation " +
             fmt("%.3g (tol 1e-10)", worst));
}

// 4. Post-conditioning depends on the rest of the first measurement: the
//    shipped qutrit fixture witnesses > 0.01, the commuting control stays
//    below 1e-12.
void criterion_post_conditioning_witness() {
  const QuantumSetup s =
      load_setup(kFixtures + "/qutrit_witness_setup.json");
  const auto& a = s.local(s.witness->a);
  const auto& ap = s.local(s.witness->a_prime);
  const auto& b = s.remote(s.witness->b);
  const Eigen::MatrixXcd shared = a.projectors[s.witness->shared_outcome];
  const double dev = post_condition_witness(s.state, b, shared, a, ap);

  // Commuting control on the same state: both completions diagonal, second
  // measurement diagonal as well.
  ProjectiveMeasurement coarse{
      "control", {{"0", "rest"}}, {shared, a.projectors[1] + a.projectors[2]}};
  const auto diag = basis_measurement("Bc", computational_basis(3));
  const double control =
      post_condition_witness(s.state, diag, shared, a, coarse);

  report(dev > 0.01 && control <= 1e-12,
         "4. post-conditioning witness: qutrit fixture deviation " +
             fmt("%.4f (> 0.01), commuting control %.3g (tol 1e-12)", dev,
                 control));
}

// 5. Signaling theories are dense: explicit perturbations of the PR box,
//    the singlet behavior, and 100 projected random no-signaling points
//    succeed at eps in {1e-2, 1e-4} with verified distance and positive
//    signaling; success rate must be 100%.
void criterion_density() {
  std::vector<TheoryPoint> points;
  points.push_back(testutil::pr_box());
  points.push_back(bipartite_behavior(
      load_setup(kFixtures + "/singlet_setup.json").as_bipartite()));
  for (std::size_t k = 0; k < 100; ++k) {
    const BehaviorStructure s =
        k % 2 == 0 ? BehaviorStructure{1, 2, 2, 2, 2}
                   : BehaviorStructure{1, 2, 2, 3, 3};
    points.push_back(
        project_no_signaling(sample_theory(s, 5000 + k)).point);
  }
  std::size_t attempted = 0;
  std::size_t succeeded = 0;
  for (const auto& p : points)
    for (const double eps : {1e-2, 1e-4}) {
      ++attempted;
      try {
        const TheoryPoint q = construct_signaling_perturbation(p, eps);
        if (sup_distance(p, q) <= eps && signaling_size(q) > 0.0)
          ++succeeded;
      } catch (const Error&) {
      }
    }
  report(attempted == 204 && succeeded == attempted,
         "5. density: " + std::to_string(succeeded) + "/" +
             std::to_string(attempted) +
             " perturbations at eps in {1e-2, 1e-4} verified (need 204/204)");
}

// 6. Signaling theories are open: 100 random signaling theories, 1000
//    probes each at 0.9 * openness_radius, every probe still signals.
void criterion_openness() {
  const BehaviorStructure s{2, 2, 2, 2, 2};
  std::size_t accepted = 0;
  std::size_t probes = 0;
  std::size_t failures_here = 0;
  for (std::uint64_t k = 0; accepted < 100; ++k) {
    const TheoryPoint p = sample_theory(s, 6000 + k);
    if (signaling_size(p) <= 1e-6) continue;
    ++accepted;
    const double r = openness_radius(p);
    for (std::size_t m = 0; m < 1000; ++m) {
      const TheoryPoint q =
          perturb_in_ball(p, 0.9 * r, mix64(mix64(7000 + k, 0x0b), m));
      ++probes;
      if (!(signaling_size(q) > 0.0)) ++failures_here;
    }
  }
  report(probes == 100000 && failures_here == 0,
         "6. openness: " + std::to_string(probes) +
             " probes at 0.9r, " + std::to_string(failures_here) +
             " lost signaling (need 0)");
}

// 7. No-signaling has measure zero: 1e5 uniform samples of the 2x2x2x2x2
//    structure, threshold 1e-6, signaling fraction exactly 1, under 60 s.
void criterion_measure_zero() {
  const auto t0 = std::chrono::steady_clock::now();
  StabilityOptions opt;
  opt.trials = 100000;
  opt.tolerance = 1e-6;
  opt.density_points = 0;
  opt.openness_points = 0;
  const StabilityResult res =
      stability_experiment(BehaviorStructure{2, 2, 2, 2, 2}, opt);
  const double dt = seconds_since(t0);
  report(res.signaling_fraction == 1.0 && dt < 60.0,
         "7. measure zero: 1e5 uniform samples, signaling fraction " +
             fmt("%.6f (need 1.000000 at tol 1e-6), %.1fs (cap 60s)",
                 res.signaling_fraction, dt));
}

// 8. Projection: the copy box reaches the no-signaling set within the
//    iteration cap, lands on the simplices, and projecting again moves
//    nothing.
void criterion_projection() {
  std::string detail;
  bool ok = false;
  try {
    const ProjectionResult res =
        project_no_signaling(testutil::copy_box());
    const double sig = signaling_size(res.point);
    const double simplex = simplex_violation_of(res.point);
    const ProjectionResult again = project_no_signaling(res.point);
    const double drift = sup_distance(res.point, again.point);
    ok = sig <= 1e-9 && simplex <= 1e-12 && drift <= 1e-9;
    detail = fmt("sig %.3g (tol 1e-9), simplex %.3g (tol 1e-12), "
                 "re-projection drift %.3g (tol 1e-9)",
                 sig, simplex, drift) +
             ", " + std::to_string(res.iterations) + " iterations (cap 10000)";
  } catch (const ConvergenceError& e) {
    detail = std::string("no convergence: ") + e.what();
  }
  report(ok, "8. projection: copy box, " + detail);
}

// 9. Equivalence decisions: the photon preparations are pairwise
//    equivalent, outcome relabelings are recovered as permutations, and a
//    0.1-perturbed row is rejected at tolerance 1e-6.
void criterion_equivalence() {
  const Behavior photon = load_behavior(kFixtures + "/photon_equiv.json");
  bool ok = true;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      ok = ok && equivalent_preparations(photon, a, b, 1e-9).equivalent;

  Behavior rotated({"W0", "W1"},
                   {testutil::ctx("E0", 3), testutil::ctx("E1", 3)},
                   {0.5, 0.3, 0.2, /**/ 0.2, 0.5, 0.3,
                    0.1, 0.3, 0.6, /**/ 0.6, 0.1, 0.3});
  const auto pi = equivalent_observations(rotated, 0, 1, 1e-9);
  ok = ok && pi.has_value() && (*pi)[0] == 1 && (*pi)[1] == 2 &&
       (*pi)[2] == 0;

  Behavior perturbed({"W0", "W1"}, {testutil::ctx("E0", 2)},
                     {0.5, 0.5, 0.4, 0.6});
  const auto rej = equivalent_preparations(perturbed, 0, 1, 1e-6);
  ok = ok && !rej.equivalent &&
       std::abs(rej.max_deviation - 0.1) <= 1e-12;

  report(ok,
         "9. equivalence: photon preparations pairwise equivalent, outcome "
         "rotation recovered, 0.1 deviation rejected at tol 1e-6");
}

}  // namespace

int main() {
  criterion_total_probability();
  criterion_quantum_no_signaling();
  criterion_collapse_consistency();
  criterion_post_conditioning_witness();
  criterion_density();
  criterion_openness();
  criterion_measure_zero();
  criterion_projection();
  criterion_equivalence();
  if (failures == 0) {
    std::printf("all 9 acceptance criteria hold\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", failures);
  return 1;
}
