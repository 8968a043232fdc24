// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

// Timing comparison of the parallel kernels against their serial reference
// implementations. The two must agree exactly; the point of the run is the
// speedup figure.

#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#else
#include <chrono>
#endif

#include "nosig/signaling.hpp"
#include "nosig/theory_space.hpp"

namespace {

double now() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
#endif
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nosig;
  std::size_t preps = 512;
  std::size_t trials = 20000;
  if (argc > 1) preps = static_cast<std::size_t>(std::atoll(argv[1]));
  if (argc > 2) trials = static_cast<std::size_t>(std::atoll(argv[2]));

  BehaviorStructure wide{preps, 3, 3, 4, 4};
  const TheoryPoint point = sample_theory(wide, kDefaultSeed);

  double t0 = now();
  const SignalingReport serial = signaling_measure_serial(point);
  double t1 = now();
  const SignalingReport parallel = signaling_measure(point);
  double t2 = now();
  const bool sig_match = serial.sig_to_remote == parallel.sig_to_remote &&
                         serial.sig_to_local == parallel.sig_to_local;
  std::printf("signaling_measure  %4zu preps   serial %8.4fs  parallel %8.4fs  %s\n",
              preps, t1 - t0, t2 - t1, sig_match ? "match" : "MISMATCH");

  BehaviorStructure small{1, 2, 2, 2, 2};
  StabilityOptions opt;
  opt.trials = trials;
  opt.density_points = 0;
  opt.openness_points = 0;
  t0 = now();
  const StabilityResult rs = stability_experiment_serial(small, opt);
  t1 = now();
  const StabilityResult rp = stability_experiment(small, opt);
  t2 = now();
  bool stab_match = rs.signaling_fraction == rp.signaling_fraction &&
                    rs.min_sig == rp.min_sig && rs.max_sig == rp.max_sig;
  for (std::size_t t = 0; stab_match && t < rs.per_trial.size(); ++t)
    stab_match = rs.per_trial[t].sig_to_remote == rp.per_trial[t].sig_to_remote &&
                 rs.per_trial[t].sig_to_local == rp.per_trial[t].sig_to_local;
  std::printf("stability          %5zu trials  serial %8.4fs  parallel %8.4fs  %s\n",
              trials, t1 - t0, t2 - t1, stab_match ? "match" : "MISMATCH");

  return sig_match && stab_match ? 0 : 1;
}
