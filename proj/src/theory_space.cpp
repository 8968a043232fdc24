// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#include "nosig/theory_space.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nosig {
namespace {

std::vector<Context> generated_contexts(const std::string& stem,
                                        std::size_t count,
                                        std::size_t outcomes) {
  std::vector<Context> out;
  out.reserve(count);
  OutcomeSet labels;
  for (std::size_t k = 0; k < outcomes; ++k)
    labels.labels.push_back(std::to_string(k));
  for (std::size_t k = 0; k < count; ++k)
    out.push_back({stem + std::to_string(k), labels});
  return out;
}

void check_same_structure(const TheoryPoint& p, const TheoryPoint& q) {
  if (p.table().size() != q.table().size() ||
      p.prep_count() != q.prep_count() ||
      p.local_count() != q.local_count() ||
      p.remote_count() != q.remote_count())
    throw ShapeError("points do not share a structure");
}

/// One flat Dirichlet draw per block, written over `table`.
void sample_blocks(const TheoryPoint& shape, std::vector<double>& table,
                   std::mt19937_64& g) {
  for (std::size_t w = 0; w < shape.prep_count(); ++w)
    for (std::size_t e = 0; e < shape.local_count(); ++e)
      for (std::size_t d = 0; d < shape.remote_count(); ++d) {
        const std::size_t off = shape.block_offset(w, e, d);
        dirichlet_uniform(
            g, std::span<double>(table.data() + off, shape.block_size(e, d)));
      }
}

double simplex_violation(const TheoryPoint& shape,
                         const std::vector<double>& table) {
  double worst = 0.0;
  for (std::size_t w = 0; w < shape.prep_count(); ++w)
    for (std::size_t e = 0; e < shape.local_count(); ++e)
      for (std::size_t d = 0; d < shape.remote_count(); ++d) {
        const std::size_t off = shape.block_offset(w, e, d);
        const std::size_t n = shape.block_size(e, d);
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          sum += table[off + k];
          worst = std::max(worst, -table[off + k]);
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
  return worst;
}

/// Euclidean projection of v onto the probability simplex (sorting method).
void project_simplex(std::span<double> v) {
  const std::size_t n = v.size();
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    css += u[k];
    const double t = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  for (std::size_t k = 0; k < n; ++k)
    v[k] = std::max(0.0, v[k] - theta);
  // Exact renormalization of the support removes the O(n*eps) drift the
  // subtraction leaves behind.
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += v[k];
  if (sum > 0.0)
    for (std::size_t k = 0; k < n; ++k) v[k] /= sum;
}

}  // namespace

BehaviorStructure BehaviorStructure::parse(const std::string& text) {
  std::vector<std::size_t> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t sep = text.find('x', start);
    const std::string piece =
        text.substr(start, sep == std::string::npos ? sep : sep - start);
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(piece, &used);
      if (used != piece.size() || v == 0) throw std::invalid_argument(piece);
      parts.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ParseError("bad structure '" + text +
                       "': expected PxLxRxN or PxLxRxNxM with positive "
                       "integers");
    }
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  if (parts.size() != 4 && parts.size() != 5)
    throw ParseError("bad structure '" + text +
                     "': expected 4 or 5 'x'-separated fields");
  BehaviorStructure s;
  s.preps = parts[0];
  s.locals = parts[1];
  s.remotes = parts[2];
  s.local_outcomes = parts[3];
  s.remote_outcomes = parts.size() == 5 ? parts[4] : parts[3];
  return s;
}

BehaviorStructure BehaviorStructure::of(const JointBehavior& jb) {
  BehaviorStructure s;
  s.preps = jb.prep_count();
  s.locals = jb.local_count();
  s.remotes = jb.remote_count();
  if (jb.local_count() == 0 || jb.remote_count() == 0)
    throw ShapeError("empty behavior has no structure");
  s.local_outcomes = jb.local_contexts().front().outcomes.size();
  s.remote_outcomes = jb.remote_contexts().front().outcomes.size();
  for (const auto& c : jb.local_contexts())
    if (c.outcomes.size() != s.local_outcomes)
      throw ShapeError("ragged local outcome counts");
  for (const auto& c : jb.remote_contexts())
    if (c.outcomes.size() != s.remote_outcomes)
      throw ShapeError("ragged remote outcome counts");
  return s;
}

std::vector<std::string> BehaviorStructure::preparations() const {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < preps; ++k) out.push_back("W" + std::to_string(k));
  return out;
}

std::vector<Context> BehaviorStructure::local_contexts() const {
  return generated_contexts("E", locals, local_outcomes);
}

std::vector<Context> BehaviorStructure::remote_contexts() const {
  return generated_contexts("D", remotes, remote_outcomes);
}

std::size_t BehaviorStructure::table_size() const {
  return preps * locals * remotes * local_outcomes * remote_outcomes;
}

TheoryPoint BehaviorStructure::make(std::vector<double> table) const {
  return JointBehavior(preparations(), local_contexts(), remote_contexts(),
                       std::move(table));
}

TheoryPoint BehaviorStructure::uniform() const {
  const double v =
      1.0 / static_cast<double>(local_outcomes * remote_outcomes);
  return make(std::vector<double>(table_size(), v));
}

WeakProbe full_probe(const JointBehavior& jb, double eps) {
  WeakProbe probe;
  probe.eps = eps;
  for (std::size_t w = 0; w < jb.prep_count(); ++w) probe.preps.push_back(w);
  for (std::size_t e = 0; e < jb.local_count(); ++e)
    for (std::size_t d = 0; d < jb.remote_count(); ++d)
      probe.context_pairs.push_back({e, d});
  return probe;
}

double weak_distance(const TheoryPoint& p, const TheoryPoint& q,
                     const WeakProbe& probe) {
  check_same_structure(p, q);
  if (probe.preps.empty() || probe.context_pairs.empty())
    throw ConstructionError("probe must name preparations and context pairs");
  if (probe.eps <= 0.0) throw ConstructionError("probe radius must be positive");
  double worst = 0.0;
  for (std::size_t w : probe.preps) {
    if (w >= p.prep_count()) throw IndexError("probe preparation out of range");
    for (const auto& [e, d] : probe.context_pairs) {
      if (e >= p.local_count() || d >= p.remote_count())
        throw IndexError("probe context pair out of range");
      const auto a = p.block(w, e, d);
      const auto b = q.block(w, e, d);
      for (std::size_t k = 0; k < a.size(); ++k)
        worst = std::max(worst, std::abs(a[k] - b[k]));
    }
  }
  return worst;
}

double sup_distance(const TheoryPoint& p, const TheoryPoint& q) {
  check_same_structure(p, q);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.table().size(); ++k)
    worst = std::max(worst, std::abs(p.table()[k] - q.table()[k]));
  return worst;
}

double signaling_size(const TheoryPoint& p) {
  const SignalingReport r = signaling_measure_serial(p);
  return std::max(r.sig_to_remote, r.sig_to_local);
}

TheoryPoint sample_theory(const BehaviorStructure& structure,
                          std::uint64_t seed) {
  TheoryPoint shape = structure.uniform();
  std::vector<double> table = shape.table();
  auto g = make_rng(seed, kStreamSample);
  sample_blocks(shape, table, g);
  return shape.with_table(std::move(table));
}

TheoryPoint perturb_in_ball(const TheoryPoint& p, double eps,
                            std::uint64_t seed) {
  if (eps < 0.0) throw ConstructionError("radius must be non-negative");
  if (eps == 0.0) return p;
  auto g = make_rng(seed, kStreamPerturb);
  std::vector<double> table = p.table();
  std::vector<double> dir;
  for (std::size_t w = 0; w < p.prep_count(); ++w)
    for (std::size_t e = 0; e < p.local_count(); ++e)
      for (std::size_t d = 0; d < p.remote_count(); ++d) {
        const std::size_t off = p.block_offset(w, e, d);
        const std::size_t n = p.block_size(e, d);
        dir.assign(n, 0.0);
        double mean = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          dir[k] = normal01(g);
          mean += dir[k];
        }
        const double u = uniform01(g);
        if (n < 2) continue;  // a point simplex admits no displacement
        mean /= static_cast<double>(n);
        double sup = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          dir[k] -= mean;
          sup = std::max(sup, std::abs(dir[k]));
        }
        if (sup <= 0.0) continue;
        double tmax = eps;
        for (std::size_t k = 0; k < n; ++k) {
          if (dir[k] < 0.0)
            tmax = std::min(tmax, table[off + k] * sup / -dir[k]);
        }
        const double t = tmax * u / sup;
        for (std::size_t k = 0; k < n; ++k)
          table[off + k] = std::max(0.0, table[off + k] + t * dir[k]);
      }
  return p.with_table(std::move(table));
}

TheoryPoint construct_signaling_perturbation(const TheoryPoint& p, double eps,
                                             double tau_sig) {
  if (eps <= 0.0) throw ConstructionError("radius must be positive");
  const SignalingReport before = signaling_measure_serial(p);
  if (std::max(before.sig_to_remote, before.sig_to_local) > tau_sig)
    throw SignalingError("input point already signals", before);

  // Shaving the moved mass keeps the realized sup-distance at or below the
  // requested radius despite rounding in the subtraction.
  const auto shave = [](double m) { return m * (1.0 - 1e-9); };

  std::vector<double> table = p.table();
  // First: shift a remote marginal under one local context. Needs a sibling
  // local context to disagree with and two remote outcomes to move between.
  if (p.local_count() >= 2) {
    for (std::size_t w = 0; w < p.prep_count(); ++w)
      for (std::size_t e = 0; e < p.local_count(); ++e)
        for (std::size_t d = 0; d < p.remote_count(); ++d) {
          const std::size_t pd = p.remote_contexts()[d].outcomes.size();
          const std::size_t pe = p.local_contexts()[e].outcomes.size();
          if (pd < 2) continue;
          const std::size_t off = p.block_offset(w, e, d);
          for (std::size_t i = 0; i < pe; ++i)
            for (std::size_t j1 = 0; j1 < pd; ++j1) {
              const double mass = table[off + i * pd + j1];
              if (mass <= 0.0) continue;
              const std::size_t j2 = j1 == 0 ? 1 : 0;
              const double moved = shave(std::min(eps, mass));
              table[off + i * pd + j1] -= moved;
              table[off + i * pd + j2] += moved;
              return p.with_table(std::move(table));
            }
        }
  }
  // Fallback: shift a local marginal under one remote context instead.
  if (p.remote_count() >= 2) {
    for (std::size_t w = 0; w < p.prep_count(); ++w)
      for (std::size_t e = 0; e < p.local_count(); ++e)
        for (std::size_t d = 0; d < p.remote_count(); ++d) {
          const std::size_t pd = p.remote_contexts()[d].outcomes.size();
          const std::size_t pe = p.local_contexts()[e].outcomes.size();
          if (pe < 2) continue;
          const std::size_t off = p.block_offset(w, e, d);
          for (std::size_t j = 0; j < pd; ++j)
            for (std::size_t i1 = 0; i1 < pe; ++i1) {
              const double mass = table[off + i1 * pd + j];
              if (mass <= 0.0) continue;
              const std::size_t i2 = i1 == 0 ? 1 : 0;
              const double moved = shave(std::min(eps, mass));
              table[off + i1 * pd + j] -= moved;
              table[off + i2 * pd + j] += moved;
              return p.with_table(std::move(table));
            }
        }
  }
  throw ConstructionError(
      "no feasible signaling move: every movable direction is absent or "
      "carries no mass");
}

std::size_t max_outcome_count(const TheoryPoint& p) {
  std::size_t n = 0;
  for (const auto& c : p.local_contexts()) n = std::max(n, c.outcomes.size());
  for (const auto& c : p.remote_contexts()) n = std::max(n, c.outcomes.size());
  return n;
}

double openness_radius(const TheoryPoint& p) {
  const std::size_t n = max_outcome_count(p);
  if (n == 0) return 0.0;
  return signaling_size(p) / (2.0 * static_cast<double>(n));
}

std::vector<SumEquality> equality_family(const JointBehavior& jb,
                                         SignalDirection direction,
                                         bool all_pairs) {
  std::vector<SumEquality> out;
  const std::size_t ne = jb.local_count();
  const std::size_t nd = jb.remote_count();
  for (std::size_t w = 0; w < jb.prep_count(); ++w) {
    if (direction == SignalDirection::LocalToRemote) {
      // Remote marginals agree across local contexts.
      for (std::size_t d = 0; d < nd; ++d) {
        const std::size_t pd = jb.remote_contexts()[d].outcomes.size();
        for (std::size_t j = 0; j < pd; ++j)
          for (std::size_t ea = 0; ea < ne; ++ea)
            for (std::size_t eb = ea + 1; eb < ne; ++eb) {
              if (!all_pairs && eb != ea + 1) continue;
              SumEquality eq;
              const std::size_t pa = jb.local_contexts()[ea].outcomes.size();
              const std::size_t pb = jb.local_contexts()[eb].outcomes.size();
              for (std::size_t i = 0; i < pa; ++i)
                eq.plus.push_back(jb.block_offset(w, ea, d) + i * pd + j);
              for (std::size_t i = 0; i < pb; ++i)
                eq.minus.push_back(jb.block_offset(w, eb, d) + i * pd + j);
              out.push_back(std::move(eq));
            }
      }
    } else {
      // Local marginals agree across remote contexts.
      for (std::size_t e = 0; e < ne; ++e) {
        const std::size_t pe = jb.local_contexts()[e].outcomes.size();
        for (std::size_t i = 0; i < pe; ++i)
          for (std::size_t da = 0; da < nd; ++da)
            for (std::size_t db = da + 1; db < nd; ++db) {
              if (!all_pairs && db != da + 1) continue;
              SumEquality eq;
              const std::size_t pa = jb.remote_contexts()[da].outcomes.size();
              const std::size_t pb = jb.remote_contexts()[db].outcomes.size();
              for (std::size_t j = 0; j < pa; ++j)
                eq.plus.push_back(jb.block_offset(w, e, da) + i * pa + j);
              for (std::size_t j = 0; j < pb; ++j)
                eq.minus.push_back(jb.block_offset(w, e, db) + i * pb + j);
              out.push_back(std::move(eq));
            }
      }
    }
  }
  return out;
}

double max_equality_violation(const TheoryPoint& p,
                              const std::vector<SumEquality>& family) {
  double worst = 0.0;
  for (const auto& eq : family) {
    double v = 0.0;
    for (std::size_t k : eq.plus) v += p.table().at(k);
    for (std::size_t k : eq.minus) v -= p.table().at(k);
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

ProjectionResult project_no_signaling(const TheoryPoint& p,
                                      std::size_t max_iterations,
                                      double move_tol) {
  const std::size_t slab = p.slab_size();
  // Constraints for one preparation slab; all slabs share the structure.
  std::vector<SumEquality> per_slab;
  {
    TheoryPoint one = JointBehavior(
        {p.preparations().front()}, p.local_contexts(), p.remote_contexts(),
        std::vector<double>(p.table().begin(), p.table().begin() + slab));
    auto a = equality_family(one, SignalDirection::LocalToRemote);
    auto b = equality_family(one, SignalDirection::RemoteToLocal);
    per_slab = std::move(a);
    per_slab.insert(per_slab.end(), b.begin(), b.end());
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(per_slab.size()),
      static_cast<Eigen::Index>(slab));
  for (std::size_t r = 0; r < per_slab.size(); ++r) {
    for (std::size_t k : per_slab[r].plus)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) += 1.0;
    for (std::size_t k : per_slab[r].minus)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) -= 1.0;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  if (per_slab.size() > 0) cod.compute(a);

  const auto project_affine = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (per_slab.empty()) return x;
    return x - cod.solve(a * x);
  };

  TheoryPoint shape = p;
  std::vector<double> out_table = p.table();
  ProjectionResult result{p, 0, 0.0, {}};
  std::vector<std::vector<double>> gap_by_prep(p.prep_count());
  std::vector<std::size_t> iters_by_prep(p.prep_count(), 0);
  std::vector<double> move_by_prep(p.prep_count(), 0.0);
  std::vector<std::string> failure_by_prep(p.prep_count());

  for (std::size_t w = 0; w < p.prep_count(); ++w) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(slab));
    for (std::size_t k = 0; k < slab; ++k)
      x[static_cast<Eigen::Index>(k)] = p.table()[w * slab + k];
    Eigen::VectorXd pc = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd qc = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd y = x;
    bool converged = false;
    std::size_t it = 0;
    double move = std::numeric_limits<double>::infinity();
    for (; it < max_iterations; ++it) {
      // Simplex side.
      Eigen::VectorXd t = x + pc;
      y = t;
      for (std::size_t e = 0; e < p.local_count(); ++e)
        for (std::size_t d = 0; d < p.remote_count(); ++d) {
          const std::size_t off = p.block_offset(0, e, d);
          project_simplex(std::span<double>(y.data() + off,
                                            p.block_size(e, d)));
        }
      pc = t - y;
      // Affine side.
      t = y + qc;
      const Eigen::VectorXd xn = project_affine(t);
      qc = t - xn;
      const double gap = (y - xn).cwiseAbs().maxCoeff();
      gap_by_prep[w].push_back(gap);
      move = (xn - x).cwiseAbs().maxCoeff();
      x = xn;
      if (move < move_tol) {
        converged = true;
        ++it;
        break;
      }
    }
    iters_by_prep[w] = it;
    move_by_prep[w] = move;
    if (!converged) {
      // Residuals of the simplex-side iterate for the error report.
      std::vector<double> ytab(p.table());
      for (std::size_t k = 0; k < slab; ++k)
        ytab[w * slab + k] = y[static_cast<Eigen::Index>(k)];
      TheoryPoint yp = p.with_table(ytab);
      const double sig_res = signaling_size(yp);
      const double simp_res = simplex_violation(shape, ytab);
      std::ostringstream msg;
      msg << "projection did not converge for preparation '"
          << p.preparations()[w] << "' after " << max_iterations
          << " iterations";
      throw ConvergenceError(msg.str(), sig_res, simp_res, move);
    }
    for (std::size_t k = 0; k < slab; ++k)
      out_table[w * slab + k] = y[static_cast<Eigen::Index>(k)];
  }

  result.point = p.with_table(std::move(out_table));
  result.iterations =
      *std::max_element(iters_by_prep.begin(), iters_by_prep.end());
  result.final_move =
      *std::max_element(move_by_prep.begin(), move_by_prep.end());
  // Gap histories concatenate per-preparation runs; monotone within each.
  for (auto& h : gap_by_prep)
    result.gap_history.insert(result.gap_history.end(), h.begin(), h.end());
  return result;
}

namespace {

StabilityResult run_stability(const BehaviorStructure& structure,
                              const StabilityOptions& options) {
  if (options.trials == 0)
    throw ConstructionError("stability experiment needs at least one trial");
  if (options.histogram_bins == 0)
    throw ConstructionError("histogram needs at least one bin");
  StabilityResult res;
  res.trials = options.trials;
  res.seed = options.seed;
  res.tolerance = options.tolerance;
  res.per_trial.resize(options.trials);

  const TheoryPoint shape = structure.uniform();
  std::vector<double> scratch_proto = shape.table();

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (options.parallel)
#endif
  for (std::ptrdiff_t t = 0;
       t < static_cast<std::ptrdiff_t>(options.trials); ++t) {
    auto g = make_rng(options.seed, kStreamTrial,
                      static_cast<std::uint64_t>(t));
    std::vector<double> table = scratch_proto;
    sample_blocks(shape, table, g);
    const SignalingReport rep =
        signaling_measure_serial(shape.with_table(std::move(table)));
    res.per_trial[static_cast<std::size_t>(t)] =
        TrialRecord{rep.sig_to_remote, rep.sig_to_local};
  }

  res.histogram.assign(options.histogram_bins, 0);
  res.min_sig = std::numeric_limits<double>::infinity();
  res.max_sig = 0.0;
  std::size_t over = 0;
  for (const auto& rec : res.per_trial) {
    const double sig = std::max(rec.sig_to_remote, rec.sig_to_local);
    res.min_sig = std::min(res.min_sig, sig);
    res.max_sig = std::max(res.max_sig, sig);
    if (sig > options.tolerance) ++over;
    const auto bin = std::min(
        options.histogram_bins - 1,
        static_cast<std::size_t>(sig * static_cast<double>(
                                           options.histogram_bins)));
    ++res.histogram[bin];
  }
  res.signaling_fraction =
      static_cast<double>(over) / static_cast<double>(options.trials);

  for (std::size_t k = 0; k < options.density_points; ++k) {
    auto g = make_rng(options.seed, kStreamDensity, k);
    std::vector<double> table = scratch_proto;
    sample_blocks(shape, table, g);
    TheoryPoint projected =
        project_no_signaling(shape.with_table(std::move(table))).point;
    for (const double eps : options.density_eps) {
      ++res.density_attempted;
      try {
        const TheoryPoint q =
            construct_signaling_perturbation(projected, eps);
        if (sup_distance(projected, q) <= eps && signaling_size(q) > 0.0)
          ++res.density_succeeded;
      } catch (const Error&) {
        // Counted as a failure.
      }
    }
  }

  for (std::size_t k = 0; k < options.openness_points; ++k) {
    auto g = make_rng(options.seed, kStreamOpenness, k);
    std::vector<double> table = scratch_proto;
    sample_blocks(shape, table, g);
    const TheoryPoint point = shape.with_table(std::move(table));
    if (signaling_size(point) <= options.tolerance) continue;
    const double r = openness_radius(point);
    for (std::size_t m = 0; m < options.openness_probes; ++m) {
      const std::uint64_t probe_seed =
          mix64(mix64(mix64(options.seed, kStreamOpenness), k), m);
      const TheoryPoint q = perturb_in_ball(point, 0.9 * r, probe_seed);
      ++res.openness_probes_run;
      if (!(signaling_size(q) > 0.0)) ++res.openness_failures;
    }
  }
  return res;
}

}  // namespace

StabilityResult stability_experiment(const BehaviorStructure& structure,
                                     const StabilityOptions& options) {
  return run_stability(structure, options);
}

StabilityResult stability_experiment_serial(const BehaviorStructure& structure,
                                            StabilityOptions options) {
  options.parallel = false;
  return run_stability(structure, options);
}

}  // namespace nosig
