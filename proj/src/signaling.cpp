// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#include "nosig/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nosig {
namespace {

// Partial report for a single preparation. Merging these in ascending
// preparation order reproduces the serial scan exactly: the serial scan
// visits preparations outermost, and within a preparation both kernels visit
// tuples in the same order with strict-> updates.
struct PrepSlot {
  double sig_to_remote = 0.0;
  double sig_to_local = 0.0;
  std::optional<RemoteMarginalWitness> to_remote;
  std::optional<LocalMarginalWitness> to_local;
};

void scan_prep(const JointBehavior& jb, const Behavior* reference,
               std::size_t w, PrepSlot& slot) {
  const std::size_t ne = jb.local_contexts().size();
  const std::size_t nd = jb.remote_contexts().size();

  for (std::size_t d = 0; d < nd; ++d) {
    const std::size_t pd = jb.remote_contexts()[d].outcomes.size();
    std::vector<std::vector<double>> rem(ne);
    for (std::size_t e = 0; e < ne; ++e) rem[e] = marginal_remote(jb, w, e, d);
    for (std::size_t j = 0; j < pd; ++j) {
      for (std::size_t ea = 0; ea < ne; ++ea) {
        for (std::size_t eb = ea + 1; eb < ne; ++eb) {
          const double v = std::abs(rem[ea][j] - rem[eb][j]);
          if (v > slot.sig_to_remote) {
            slot.sig_to_remote = v;
            slot.to_remote = RemoteMarginalWitness{w, d, j, ea, eb, v};
          }
        }
      }
    }
  }

  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t pe = jb.local_contexts()[e].outcomes.size();
    std::vector<std::vector<double>> loc(nd);
    for (std::size_t d = 0; d < nd; ++d) loc[d] = marginal_local(jb, w, e, d);
    for (std::size_t i = 0; i < pe; ++i) {
      for (std::size_t da = 0; da < nd; ++da) {
        for (std::size_t db = da + 1; db < nd; ++db) {
          const double v = std::abs(loc[da][i] - loc[db][i]);
          if (v > slot.sig_to_local) {
            slot.sig_to_local = v;
            slot.to_local = LocalMarginalWitness{w, e, i, da, db, v};
          }
        }
      }
      if (reference != nullptr) {
        for (std::size_t da = 0; da < nd; ++da) {
          const double v = std::abs(loc[da][i] - reference->at(w, e, i));
          if (v > slot.sig_to_local) {
            slot.sig_to_local = v;
            slot.to_local = LocalMarginalWitness{w, e, i, da, kReference, v};
          }
        }
      }
    }
  }
}

void merge(SignalingReport& out, const PrepSlot& slot) {
  if (slot.to_remote && slot.sig_to_remote > out.sig_to_remote) {
    out.sig_to_remote = slot.sig_to_remote;
    out.to_remote = slot.to_remote;
  }
  if (slot.to_local && slot.sig_to_local > out.sig_to_local) {
    out.sig_to_local = slot.sig_to_local;
    out.to_local = slot.to_local;
  }
}

}  // namespace

std::vector<double> marginal_local(const JointBehavior& jb, std::size_t w,
                                   std::size_t e, std::size_t d) {
  const std::size_t pe = jb.local_contexts().at(e).outcomes.size();
  const std::size_t pd = jb.remote_contexts().at(d).outcomes.size();
  auto block = jb.block(w, e, d);
  std::vector<double> out(pe, 0.0);
  for (std::size_t i = 0; i < pe; ++i)
    for (std::size_t j = 0; j < pd; ++j) out[i] += block[i * pd + j];
  return out;
}

std::vector<double> marginal_local(const JointBehavior& jb,
                                   const std::string& prep,
                                   const std::string& local,
                                   const std::string& remote) {
  return marginal_local(jb, jb.prep_index(prep), jb.local_index(local),
                        jb.remote_index(remote));
}

std::vector<double> marginal_remote(const JointBehavior& jb, std::size_t w,
                                    std::size_t e, std::size_t d) {
  const std::size_t pe = jb.local_contexts().at(e).outcomes.size();
  const std::size_t pd = jb.remote_contexts().at(d).outcomes.size();
  auto block = jb.block(w, e, d);
  std::vector<double> out(pd, 0.0);
  for (std::size_t i = 0; i < pe; ++i)
    for (std::size_t j = 0; j < pd; ++j) out[j] += block[i * pd + j];
  return out;
}

std::vector<double> marginal_remote(const JointBehavior& jb,
                                    const std::string& prep,
                                    const std::string& local,
                                    const std::string& remote) {
  return marginal_remote(jb, jb.prep_index(prep), jb.local_index(local),
                         jb.remote_index(remote));
}

void check_reference_shape(const JointBehavior& jb, const Behavior& reference) {
  const auto mismatch = [](const std::string& what) {
    throw ShapeError("reference behavior mismatch: " + what);
  };
  if (reference.preparations().size() != jb.preparations().size())
    mismatch("preparation count");
  for (std::size_t w = 0; w < jb.preparations().size(); ++w)
    if (reference.preparations()[w] != jb.preparations()[w])
      mismatch("preparation '" + jb.preparations()[w] + "'");
  if (reference.contexts().size() != jb.local_contexts().size())
    mismatch("local context count");
  for (std::size_t e = 0; e < jb.local_contexts().size(); ++e) {
    const auto& a = reference.contexts()[e];
    const auto& b = jb.local_contexts()[e];
    if (a.name != b.name) mismatch("context '" + b.name + "'");
    if (a.outcomes.labels != b.outcomes.labels)
      mismatch("outcomes of context '" + b.name + "'");
  }
}

SignalingReport signaling_measure_serial(const JointBehavior& jb,
                                         const Behavior* reference) {
  if (reference != nullptr) check_reference_shape(jb, *reference);
  SignalingReport out;
  for (std::size_t w = 0; w < jb.preparations().size(); ++w) {
    PrepSlot slot;
    scan_prep(jb, reference, w, slot);
    merge(out, slot);
  }
  return out;
}

SignalingReport signaling_measure(const JointBehavior& jb,
                                  const Behavior* reference) {
  if (reference != nullptr) check_reference_shape(jb, *reference);
  const std::size_t nw = jb.preparations().size();
  std::vector<PrepSlot> slots(nw);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(nw); ++w)
    scan_prep(jb, reference, static_cast<std::size_t>(w), slots[w]);
  SignalingReport out;
  for (std::size_t w = 0; w < nw; ++w) merge(out, slots[w]);
  return out;
}

double reevaluate(const JointBehavior& jb, const RemoteMarginalWitness& w) {
  const auto a = marginal_remote(jb, w.prep, w.local_ctx_a, w.remote_ctx);
  const auto b = marginal_remote(jb, w.prep, w.local_ctx_b, w.remote_ctx);
  return std::abs(a.at(w.remote_outcome) - b.at(w.remote_outcome));
}

double reevaluate(const JointBehavior& jb, const LocalMarginalWitness& w,
                  const Behavior* reference) {
  const auto a = marginal_local(jb, w.prep, w.local_ctx, w.remote_ctx_a);
  if (w.remote_ctx_b == kReference) {
    if (reference == nullptr)
      throw IndexError("witness compares against a reference behavior");
    return std::abs(a.at(w.local_outcome) -
                    reference->at(w.prep, w.local_ctx, w.local_outcome));
  }
  const auto b = marginal_local(jb, w.prep, w.local_ctx, w.remote_ctx_b);
  return std::abs(a.at(w.local_outcome) - b.at(w.local_outcome));
}

Conditioned condition(const JointBehavior& jb, std::size_t w, std::size_t d,
                      std::size_t j, double tau_sig, double tau_zero) {
  const std::size_t ne = jb.local_contexts().size();
  const std::size_t pd = jb.remote_contexts().at(d).outcomes.size();
  if (j >= pd) throw IndexError("remote outcome index out of range");

  // Conditioning probability per local context; must agree across contexts.
  std::vector<double> s(ne, 0.0);
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t pe = jb.local_contexts()[e].outcomes.size();
    auto block = jb.block(w, e, d);
    for (std::size_t i = 0; i < pe; ++i) s[e] += block[i * pd + j];
  }
  double dev = 0.0;
  std::size_t ea = 0, eb = 0;
  for (std::size_t x = 0; x < ne; ++x)
    for (std::size_t y = x + 1; y < ne; ++y) {
      const double v = std::abs(s[x] - s[y]);
      if (v > dev) {
        dev = v;
        ea = x;
        eb = y;
      }
    }
  if (dev > tau_sig) {
    SignalingReport rep;
    rep.sig_to_remote = dev;
    rep.to_remote = RemoteMarginalWitness{w, d, j, ea, eb, dev};
    std::ostringstream msg;
    msg << "conditioning probability differs across local contexts by " << dev;
    throw SignalingError(msg.str(), std::move(rep));
  }

  const double c = std::accumulate(s.begin(), s.end(), 0.0) /
                   static_cast<double>(ne);
  const double s_min = *std::min_element(s.begin(), s.end());
  if (c <= tau_zero || s_min <= tau_zero) {
    std::ostringstream msg;
    msg << "conditioning probability " << c << " is not positive";
    throw ConditioningError(msg.str());
  }

  // Each conditioned row is normalized by its own context sum so the result
  // is exactly normalized per context; the sums agree within tau_sig.
  std::vector<Context> contexts = jb.local_contexts();
  std::vector<double> table;
  std::size_t total = 0;
  for (std::size_t e = 0; e < ne; ++e)
    total += contexts[e].outcomes.size();
  table.resize(total, 0.0);
  std::size_t off = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t pe = contexts[e].outcomes.size();
    auto block = jb.block(w, e, d);
    for (std::size_t i = 0; i < pe; ++i)
      table[off + i] = block[i * pd + j] / s[e];
    off += pe;
  }
  Behavior cond({jb.preparations()[w]}, std::move(contexts), std::move(table));
  return Conditioned{c, std::move(cond)};
}

Conditioned condition(const JointBehavior& jb, const std::string& prep,
                      const std::string& remote, const std::string& outcome,
                      double tau_sig, double tau_zero) {
  const std::size_t d = jb.remote_index(remote);
  const std::size_t j =
      jb.remote_contexts()[d].outcomes.index_of(outcome);
  return condition(jb, jb.prep_index(prep), d, j, tau_sig, tau_zero);
}

double total_probability_check(const JointBehavior& jb, std::size_t w,
                               std::size_t e, std::size_t d, double tau_zero) {
  const std::size_t pe = jb.local_contexts().at(e).outcomes.size();
  const std::size_t pd = jb.remote_contexts().at(d).outcomes.size();
  auto block = jb.block(w, e, d);

  // Conditioning probabilities taken from this same context, so the sum
  // telescopes algebraically: sum_j c_j * (row_j / c_j) == sum_j row_j.
  std::vector<double> c(pd, 0.0);
  for (std::size_t i = 0; i < pe; ++i)
    for (std::size_t j = 0; j < pd; ++j) c[j] += block[i * pd + j];

  double worst = 0.0;
  const auto loc = marginal_local(jb, w, e, d);
  for (std::size_t i = 0; i < pe; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < pd; ++j) {
      if (c[j] <= tau_zero) {
        acc += block[i * pd + j];
      } else {
        acc += c[j] * (block[i * pd + j] / c[j]);
      }
    }
    worst = std::max(worst, std::abs(acc - loc[i]));
  }
  return worst;
}

PrepEquivalence equivalent_preparations(const Behavior& b, std::size_t w1,
                                        std::size_t w2, double tolerance) {
  if (w1 >= b.preparations().size() || w2 >= b.preparations().size())
    throw IndexError("preparation index out of range");
  double dev = 0.0;
  for (std::size_t e = 0; e < b.contexts().size(); ++e) {
    const std::size_t pe = b.contexts()[e].outcomes.size();
    for (std::size_t i = 0; i < pe; ++i)
      dev = std::max(dev, std::abs(b.at(w1, e, i) - b.at(w2, e, i)));
  }
  return PrepEquivalence{dev <= tolerance, dev};
}

std::optional<std::vector<std::size_t>> equivalent_observations(
    const Behavior& b, std::size_t e1, std::size_t e2, double tolerance) {
  if (e1 >= b.contexts().size() || e2 >= b.contexts().size())
    throw IndexError("context index out of range");
  const std::size_t n1 = b.contexts()[e1].outcomes.size();
  const std::size_t n2 = b.contexts()[e2].outcomes.size();
  if (n1 != n2) return std::nullopt;
  const std::size_t nw = b.preparations().size();

  // Profile of an outcome: its probability under every preparation.
  const auto close = [&](std::size_t i, std::size_t k) {
    for (std::size_t w = 0; w < nw; ++w)
      if (std::abs(b.at(w, e1, i) - b.at(w, e2, k)) > tolerance) return false;
    return true;
  };

  // Candidate targets in ascending label order so the returned permutation
  // is deterministic.
  std::vector<std::size_t> order(n2);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
    return b.contexts()[e2].outcomes.labels[a] <
           b.contexts()[e2].outcomes.labels[c];
  });

  std::vector<std::size_t> pi(n1, 0);
  std::vector<bool> used(n2, false);
  const auto backtrack = [&](auto&& self, std::size_t i) -> bool {
    if (i == n1) return true;
    for (std::size_t k : order) {
      if (used[k] || !close(i, k)) continue;
      pi[i] = k;
      used[k] = true;
      if (self(self, i + 1)) return true;
      used[k] = false;
    }
    return false;
  };
  if (!backtrack(backtrack, 0)) return std::nullopt;
  return pi;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NoSignalingCollapse:
      return "NoSignaling+Collapse";
    case Verdict::SignalsRemoteToLocal:
      return "SignalsRemoteToLocal";
    case Verdict::SignalsLocalToRemote:
      return "SignalsLocalToRemote";
    case Verdict::Both:
      return "Both";
  }
  return "?";
}

ExtensionDiagnosis diagnose_extension(const JointBehavior& jb,
                                      const Behavior& reference,
                                      double tau_sig, double tau_zero) {
  check_reference_shape(jb, reference);
  ExtensionDiagnosis out;
  out.report = signaling_measure(jb, &reference);
  const bool to_remote = out.report.sig_to_remote > tau_sig;
  const bool to_local = out.report.sig_to_local > tau_sig;
  if (to_remote && to_local) {
    out.verdict = Verdict::Both;
  } else if (to_remote) {
    out.verdict = Verdict::SignalsLocalToRemote;
  } else if (to_local) {
    out.verdict = Verdict::SignalsRemoteToLocal;
  } else {
    out.verdict = Verdict::NoSignalingCollapse;
  }

  if (!to_remote) {
    std::vector<ConditionedState> states;
    for (std::size_t w = 0; w < jb.preparations().size(); ++w) {
      for (std::size_t d = 0; d < jb.remote_contexts().size(); ++d) {
        const std::size_t pd = jb.remote_contexts()[d].outcomes.size();
        for (std::size_t j = 0; j < pd; ++j) {
          try {
            Conditioned c = condition(jb, w, d, j, tau_sig, tau_zero);
            states.push_back(
                ConditionedState{w, d, j, c.c, std::move(c.behavior)});
          } catch (const ConditioningError&) {
            // Outcome has (numerically) zero probability; skip it.
          }
        }
      }
    }
    out.conditioned = std::move(states);
  }
  return out;
}

}  // namespace nosig
