// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nosig/errors.hpp"

namespace nosig {

// Default tolerances. Double-precision identities hold to ~1e-13; these keep
// one safety decade. The CLI can override them per invocation.
namespace tol {
inline constexpr double norm = 1e-9;   // row/block normalization
inline constexpr double sig = 1e-9;    // no-signaling equalities on exact data
inline constexpr double zero = 1e-12;  // zero-probability conditioning guard
}  // namespace tol

/// Ordered set of distinct outcome labels ("pointer positions").
struct OutcomeSet {
  std::vector<std::string> labels;

  std::size_t size() const { return labels.size(); }
  /// Throws IndexError naming the label if it is not present.
  std::size_t index_of(const std::string& label) const;
};

/// A named observation context together with its outcome set.
struct Context {
  std::string name;
  OutcomeSet outcomes;
};

/// Position of an unknown or invalid value found by validation.
struct Violation {
  std::string kind;
  std::vector<std::size_t> index;
  double magnitude = 0.0;
};

using ValidationReport = std::vector<Violation>;

/// Index of the context named `name`; throws IndexError if absent.
std::size_t find_context(const std::vector<Context>& contexts,
                         const std::string& name);

/// Single-region behavior: a probability table P(preparation, context,
/// outcome). Immutable after construction; entries within `clamp_tol` below
/// zero are clamped to zero on load.
class Behavior {
public:
  Behavior(std::vector<std::string> preparations, std::vector<Context> contexts,
           std::vector<double> table, double clamp_tol = tol::norm);

  std::size_t prep_count() const { return preps_.size(); }
  std::size_t context_count() const { return contexts_.size(); }
  const std::vector<std::string>& preparations() const { return preps_; }
  const std::vector<Context>& contexts() const { return contexts_; }
  const Context& context(std::size_t e) const { return contexts_[e]; }

  std::size_t prep_index(const std::string& name) const;
  std::size_t context_index(const std::string& name) const;

  double at(std::size_t w, std::size_t e, std::size_t i) const {
    return table_[w * slab_ + offsets_[e] + i];
  }
  std::span<const double> row(std::size_t w, std::size_t e) const {
    return {table_.data() + w * slab_ + offsets_[e],
            contexts_[e].outcomes.size()};
  }

  const std::vector<double>& table() const { return table_; }
  /// Entries per preparation.
  std::size_t slab_size() const { return slab_; }

private:
  std::vector<std::string> preps_;
  std::vector<Context> contexts_;
  std::vector<std::size_t> offsets_;  // per-context offset within a slab
  std::size_t slab_ = 0;
  std::vector<double> table_;
};

/// Two-region behavior: P(preparation, local context, remote context, local
/// outcome, remote outcome). Blocks are stored row-major with the local
/// outcome as the row index.
class JointBehavior {
public:
  JointBehavior(std::vector<std::string> preparations,
                std::vector<Context> local_contexts,
                std::vector<Context> remote_contexts, std::vector<double> table,
                double clamp_tol = tol::norm);

  std::size_t prep_count() const { return preps_.size(); }
  std::size_t local_count() const { return local_.size(); }
  std::size_t remote_count() const { return remote_.size(); }
  const std::vector<std::string>& preparations() const { return preps_; }
  const std::vector<Context>& local_contexts() const { return local_; }
  const std::vector<Context>& remote_contexts() const { return remote_; }

  std::size_t prep_index(const std::string& name) const;
  std::size_t local_index(const std::string& name) const;
  std::size_t remote_index(const std::string& name) const;

  double at(std::size_t w, std::size_t e, std::size_t d, std::size_t i,
            std::size_t j) const {
    return table_[block_offset(w, e, d) + i * remote_[d].outcomes.size() + j];
  }
  std::span<const double> block(std::size_t w, std::size_t e,
                                std::size_t d) const {
    return {table_.data() + block_offset(w, e, d), block_size(e, d)};
  }
  std::size_t block_offset(std::size_t w, std::size_t e, std::size_t d) const {
    return w * slab_ + offsets_[e * remote_.size() + d];
  }
  std::size_t block_size(std::size_t e, std::size_t d) const {
    return local_[e].outcomes.size() * remote_[d].outcomes.size();
  }

  const std::vector<double>& table() const { return table_; }
  std::size_t slab_size() const { return slab_; }

  /// Same structure, new values. Used by perturbation and projection.
  JointBehavior with_table(std::vector<double> table) const;

private:
  std::vector<std::string> preps_;
  std::vector<Context> local_;
  std::vector<Context> remote_;
  std::vector<std::size_t> offsets_;  // per (local, remote) pair within a slab
  std::size_t slab_ = 0;
  std::vector<double> table_;
};

/// Reports every normalization / non-negativity violation at tolerance `tau`.
/// Never throws; an empty report means the invariants hold.
ValidationReport validate(const Behavior& b, double tau = tol::norm);
ValidationReport validate(const JointBehavior& jb, double tau = tol::norm);

/// Outcome weights per context; a weight's per-context sums agree with
/// `total`, and it is normalized when total == 1.
struct Weight {
  std::vector<Context> contexts;
  std::vector<std::vector<double>> values;  // values[context][outcome]
  double total = 0.0;

  bool normalized(double tau = tol::norm) const {
    return std::abs(total - 1.0) <= tau;
  }
};

/// The physical weight w_W determined by a preparation of `b`.
Weight physical_weight(const Behavior& b, std::size_t prep);

/// Checks non-negativity and context-independence of the sums.
ValidationReport validate(const Weight& w, double tau = tol::norm);

}  // namespace nosig
