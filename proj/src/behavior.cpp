// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#include "nosig/behavior.hpp"

#include <cmath>
#include <numeric>
#include <unordered_set>

namespace nosig {

namespace {

void check_labels_unique(const OutcomeSet& outcomes, const std::string& where) {
  if (outcomes.labels.empty())
    throw ShapeError("outcome set of " + where + " is empty");
  std::unordered_set<std::string> seen;
  for (const auto& l : outcomes.labels)
    if (!seen.insert(l).second)
      throw ShapeError("duplicate outcome label '" + l + "' in " + where);
}

void check_names_unique(const std::vector<std::string>& names,
                        const std::string& what) {
  if (names.empty()) throw ShapeError("no " + what + " declared");
  std::unordered_set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second)
      throw ShapeError("duplicate " + what + " name '" + n + "'");
}

std::vector<std::string> context_names(const std::vector<Context>& cs) {
  std::vector<std::string> names;
  names.reserve(cs.size());
  for (const auto& c : cs) names.push_back(c.name);
  return names;
}

std::size_t lookup(const std::vector<std::string>& names,
                   const std::string& name, const std::string& what) {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return k;
  throw IndexError("unknown " + what + " '" + name + "'");
}

void clamp_small_negatives(std::vector<double>& table, double clamp_tol) {
  for (double& v : table)
    if (v < 0.0 && v >= -clamp_tol) v = 0.0;
}

}  // namespace

std::size_t OutcomeSet::index_of(const std::string& label) const {
  return lookup(labels, label, "outcome");
}

std::size_t find_context(const std::vector<Context>& contexts,
                         const std::string& name) {
  for (std::size_t k = 0; k < contexts.size(); ++k)
    if (contexts[k].name == name) return k;
  throw IndexError("unknown context '" + name + "'");
}

Behavior::Behavior(std::vector<std::string> preparations,
                   std::vector<Context> contexts, std::vector<double> table,
                   double clamp_tol)
    : preps_(std::move(preparations)),
      contexts_(std::move(contexts)),
      table_(std::move(table)) {
  check_names_unique(preps_, "preparation");
  check_names_unique(context_names(contexts_), "context");
  offsets_.reserve(contexts_.size());
  for (const auto& c : contexts_) {
    check_labels_unique(c.outcomes, "context '" + c.name + "'");
    offsets_.push_back(slab_);
    slab_ += c.outcomes.size();
  }
  if (table_.size() != preps_.size() * slab_)
    throw ShapeError("behavior table has " + std::to_string(table_.size()) +
                     " entries, expected " +
                     std::to_string(preps_.size() * slab_));
  clamp_small_negatives(table_, clamp_tol);
}

std::size_t Behavior::prep_index(const std::string& name) const {
  return lookup(preps_, name, "preparation");
}

std::size_t Behavior::context_index(const std::string& name) const {
  return find_context(contexts_, name);
}

JointBehavior::JointBehavior(std::vector<std::string> preparations,
                             std::vector<Context> local_contexts,
                             std::vector<Context> remote_contexts,
                             std::vector<double> table, double clamp_tol)
    : preps_(std::move(preparations)),
      local_(std::move(local_contexts)),
      remote_(std::move(remote_contexts)),
      table_(std::move(table)) {
  check_names_unique(preps_, "preparation");
  check_names_unique(context_names(local_), "local context");
  check_names_unique(context_names(remote_), "remote context");
  for (const auto& c : local_)
    check_labels_unique(c.outcomes, "local context '" + c.name + "'");
  for (const auto& c : remote_)
    check_labels_unique(c.outcomes, "remote context '" + c.name + "'");
  offsets_.reserve(local_.size() * remote_.size());
  for (const auto& e : local_)
    for (const auto& d : remote_) {
      offsets_.push_back(slab_);
      slab_ += e.outcomes.size() * d.outcomes.size();
    }
  if (table_.size() != preps_.size() * slab_)
    throw ShapeError("joint table has " + std::to_string(table_.size()) +
                     " entries, expected " +
                     std::to_string(preps_.size() * slab_));
  clamp_small_negatives(table_, clamp_tol);
}

std::size_t JointBehavior::prep_index(const std::string& name) const {
  return lookup(preps_, name, "preparation");
}

std::size_t JointBehavior::local_index(const std::string& name) const {
  return find_context(local_, name);
}

std::size_t JointBehavior::remote_index(const std::string& name) const {
  return find_context(remote_, name);
}

JointBehavior JointBehavior::with_table(std::vector<double> table) const {
  return JointBehavior(preps_, local_, remote_, std::move(table));
}

namespace {

void check_row(std::span<const double> row, std::vector<std::size_t> index,
               double tau, ValidationReport& report) {
  double sum = 0.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    sum += row[k];
    if (row[k] < 0.0) {
      auto idx = index;
      idx.push_back(k);
      report.push_back({"negative-entry", std::move(idx), -row[k]});
    }
  }
  if (std::abs(sum - 1.0) > tau)
    report.push_back({"row-sum", std::move(index), std::abs(sum - 1.0)});
}

}  // namespace

ValidationReport validate(const Behavior& b, double tau) {
  ValidationReport report;
  for (std::size_t w = 0; w < b.prep_count(); ++w)
    for (std::size_t e = 0; e < b.context_count(); ++e)
      check_row(b.row(w, e), {w, e}, tau, report);
  return report;
}

ValidationReport validate(const JointBehavior& jb, double tau) {
  ValidationReport report;
  for (std::size_t w = 0; w < jb.prep_count(); ++w)
    for (std::size_t e = 0; e < jb.local_count(); ++e)
      for (std::size_t d = 0; d < jb.remote_count(); ++d)
        check_row(jb.block(w, e, d), {w, e, d}, tau, report);
  return report;
}

Weight physical_weight(const Behavior& b, std::size_t prep) {
  Weight w;
  w.contexts = b.contexts();
  w.values.reserve(b.context_count());
  double total = 0.0;
  for (std::size_t e = 0; e < b.context_count(); ++e) {
    auto row = b.row(prep, e);
    w.values.emplace_back(row.begin(), row.end());
    total += std::accumulate(row.begin(), row.end(), 0.0);
  }
  w.total = b.context_count() ? total / b.context_count() : 0.0;
  return w;
}

ValidationReport validate(const Weight& w, double tau) {
  ValidationReport report;
  if (w.values.size() != w.contexts.size()) {
    report.push_back({"shape", {}, 0.0});
    return report;
  }
  for (std::size_t e = 0; e < w.values.size(); ++e) {
    double sum = 0.0;
    for (std::size_t i = 0; i < w.values[e].size(); ++i) {
      sum += w.values[e][i];
      if (w.values[e][i] < 0.0)
        report.push_back({"negative-entry", {e, i}, -w.values[e][i]});
    }
    if (std::abs(sum - w.total) > tau)
      report.push_back({"context-sum", {e}, std::abs(sum - w.total)});
  }
  return report;
}

}  // namespace nosig
