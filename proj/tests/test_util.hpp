// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "nosig/behavior.hpp"
#include "nosig/theory_space.hpp"

namespace nosig::testutil {

inline Context ctx(const std::string& name, std::size_t n) {
  Context c;
  c.name = name;
  for (std::size_t k = 0; k < n; ++k)
    c.outcomes.labels.push_back(std::to_string(k));
  return c;
}

/// PR box: P(a, b | x, y) = 1/2 when a xor b = x and y, else 0.
inline JointBehavior pr_box() {
  std::vector<double> table;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
          table.push_back((a ^ b) == (x & y) ? 0.5 : 0.0);
  return JointBehavior({"W0"}, {ctx("x0", 2), ctx("x1", 2)},
                       {ctx("y0", 2), ctx("y1", 2)}, std::move(table));
}

/// Copy box: one remote context whose outcome deterministically copies the
/// local setting; the local outcome is an independent fair coin.
inline JointBehavior copy_box() {
  std::vector<double> table;
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        table.push_back(b == x ? 0.5 : 0.0);
  return JointBehavior({"W0"}, {ctx("x0", 2), ctx("x1", 2)}, {ctx("y0", 2)},
                       std::move(table));
}

/// Product table p_i * q_j in every block.
inline JointBehavior product_box(const std::vector<double>& p,
                                 const std::vector<double>& q) {
  std::vector<double> table;
  for (std::size_t e = 0; e < 2; ++e)
    for (std::size_t d = 0; d < 2; ++d)
      for (double pi : p)
        for (double qj : q) table.push_back(pi * qj);
  return JointBehavior({"W0"}, {ctx("x0", p.size()), ctx("x1", p.size())},
                       {ctx("y0", q.size()), ctx("y1", q.size())},
                       std::move(table));
}

/// Uniform single-region reference matching a joint behavior's local side.
inline Behavior uniform_reference(const JointBehavior& jb) {
  std::vector<double> table;
  for (std::size_t w = 0; w < jb.prep_count(); ++w)
    for (const auto& c : jb.local_contexts())
      for (std::size_t i = 0; i < c.outcomes.size(); ++i)
        table.push_back(1.0 / static_cast<double>(c.outcomes.size()));
  return Behavior(jb.preparations(), jb.local_contexts(), std::move(table));
}

}  // namespace nosig::testutil
