// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "nosig/behavior.hpp"
#include "nosig/quantum.hpp"
#include "nosig/signaling.hpp"
#include "nosig/theory_space.hpp"

namespace nosig {

// Insertion-ordered JSON keeps output key order fixed, which together with
// shortest-round-trip number formatting makes serialization byte-stable.
using json = nlohmann::ordered_json;

/// File kind sniffing: "behavior" (single region), "joint", "setup".
std::string classify_json(const json& j);

json to_json(const Behavior& b);
json to_json(const JointBehavior& jb);
Behavior behavior_from_json(const json& j);
JointBehavior joint_from_json(const json& j);

/// Parse a file; ParseError carries the path and parser location.
json load_json(const std::string& path);
Behavior load_behavior(const std::string& path);
JointBehavior load_joint(const std::string& path);

/// Complex matrix as nested arrays of [re, im] pairs.
json to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const json& j, const std::string& where);

/// Optional witness block of a setup file: measurement names and the shared
/// outcome of the two first-measurement menus, plus the search seed that
/// produced the fixture.
struct WitnessSpec {
  std::string a;
  std::string a_prime;
  std::string b;
  std::size_t shared_outcome = 0;
  std::uint64_t seed = 0;
};

/// Parsed quantum setup file. dims has one entry (single system measured in
/// sequence) or two (bipartite; local factor first). For a single system
/// the two menu lists hold the first and second measurements respectively.
struct QuantumSetup {
  std::vector<std::size_t> dims;
  DensityMatrix state;
  std::vector<ProjectiveMeasurement> local_measurements;
  std::vector<ProjectiveMeasurement> remote_measurements;
  std::optional<WitnessSpec> witness;

  bool bipartite() const { return dims.size() == 2; }
  BipartiteSetup as_bipartite() const;
  const ProjectiveMeasurement& local(const std::string& name) const;
  const ProjectiveMeasurement& remote(const std::string& name) const;
};

QuantumSetup setup_from_json(const json& j);
QuantumSetup load_setup(const std::string& path);
json to_json(const QuantumSetup& s);

/// State, every measurement, and dimensional consistency; for bipartite
/// setups this is validate_setup on the assembled BipartiteSetup.
ValidationReport validate(const QuantumSetup& s, double tau = qtol::matrix);

json to_json(const ValidationReport& report);
json to_json(const SignalingReport& report, const JointBehavior& jb,
             const Behavior* reference = nullptr);
json to_json(const ExtensionDiagnosis& diagnosis, const JointBehavior& jb,
             const Behavior* reference = nullptr);
json to_json(const StabilityResult& result);

/// One row per trial: "trial,sig_to_remote,sig_to_local".
void write_trials_csv(std::ostream& out, const StabilityResult& result);

}  // namespace nosig
