// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#include "nosig/json_io.hpp"

#include <fstream>

namespace nosig {
namespace {

const json& need(const json& j, const std::string& key,
                 const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double need_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  return j.get<double>();
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ParseError(where + ": expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<Context> contexts_from_json(const json& j,
                                        const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty array of contexts");
  std::vector<Context> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    const auto& c = j[k];
    Context ctx;
    ctx.name = need(c, "name", at).get<std::string>();
    ctx.outcomes.labels = string_list(need(c, "outcomes", at), at + ".outcomes");
    out.push_back(std::move(ctx));
  }
  return out;
}

json contexts_to_json(const std::vector<Context>& contexts) {
  json out = json::array();
  for (const auto& c : contexts)
    out.push_back({{"name", c.name}, {"outcomes", c.outcomes.labels}});
  return out;
}

std::string ctx_name(const std::vector<Context>& contexts, std::size_t k) {
  return contexts.at(k).name;
}

std::string out_name(const std::vector<Context>& contexts, std::size_t ctx,
                     std::size_t k) {
  return contexts.at(ctx).outcomes.labels.at(k);
}

json witness_to_json(const std::optional<RemoteMarginalWitness>& w,
                     const JointBehavior& jb) {
  if (!w) return nullptr;
  return json{{"prep", jb.preparations().at(w->prep)},
              {"remote_context", ctx_name(jb.remote_contexts(), w->remote_ctx)},
              {"remote_outcome",
               out_name(jb.remote_contexts(), w->remote_ctx, w->remote_outcome)},
              {"local_context_a", ctx_name(jb.local_contexts(), w->local_ctx_a)},
              {"local_context_b", ctx_name(jb.local_contexts(), w->local_ctx_b)},
              {"value", w->value}};
}

json witness_to_json(const std::optional<LocalMarginalWitness>& w,
                     const JointBehavior& jb) {
  if (!w) return nullptr;
  json out{{"prep", jb.preparations().at(w->prep)},
           {"local_context", ctx_name(jb.local_contexts(), w->local_ctx)},
           {"local_outcome",
            out_name(jb.local_contexts(), w->local_ctx, w->local_outcome)},
           {"remote_context_a", ctx_name(jb.remote_contexts(), w->remote_ctx_a)},
           {"remote_context_b", nullptr},
           {"value", w->value}};
  out["remote_context_b"] =
      w->remote_ctx_b == kReference
          ? json("reference")
          : json(ctx_name(jb.remote_contexts(), w->remote_ctx_b));
  return out;
}

}  // namespace

std::string classify_json(const json& j) {
  if (!j.is_object()) throw ParseError("top level: expected an object");
  if (j.contains("local_contexts") && j.contains("remote_contexts"))
    return "joint";
  if (j.contains("contexts")) return "behavior";
  if (j.contains("dims") && j.contains("state")) return "setup";
  throw ParseError(
      "top level: expected a behavior (contexts), a joint behavior "
      "(local_contexts/remote_contexts), or a setup (dims/state)");
}

json to_json(const Behavior& b) {
  json table = json::array();
  for (std::size_t w = 0; w < b.prep_count(); ++w) {
    json slab = json::array();
    for (std::size_t e = 0; e < b.context_count(); ++e) {
      json row = json::array();
      for (double v : b.row(w, e)) row.push_back(v);
      slab.push_back(std::move(row));
    }
    table.push_back(std::move(slab));
  }
  return json{{"preparations", b.preparations()},
              {"contexts", contexts_to_json(b.contexts())},
              {"table", std::move(table)}};
}

json to_json(const JointBehavior& jb) {
  json table = json::array();
  for (std::size_t w = 0; w < jb.prep_count(); ++w) {
    json slab = json::array();
    for (std::size_t e = 0; e < jb.local_count(); ++e) {
      json per_local = json::array();
      for (std::size_t d = 0; d < jb.remote_count(); ++d) {
        const std::size_t pd = jb.remote_contexts()[d].outcomes.size();
        const std::size_t pe = jb.local_contexts()[e].outcomes.size();
        json block = json::array();
        for (std::size_t i = 0; i < pe; ++i) {
          json row = json::array();
          for (std::size_t k = 0; k < pd; ++k)
            row.push_back(jb.at(w, e, d, i, k));
          block.push_back(std::move(row));
        }
        per_local.push_back(std::move(block));
      }
      slab.push_back(std::move(per_local));
    }
    table.push_back(std::move(slab));
  }
  return json{{"preparations", jb.preparations()},
              {"local_contexts", contexts_to_json(jb.local_contexts())},
              {"remote_contexts", contexts_to_json(jb.remote_contexts())},
              {"table", std::move(table)}};
}

Behavior behavior_from_json(const json& j) {
  const auto preps = string_list(need(j, "preparations", "behavior"),
                                 "preparations");
  auto contexts = contexts_from_json(need(j, "contexts", "behavior"),
                                     "contexts");
  const json& table = need(j, "table", "behavior");
  if (!table.is_array() || table.size() != preps.size())
    throw ParseError("table: expected one slab per preparation");
  std::vector<double> flat;
  for (std::size_t w = 0; w < preps.size(); ++w) {
    const auto& slab = table[w];
    if (!slab.is_array() || slab.size() != contexts.size())
      throw ParseError("table[" + std::to_string(w) +
                       "]: expected one row per context");
    for (std::size_t e = 0; e < contexts.size(); ++e) {
      const auto& row = slab[e];
      const std::string at =
          "table[" + std::to_string(w) + "][" + std::to_string(e) + "]";
      if (!row.is_array() || row.size() != contexts[e].outcomes.size())
        throw ParseError(at + ": expected one entry per outcome");
      for (std::size_t i = 0; i < row.size(); ++i)
        flat.push_back(need_number(row[i], at));
    }
  }
  return Behavior(preps, std::move(contexts), std::move(flat));
}

JointBehavior joint_from_json(const json& j) {
  const auto preps = string_list(need(j, "preparations", "joint behavior"),
                                 "preparations");
  auto local = contexts_from_json(need(j, "local_contexts", "joint behavior"),
                                  "local_contexts");
  auto remote = contexts_from_json(
      need(j, "remote_contexts", "joint behavior"), "remote_contexts");
  const json& table = need(j, "table", "joint behavior");
  if (!table.is_array() || table.size() != preps.size())
    throw ParseError("table: expected one slab per preparation");
  std::vector<double> flat;
  for (std::size_t w = 0; w < preps.size(); ++w) {
    const auto& slab = table[w];
    if (!slab.is_array() || slab.size() != local.size())
      throw ParseError("table[" + std::to_string(w) +
                       "]: expected one entry per local context");
    for (std::size_t e = 0; e < local.size(); ++e) {
      const auto& per_local = slab[e];
      if (!per_local.is_array() || per_local.size() != remote.size())
        throw ParseError("table[" + std::to_string(w) + "][" +
                         std::to_string(e) +
                         "]: expected one block per remote context");
      for (std::size_t d = 0; d < remote.size(); ++d) {
        const auto& block = per_local[d];
        const std::string at = "table[" + std::to_string(w) + "][" +
                               std::to_string(e) + "][" + std::to_string(d) +
                               "]";
        if (!block.is_array() || block.size() != local[e].outcomes.size())
          throw ParseError(at + ": expected one row per local outcome");
        for (std::size_t i = 0; i < block.size(); ++i) {
          const auto& row = block[i];
          if (!row.is_array() || row.size() != remote[d].outcomes.size())
            throw ParseError(at + "[" + std::to_string(i) +
                             "]: expected one entry per remote outcome");
          for (std::size_t k = 0; k < row.size(); ++k)
            flat.push_back(need_number(row[k], at));
        }
      }
    }
  }
  return JointBehavior(preps, std::move(local), std::move(remote),
                       std::move(flat));
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Behavior load_behavior(const std::string& path) {
  try {
    return behavior_from_json(load_json(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

JointBehavior load_joint(const std::string& path) {
  try {
    return joint_from_json(load_json(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

json to_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXcd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty array of rows");
  const std::size_t rows = j.size();
  const auto& first = j[0];
  if (!first.is_array() || first.empty())
    throw ParseError(where + ": expected non-empty rows");
  const std::size_t cols = first.size();
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows),
                       static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    const std::string at = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != cols)
      throw ParseError(at + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& entry = row[c];
      if (!entry.is_array() || entry.size() != 2)
        throw ParseError(at + "[" + std::to_string(c) +
                         "]: expected an [re, im] pair");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {
          need_number(entry[0], at), need_number(entry[1], at)};
    }
  }
  return out;
}

BipartiteSetup QuantumSetup::as_bipartite() const {
  if (!bipartite())
    throw ShapeError("setup declares a single system, not a bipartite one");
  BipartiteSetup s;
  s.dim_a = dims[0];
  s.dim_b = dims[1];
  s.state = state;
  s.local_measurements = local_measurements;
  s.remote_measurements = remote_measurements;
  return s;
}

const ProjectiveMeasurement& QuantumSetup::local(
    const std::string& name) const {
  for (const auto& m : local_measurements)
    if (m.name == name) return m;
  throw IndexError("unknown measurement '" + name + "'");
}

const ProjectiveMeasurement& QuantumSetup::remote(
    const std::string& name) const {
  for (const auto& m : remote_measurements)
    if (m.name == name) return m;
  throw IndexError("unknown measurement '" + name + "'");
}

namespace {

std::vector<ProjectiveMeasurement> measurements_from_json(
    const json& j, const std::string& where) {
  if (!j.is_array())
    throw ParseError(where + ": expected an array of measurements");
  std::vector<ProjectiveMeasurement> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    const auto& m = j[k];
    ProjectiveMeasurement pm;
    pm.name = need(m, "name", at).get<std::string>();
    const auto& projs = need(m, "projectors", at);
    if (!projs.is_array() || projs.empty())
      throw ParseError(at + ": expected a non-empty projector list");
    for (std::size_t p = 0; p < projs.size(); ++p)
      pm.projectors.push_back(matrix_from_json(
          projs[p], at + ".projectors[" + std::to_string(p) + "]"));
    if (m.contains("outcomes"))
      pm.outcomes.labels = string_list(m.at("outcomes"), at + ".outcomes");
    else
      for (std::size_t p = 0; p < pm.projectors.size(); ++p)
        pm.outcomes.labels.push_back(std::to_string(p));
    if (pm.outcomes.size() != pm.projectors.size())
      throw ParseError(at + ": outcome labels do not match projectors");
    out.push_back(std::move(pm));
  }
  return out;
}

}  // namespace

QuantumSetup setup_from_json(const json& j) {
  QuantumSetup s;
  const auto& dims = need(j, "dims", "setup");
  if (!dims.is_array() || dims.empty() || dims.size() > 2)
    throw ParseError("dims: expected [d] or [d_A, d_B]");
  for (const auto& d : dims) {
    if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0)
      throw ParseError("dims: expected positive integers");
    s.dims.push_back(d.get<std::size_t>());
  }
  s.state.rho = matrix_from_json(need(j, "state", "setup"), "state");
  s.local_measurements = measurements_from_json(
      need(j, "local_measurements", "setup"), "local_measurements");
  s.remote_measurements = measurements_from_json(
      need(j, "remote_measurements", "setup"), "remote_measurements");
  if (j.contains("witness")) {
    const auto& w = j.at("witness");
    WitnessSpec spec;
    spec.a = need(w, "a", "witness").get<std::string>();
    spec.a_prime = need(w, "a_prime", "witness").get<std::string>();
    spec.b = need(w, "b", "witness").get<std::string>();
    const auto& shared = need(w, "shared_outcome", "witness");
    if (!shared.is_number_unsigned())
      throw ParseError("witness.shared_outcome: expected an index");
    spec.shared_outcome = shared.get<std::size_t>();
    if (w.contains("seed")) {
      if (!w.at("seed").is_number_unsigned())
        throw ParseError("witness.seed: expected an unsigned integer");
      spec.seed = w.at("seed").get<std::uint64_t>();
    }
    s.witness = std::move(spec);
  }
  return s;
}

QuantumSetup load_setup(const std::string& path) {
  try {
    return setup_from_json(load_json(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

json to_json(const QuantumSetup& s) {
  json out;
  out["dims"] = s.dims;
  out["state"] = to_json(s.state.rho);
  const auto menus = [](const std::vector<ProjectiveMeasurement>& ms) {
    json arr = json::array();
    for (const auto& m : ms) {
      json projs = json::array();
      for (const auto& p : m.projectors) projs.push_back(to_json(p));
      arr.push_back({{"name", m.name},
                     {"outcomes", m.outcomes.labels},
                     {"projectors", std::move(projs)}});
    }
    return arr;
  };
  out["local_measurements"] = menus(s.local_measurements);
  out["remote_measurements"] = menus(s.remote_measurements);
  if (s.witness) {
    out["witness"] = {{"a", s.witness->a},
                      {"a_prime", s.witness->a_prime},
                      {"b", s.witness->b},
                      {"shared_outcome", s.witness->shared_outcome},
                      {"seed", s.witness->seed}};
  }
  return out;
}

ValidationReport validate(const QuantumSetup& s, double tau) {
  if (s.bipartite()) return validate_setup(s.as_bipartite(), tau);
  ValidationReport report;
  const std::size_t d = s.dims.at(0);
  if (s.state.dim() != d) {
    report.push_back({"shape", {}, static_cast<double>(s.state.dim())});
    return report;
  }
  auto merge = [&report](ValidationReport sub, std::size_t tag) {
    for (auto& v : sub) {
      v.index.insert(v.index.begin(), tag);
      report.push_back(std::move(v));
    }
  };
  merge(validate_state(s.state, tau), 0);
  for (std::size_t k = 0; k < s.local_measurements.size(); ++k) {
    if (s.local_measurements[k].dim() != d) {
      report.push_back(
          {"shape", {1, k},
           static_cast<double>(s.local_measurements[k].dim())});
      continue;
    }
    merge(validate_measurement(s.local_measurements[k], tau), 1);
  }
  for (std::size_t k = 0; k < s.remote_measurements.size(); ++k) {
    if (s.remote_measurements[k].dim() != d) {
      report.push_back(
          {"shape", {2, k},
           static_cast<double>(s.remote_measurements[k].dim())});
      continue;
    }
    merge(validate_measurement(s.remote_measurements[k], tau), 2);
  }
  return report;
}

json to_json(const ValidationReport& report) {
  json violations = json::array();
  for (const auto& v : report)
    violations.push_back(
        {{"kind", v.kind}, {"index", v.index}, {"magnitude", v.magnitude}});
  return json{{"valid", report.empty()}, {"violations", std::move(violations)}};
}

json to_json(const SignalingReport& report, const JointBehavior& jb,
             const Behavior* reference) {
  (void)reference;
  return json{{"sig_to_remote", report.sig_to_remote},
              {"sig_to_local", report.sig_to_local},
              {"to_remote", witness_to_json(report.to_remote, jb)},
              {"to_local", witness_to_json(report.to_local, jb)}};
}

json to_json(const ExtensionDiagnosis& diagnosis, const JointBehavior& jb,
             const Behavior* reference) {
  json out{{"verdict", to_string(diagnosis.verdict)},
           {"report", to_json(diagnosis.report, jb, reference)},
           {"conditioned", nullptr}};
  if (diagnosis.conditioned) {
    json states = json::array();
    for (const auto& s : *diagnosis.conditioned) {
      states.push_back(
          {{"prep", jb.preparations().at(s.prep)},
           {"remote_context", ctx_name(jb.remote_contexts(), s.remote_ctx)},
           {"outcome",
            out_name(jb.remote_contexts(), s.remote_ctx, s.remote_outcome)},
           {"c", s.c},
           {"behavior", to_json(s.behavior)}});
    }
    out["conditioned"] = std::move(states);
  }
  return out;
}

json to_json(const StabilityResult& result) {
  return json{{"trials", result.trials},
              {"seed", result.seed},
              {"tolerance", result.tolerance},
              {"signaling_fraction", result.signaling_fraction},
              {"min_sig", result.min_sig},
              {"max_sig", result.max_sig},
              {"histogram", result.histogram},
              {"density", {{"attempted", result.density_attempted},
                           {"succeeded", result.density_succeeded}}},
              {"openness", {{"probes", result.openness_probes_run},
                            {"failures", result.openness_failures}}}};
}

void write_trials_csv(std::ostream& out, const StabilityResult& result) {
  out << "trial,sig_to_remote,sig_to_local\n";
  for (std::size_t t = 0; t < result.per_trial.size(); ++t) {
    out << t << ',' << json(result.per_trial[t].sig_to_remote).dump() << ','
        << json(result.per_trial[t].sig_to_local).dump() << '\n';
  }
}

}  // namespace nosig
