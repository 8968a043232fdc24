// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#include "nosig/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "nosig/json_io.hpp"
#include "nosig/quantum.hpp"
#include "nosig/rng.hpp"
#include "nosig/signaling.hpp"
#include "nosig/theory_space.hpp"

namespace nosig::cli {
namespace {

struct Tolerances {
  double norm = tol::norm;
  double sig = tol::sig;
  double zero = tol::zero;
};

/// Environment overrides, read once per invocation. A malformed value is a
/// usage error, not a silent fallback.
Tolerances env_tolerances() {
  Tolerances t;
  const auto read = [](const char* name, double& slot) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return;
    char* end = nullptr;
    const double parsed = std::strtod(v, &end);
    if (end == v || *end != '\0' || !(parsed > 0.0))
      throw CLI::ValidationError(std::string(name) +
                                 ": expected a positive number, got '" + v +
                                 "'");
    slot = parsed;
  };
  read("NOSIG_TAU_NORM", t.norm);
  read("NOSIG_TAU_SIG", t.sig);
  read("NOSIG_TAU_ZERO", t.zero);
  return t;
}

void emit(const json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw nosig::Error("cannot write '" + out_path + "'");
  f << j.dump(2) << '\n';
}

std::pair<std::string, std::string> split_pair(const std::string& text,
                                               const std::string& what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 == text.size())
    throw CLI::ValidationError(what + ": expected 'first,second', got '" +
                               text + "'");
  return {text.substr(0, comma), text.substr(comma + 1)};
}

/// Loads a joint behavior and fails (exit 1) when its table is invalid.
JointBehavior load_valid_joint(const std::string& path, double tau_norm) {
  JointBehavior jb = load_joint(path);
  const auto report = validate(jb, tau_norm);
  if (!report.empty())
    throw nosig::Error("'" + path + "' fails validation: " +
                       to_json(report)["violations"].dump());
  return jb;
}

Behavior load_valid_behavior(const std::string& path, double tau_norm) {
  Behavior b = load_behavior(path);
  const auto report = validate(b, tau_norm);
  if (!report.empty())
    throw nosig::Error("'" + path + "' fails validation: " +
                       to_json(report)["violations"].dump());
  return b;
}

QuantumSetup load_valid_setup(const std::string& path) {
  QuantumSetup s = load_setup(path);
  require_clean(validate(s), "setup '" + path + "'");
  return s;
}

/// The sequential-measurement commands act on one system; a bipartite setup
/// belongs to `qm behavior`.
void require_single_system(const QuantumSetup& s) {
  if (s.bipartite())
    throw ShapeError(
        "setup declares a bipartite system; sequential commands need dims = "
        "[d]");
}

int run_checked(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
  CLI::App app{
      "Finite statistical theories over two regions: no-signaling checks, "
      "conditioning, quantum behavior generation, and theory-space "
      "experiments.\n"
      "Results are JSON on stdout (or -o PATH). Seeded commands default to "
      "seed 12345 so published numbers reproduce without flags.\n"
      "Environment overrides: NOSIG_TAU_NORM, NOSIG_TAU_SIG, NOSIG_TAU_ZERO."};
  app.name("nosig");
  app.require_subcommand(1);
  const Tolerances tols = env_tolerances();

  // Deferred actions: parse fills plain variables, then exactly one of
  // these runs.
  std::function<int()> action;

  // validate ----------------------------------------------------------------
  auto* c_validate = app.add_subcommand(
      "validate", "Check a behavior, joint-behavior, or setup file");
  {
    auto file = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    c_validate->add_option("file", *file, "input JSON file")->required();
    c_validate->add_option("-o,--output", *out_path, "write result here");
    c_validate->callback([&, file, out_path] {
      action = [&, file, out_path] {
        const json j = load_json(*file);
        const std::string kind = classify_json(j);
        ValidationReport report;
        if (kind == "behavior")
          report = validate(behavior_from_json(j), tols.norm);
        else if (kind == "joint")
          report = validate(joint_from_json(j), tols.norm);
        else
          report = validate(setup_from_json(j));
        json res = to_json(report);
        res["kind"] = kind;
        emit(res, *out_path, out);
        return report.empty() ? 0 : 1;
      };
    });
  }

  // marginal ----------------------------------------------------------------
  auto* c_marginal =
      app.add_subcommand("marginal", "Marginal distributions of a joint file");
  {
    auto file = std::make_shared<std::string>();
    auto region = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    c_marginal->add_option("file", *file, "joint-behavior JSON file")
        ->required();
    c_marginal->add_option("--region", *region, "local or remote")
        ->required()
        ->check(CLI::IsMember({"local", "remote"}));
    c_marginal->add_option("-o,--output", *out_path, "write result here");
    c_marginal->callback([&, file, region, out_path] {
      action = [&, file, region, out_path] {
        const JointBehavior jb = load_valid_joint(*file, tols.norm);
        json rows = json::array();
        for (std::size_t w = 0; w < jb.prep_count(); ++w)
          for (std::size_t e = 0; e < jb.local_count(); ++e)
            for (std::size_t d = 0; d < jb.remote_count(); ++d) {
              const bool local = *region == "local";
              const auto dist = local ? marginal_local(jb, w, e, d)
                                      : marginal_remote(jb, w, e, d);
              const auto& labels = local
                                       ? jb.local_contexts()[e].outcomes.labels
                                       : jb.remote_contexts()[d].outcomes.labels;
              json values;
              for (std::size_t k = 0; k < dist.size(); ++k)
                values[labels[k]] = dist[k];
              rows.push_back(
                  {{"prep", jb.preparations()[w]},
                   {"local_context", jb.local_contexts()[e].name},
                   {"remote_context", jb.remote_contexts()[d].name},
                   {"distribution", std::move(values)}});
            }
        emit(json{{"region", *region}, {"marginals", std::move(rows)}},
             *out_path, out);
        return 0;
      };
    });
  }

  // condition ---------------------------------------------------------------
  auto* c_condition = app.add_subcommand(
      "condition", "Conditioned local behavior given a remote outcome");
  {
    auto file = std::make_shared<std::string>();
    auto prep = std::make_shared<std::string>();
    auto detector = std::make_shared<std::string>();
    auto outcome = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    c_condition->add_option("file", *file, "joint-behavior JSON file")
        ->required();
    c_condition->add_option("--prep", *prep, "preparation name")->required();
    c_condition->add_option("--detector", *detector, "remote context name")
        ->required();
    c_condition->add_option("--outcome", *outcome, "remote outcome label")
        ->required();
    c_condition->add_option("-o,--output", *out_path, "write result here");
    c_condition->callback([&, file, prep, detector, outcome, out_path] {
      action = [&, file, prep, detector, outcome, out_path] {
        const JointBehavior jb = load_valid_joint(*file, tols.norm);
        const Conditioned c =
            condition(jb, *prep, *detector, *outcome, tols.sig, tols.zero);
        emit(json{{"prep", *prep},
                  {"remote_context", *detector},
                  {"outcome", *outcome},
                  {"c", c.c},
                  {"behavior", to_json(c.behavior)}},
             *out_path, out);
        return 0;
      };
    });
  }

  // sig ---------------------------------------------------------------------
  auto* c_sig =
      app.add_subcommand("sig", "Signaling measures of a joint file");
  {
    auto file = std::make_shared<std::string>();
    auto ref_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto tau = std::make_shared<double>(-1.0);
    c_sig->add_option("file", *file, "joint-behavior JSON file")->required();
    c_sig->add_option("--reference", *ref_path,
                      "single-region behavior to compare marginals against");
    c_sig->add_option("--tol", *tau, "report threshold override");
    c_sig->add_option("-o,--output", *out_path, "write result here");
    c_sig->callback([&, file, ref_path, out_path, tau] {
      action = [&, file, ref_path, out_path, tau] {
        const double threshold = *tau > 0.0 ? *tau : tols.sig;
        const JointBehavior jb = load_valid_joint(*file, tols.norm);
        std::optional<Behavior> ref;
        if (!ref_path->empty())
          ref = load_valid_behavior(*ref_path, tols.norm);
        const SignalingReport rep =
            signaling_measure(jb, ref ? &*ref : nullptr);
        json res = to_json(rep, jb, ref ? &*ref : nullptr);
        res["signaling"] = rep.sig_to_remote > threshold ||
                           rep.sig_to_local > threshold;
        res["tolerance"] = threshold;
        emit(res, *out_path, out);
        return 0;
      };
    });
  }

  // diagnose ----------------------------------------------------------------
  auto* c_diagnose = app.add_subcommand(
      "diagnose", "Classify a joint extension against its local reference");
  {
    auto file = std::make_shared<std::string>();
    auto ref_path = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    c_diagnose->add_option("file", *file, "joint-behavior JSON file")
        ->required();
    c_diagnose
        ->add_option("--reference", *ref_path,
                     "single-region behavior the extension must reproduce")
        ->required();
    c_diagnose->add_option("-o,--output", *out_path, "write result here");
    c_diagnose->callback([&, file, ref_path, out_path] {
      action = [&, file, ref_path, out_path] {
        const JointBehavior jb = load_valid_joint(*file, tols.norm);
        const Behavior ref = load_valid_behavior(*ref_path, tols.norm);
        const ExtensionDiagnosis diag =
            diagnose_extension(jb, ref, tols.sig, tols.zero);
        emit(to_json(diag, jb, &ref), *out_path, out);
        return 0;
      };
    });
  }

  // equiv -------------------------------------------------------------------
  auto* c_equiv = app.add_subcommand(
      "equiv", "Statistical equivalence of preparations or contexts");
  {
    auto file = std::make_shared<std::string>();
    auto preps = std::make_shared<std::string>();
    auto ctxs = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    auto tau = std::make_shared<double>(-1.0);
    c_equiv->add_option("file", *file, "single-region behavior JSON file")
        ->required();
    auto* po = c_equiv->add_option("--preps", *preps,
                                   "two preparation names, comma separated");
    auto* co = c_equiv->add_option("--contexts", *ctxs,
                                   "two context names, comma separated");
    po->excludes(co);
    c_equiv->add_option("--tol", *tau, "equivalence tolerance override");
    c_equiv->add_option("-o,--output", *out_path, "write result here");
    c_equiv->callback([&, file, preps, ctxs, out_path, tau] {
      if (preps->empty() && ctxs->empty())
        throw CLI::RequiredError("--preps or --contexts");
      action = [&, file, preps, ctxs, out_path, tau] {
        const double threshold = *tau > 0.0 ? *tau : tols.sig;
        const Behavior b = load_valid_behavior(*file, tols.norm);
        if (!preps->empty()) {
          const auto [first, second] = split_pair(*preps, "--preps");
          const auto res = equivalent_preparations(
              b, b.prep_index(first), b.prep_index(second), threshold);
          emit(json{{"kind", "preparations"},
                    {"first", first},
                    {"second", second},
                    {"equivalent", res.equivalent},
                    {"max_deviation", res.max_deviation},
                    {"tolerance", threshold}},
               *out_path, out);
          return 0;
        }
        const auto [first, second] = split_pair(*ctxs, "--contexts");
        const std::size_t e1 = b.context_index(first);
        const std::size_t e2 = b.context_index(second);
        const auto pi = equivalent_observations(b, e1, e2, threshold);
        json mapping = nullptr;
        if (pi) {
          mapping = json::object();
          for (std::size_t i = 0; i < pi->size(); ++i)
            mapping[b.contexts()[e1].outcomes.labels[i]] =
                b.contexts()[e2].outcomes.labels[(*pi)[i]];
        }
        emit(json{{"kind", "observations"},
                  {"first", first},
                  {"second", second},
                  {"equivalent", pi.has_value()},
                  {"permutation", std::move(mapping)},
                  {"tolerance", threshold}},
             *out_path, out);
        return 0;
      };
    });
  }

  // qm ----------------------------------------------------------------------
  auto* c_qm = app.add_subcommand("qm", "Quantum setups to behaviors");
  c_qm->require_subcommand(1);

  auto* qm_behavior = c_qm->add_subcommand(
      "behavior", "Joint behavior of a bipartite setup");
  {
    auto file = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    qm_behavior->add_option("setup", *file, "setup JSON file")->required();
    qm_behavior->add_option("-o,--output", *out_path, "write result here");
    qm_behavior->callback([&, file, out_path] {
      action = [&, file, out_path] {
        const QuantumSetup s = load_valid_setup(*file);
        emit(to_json(bipartite_behavior(s.as_bipartite())), *out_path, out);
        return 0;
      };
    });
  }

  auto* qm_joint = c_qm->add_subcommand(
      "joint", "Sequential two-measurement table for a single system");
  {
    auto file = std::make_shared<std::string>();
    auto first = std::make_shared<std::string>();
    auto second = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    qm_joint->add_option("setup", *file, "setup JSON file")->required();
    qm_joint->add_option("--first", *first,
                         "first measurement name (default: first listed)");
    qm_joint->add_option("--second", *second,
                         "second measurement name (default: first listed)");
    qm_joint->add_option("-o,--output", *out_path, "write result here");
    qm_joint->callback([&, file, first, second, out_path] {
      action = [&, file, first, second, out_path] {
        const QuantumSetup s = load_valid_setup(*file);
        require_single_system(s);
        const auto& a = first->empty() ? s.local_measurements.at(0)
                                       : s.local(*first);
        const auto& b = second->empty() ? s.remote_measurements.at(0)
                                        : s.remote(*second);
        const auto table = joint_probability(s.state, a, b);
        json rows = json::array();
        for (std::size_t i = 0; i < a.projectors.size(); ++i) {
          json row = json::array();
          for (std::size_t j = 0; j < b.projectors.size(); ++j)
            row.push_back(table[i * b.projectors.size() + j]);
          rows.push_back(std::move(row));
        }
        emit(json{{"first", a.name},
                  {"second", b.name},
                  {"probabilities", std::move(rows)}},
             *out_path, out);
        return 0;
      };
    });
  }

  auto* qm_pre = c_qm->add_subcommand(
      "precondition", "Collapse onto one outcome of a measurement");
  {
    auto file = std::make_shared<std::string>();
    auto name = std::make_shared<std::string>();
    auto outcome = std::make_shared<std::size_t>(0);
    auto out_path = std::make_shared<std::string>();
    qm_pre->add_option("setup", *file, "setup JSON file")->required();
    qm_pre->add_option("--measurement", *name,
                       "measurement name (default: first listed)");
    qm_pre->add_option("--outcome", *outcome, "outcome index");
    qm_pre->add_option("-o,--output", *out_path, "write result here");
    qm_pre->callback([&, file, name, outcome, out_path] {
      action = [&, file, name, outcome, out_path] {
        const QuantumSetup s = load_valid_setup(*file);
        require_single_system(s);
        const auto& m =
            name->empty() ? s.local_measurements.at(0) : s.local(*name);
        if (*outcome >= m.projectors.size())
          throw nosig::IndexError("outcome index out of range");
        const auto pre =
            pre_condition(s.state, m.projectors[*outcome], tols.zero);
        emit(json{{"measurement", m.name},
                  {"outcome", *outcome},
                  {"probability", pre.probability},
                  {"state", to_json(pre.state.rho)}},
             *out_path, out);
        return 0;
      };
    });
  }

  auto* qm_post = c_qm->add_subcommand(
      "postcondition", "Probability of the first outcome given the second");
  {
    auto file = std::make_shared<std::string>();
    auto first = std::make_shared<std::string>();
    auto second = std::make_shared<std::string>();
    auto i = std::make_shared<std::size_t>(0);
    auto jdx = std::make_shared<std::size_t>(0);
    auto out_path = std::make_shared<std::string>();
    qm_post->add_option("setup", *file, "setup JSON file")->required();
    qm_post->add_option("--first", *first, "first measurement name");
    qm_post->add_option("--second", *second, "second measurement name");
    qm_post->add_option("--i", *i, "first-measurement outcome index");
    qm_post->add_option("--j", *jdx, "second-measurement outcome index");
    qm_post->add_option("-o,--output", *out_path, "write result here");
    qm_post->callback([&, file, first, second, i, jdx, out_path] {
      action = [&, file, first, second, i, jdx, out_path] {
        const QuantumSetup s = load_valid_setup(*file);
        require_single_system(s);
        const auto& a = first->empty() ? s.local_measurements.at(0)
                                       : s.local(*first);
        const auto& b = second->empty() ? s.remote_measurements.at(0)
                                        : s.remote(*second);
        const double p = post_condition(s.state, a, b, *i, *jdx, tols.zero);
        emit(json{{"first", a.name},
                  {"second", b.name},
                  {"i", *i},
                  {"j", *jdx},
                  {"probability", p}},
             *out_path, out);
        return 0;
      };
    });
  }

  auto* qm_witness = c_qm->add_subcommand(
      "witness",
      "Post-conditioning dependence on the rest of the first measurement");
  {
    auto file = std::make_shared<std::string>();
    auto a_name = std::make_shared<std::string>();
    auto ap_name = std::make_shared<std::string>();
    auto b_name = std::make_shared<std::string>();
    auto shared = std::make_shared<long long>(-1);
    auto out_path = std::make_shared<std::string>();
    qm_witness->add_option("setup", *file, "setup JSON file")->required();
    qm_witness->add_option("--a", *a_name, "first menu A");
    qm_witness->add_option("--a-prime", *ap_name, "first menu A'");
    qm_witness->add_option("--b", *b_name, "second measurement");
    qm_witness->add_option("--shared", *shared,
                           "shared outcome index within A");
    qm_witness->add_option("-o,--output", *out_path, "write result here");
    qm_witness->callback([&, file, a_name, ap_name, b_name, shared, out_path] {
      action = [&, file, a_name, ap_name, b_name, shared, out_path] {
        const QuantumSetup s = load_valid_setup(*file);
        require_single_system(s);
        WitnessSpec spec;
        if (!a_name->empty() || !ap_name->empty() || !b_name->empty() ||
            *shared >= 0) {
          if (a_name->empty() || ap_name->empty() || b_name->empty() ||
              *shared < 0)
            throw CLI::RequiredError("--a, --a-prime, --b and --shared");
          spec = WitnessSpec{*a_name, *ap_name, *b_name,
                             static_cast<std::size_t>(*shared), 0};
        } else if (s.witness) {
          spec = *s.witness;
        } else {
          throw nosig::Error(
              "setup has no witness block; give --a, --a-prime, --b and "
              "--shared");
        }
        const auto& a = s.local(spec.a);
        const auto& ap = s.local(spec.a_prime);
        const auto& b = s.remote(spec.b);
        if (spec.shared_outcome >= a.projectors.size())
          throw nosig::IndexError("shared outcome index out of range");
        const double dev = post_condition_witness(
            s.state, b, a.projectors[spec.shared_outcome], a, ap, tols.zero);
        emit(json{{"a", spec.a},
                  {"a_prime", spec.a_prime},
                  {"b", spec.b},
                  {"shared_outcome", spec.shared_outcome},
                  {"deviation", dev}},
             *out_path, out);
        return 0;
      };
    });
  }

  // space -------------------------------------------------------------------
  auto* c_space = app.add_subcommand("space", "Theory-space experiments");
  c_space->require_subcommand(1);

  auto* sp_sample =
      c_space->add_subcommand("sample", "Uniform random theory point");
  {
    auto structure = std::make_shared<std::string>("1x2x2x2");
    auto seed = std::make_shared<std::uint64_t>(kDefaultSeed);
    auto out_path = std::make_shared<std::string>();
    sp_sample->add_option("--structure", *structure,
                          "PxLxRxN[xM] block shape");
    sp_sample->add_option("--seed", *seed, "random seed (default 12345)");
    sp_sample->add_option("-o,--output", *out_path, "write result here");
    sp_sample->callback([&, structure, seed, out_path] {
      action = [&, structure, seed, out_path] {
        const auto s = BehaviorStructure::parse(*structure);
        emit(to_json(sample_theory(s, *seed)), *out_path, out);
        return 0;
      };
    });
  }

  auto* sp_perturb = c_space->add_subcommand(
      "perturb", "Random (or explicit signaling) perturbation of a point");
  {
    auto file = std::make_shared<std::string>();
    auto eps = std::make_shared<double>(1e-2);
    auto seed = std::make_shared<std::uint64_t>(kDefaultSeed);
    auto signaling = std::make_shared<bool>(false);
    auto out_path = std::make_shared<std::string>();
    sp_perturb->add_option("file", *file, "joint-behavior JSON file")
        ->required();
    sp_perturb->add_option("--eps", *eps, "sup-norm radius");
    sp_perturb->add_option("--seed", *seed, "random seed (default 12345)");
    sp_perturb->add_flag("--signaling", *signaling,
                         "use the explicit signaling construction");
    sp_perturb->add_option("-o,--output", *out_path, "write result here");
    sp_perturb->callback([&, file, eps, seed, signaling, out_path] {
      action = [&, file, eps, seed, signaling, out_path] {
        const JointBehavior jb = load_valid_joint(*file, tols.norm);
        const TheoryPoint q =
            *signaling ? construct_signaling_perturbation(jb, *eps, tols.sig)
                       : perturb_in_ball(jb, *eps, *seed);
        emit(to_json(q), *out_path, out);
        return 0;
      };
    });
  }

  auto* sp_project = c_space->add_subcommand(
      "project", "Nearest no-signaling point (Dykstra alternation)");
  {
    auto file = std::make_shared<std::string>();
    auto out_path = std::make_shared<std::string>();
    sp_project->add_option("file", *file, "joint-behavior JSON file")
        ->required();
    sp_project->add_option("-o,--output", *out_path, "write result here");
    sp_project->callback([&, file, out_path] {
      action = [&, file, out_path] {
        const JointBehavior jb = load_valid_joint(*file, tols.norm);
        const ProjectionResult res = project_no_signaling(jb);
        // The point itself goes to the output so it can feed other
        // commands; run metadata goes to the message stream.
        err << "iterations " << res.iterations << ", final move "
            << res.final_move << '\n';
        emit(to_json(res.point), *out_path, out);
        return 0;
      };
    });
  }

  auto* sp_stability = c_space->add_subcommand(
      "stability", "Sample theories and measure how many signal");
  {
    auto structure = std::make_shared<std::string>("1x2x2x2");
    auto opts = std::make_shared<StabilityOptions>();
    auto csv_path = std::make_shared<std::string>();
    auto serial = std::make_shared<bool>(false);
    auto out_path = std::make_shared<std::string>();
    sp_stability->add_option("--structure", *structure,
                             "PxLxRxN[xM] block shape");
    sp_stability->add_option("--trials", opts->trials, "sample count");
    sp_stability->add_option("--tol", opts->tolerance,
                             "signaling threshold");
    sp_stability->add_option("--seed", opts->seed,
                             "random seed (default 12345)");
    sp_stability->add_option("--bins", opts->histogram_bins,
                             "histogram bin count");
    sp_stability->add_option("--density-points", opts->density_points,
                             "projected points for the density check");
    sp_stability->add_option("--openness-points", opts->openness_points,
                             "signaling points for the openness check");
    sp_stability->add_option("--openness-probes", opts->openness_probes,
                             "probes per openness point");
    sp_stability->add_option("--csv", *csv_path,
                             "write per-trial rows to this CSV file");
    sp_stability->add_flag("--serial", *serial,
                           "run the serial reference kernel");
    sp_stability->add_option("-o,--output", *out_path, "write result here");
    sp_stability->callback([&, structure, opts, csv_path, serial, out_path] {
      action = [&, structure, opts, csv_path, serial, out_path] {
        const auto s = BehaviorStructure::parse(*structure);
        const StabilityResult res =
            *serial ? stability_experiment_serial(s, *opts)
                    : stability_experiment(s, *opts);
        if (!csv_path->empty()) {
          std::ofstream f(*csv_path);
          if (!f) throw nosig::Error("cannot write '" + *csv_path + "'");
          write_trials_csv(f, res);
        }
        emit(to_json(res), *out_path, out);
        return 0;
      };
    });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }
  return action ? action() : 2;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  try {
    return run_checked(args, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const nosig::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const nosig::Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace nosig::cli
