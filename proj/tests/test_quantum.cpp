// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <numeric>

#include "nosig/quantum.hpp"
#include "nosig/rng.hpp"
#include "nosig/signaling.hpp"
#include "test_util.hpp"

using namespace nosig;
using Eigen::MatrixXcd;
using std::complex;

namespace {

MatrixXcd ket_projector(const Eigen::VectorXcd& v) {
  return v * v.adjoint();
}

DensityMatrix maximally_mixed(std::size_t d) {
  return {MatrixXcd::Identity(d, d) / static_cast<double>(d)};
}

ProjectiveMeasurement z_basis(std::size_t d, const std::string& name = "Z") {
  return basis_measurement(name, computational_basis(d));
}

ProjectiveMeasurement x_basis(std::size_t d, const std::string& name = "X") {
  return basis_measurement(name, fourier_basis(d));
}

double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

/// Naive O(d^3) multiply, independent of Eigen's kernels.
MatrixXcd slow_mul(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out = MatrixXcd::Zero(a.rows(), b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < b.cols(); ++c)
      for (Eigen::Index k = 0; k < a.cols(); ++k)
        out(r, c) += a(r, k) * b(k, c);
  return out;
}

double slow_joint(const MatrixXcd& rho, const MatrixXcd& p,
                  const MatrixXcd& q) {
  const MatrixXcd m = slow_mul(slow_mul(slow_mul(p, rho), p), q);
  complex<double> tr = 0.0;
  for (Eigen::Index k = 0; k < m.rows(); ++k) tr += m(k, k);
  return tr.real();
}

bool has_kind(const ValidationReport& r, const std::string& kind) {
  for (const auto& v : r)
    if (v.kind == kind) return true;
  return false;
}

BipartiteSetup singlet_setup() {
  return BipartiteSetup{2,
                        2,
                        singlet_state(),
                        {z_basis(2, "Az"), x_basis(2, "Ax")},
                        {z_basis(2, "Bz"), x_basis(2, "Bx")}};
}

}  // namespace

TEST_CASE("the maximally mixed state validates cleanly") {
  CHECK(validate_state(maximally_mixed(2)).empty());
  CHECK(validate_state(maximally_mixed(5)).empty());
}

TEST_CASE("broken states are reported by kind") {
  MatrixXcd m(2, 2);
  m << 0.5, 1.0, 0.0, 0.5;
  CHECK(has_kind(validate_state({m}), "hermiticity"));

  MatrixXcd t = MatrixXcd::Identity(2, 2);
  CHECK(has_kind(validate_state({t}), "trace"));

  MatrixXcd n(2, 2);
  n << 1.5, 0.0, 0.0, -0.5;
  const auto rep = validate_state({n});
  CHECK(has_kind(rep, "negative-eigenvalue"));
  CHECK_FALSE(has_kind(rep, "hermiticity"));
  CHECK_FALSE(has_kind(rep, "trace"));

  MatrixXcd rect(2, 3);
  rect.setZero();
  CHECK(has_kind(validate_state({rect}), "shape"));
}

TEST_CASE("basis measurements validate cleanly") {
  CHECK(validate_measurement(z_basis(2)).empty());
  CHECK(validate_measurement(x_basis(3)).empty());
  auto g = make_rng(41);
  CHECK(validate_measurement(basis_measurement("R", random_unitary(4, g)))
            .empty());
}

TEST_CASE("a repeated projector breaks orthogonality and completeness") {
  const MatrixXcd p0 = ket_projector(computational_basis(2).col(0));
  ProjectiveMeasurement m{"bad", {{"0", "1"}}, {p0, p0}};
  const auto rep = validate_measurement(m);
  CHECK(has_kind(rep, "orthogonality"));
  CHECK(has_kind(rep, "completeness"));
  CHECK_FALSE(has_kind(rep, "idempotence"));
}

TEST_CASE("a scaled projector breaks idempotence") {
  const MatrixXcd p0 = ket_projector(computational_basis(2).col(0));
  const MatrixXcd p1 = ket_projector(computational_basis(2).col(1));
  ProjectiveMeasurement m{"bad", {{"0", "1"}}, {0.5 * p0, p1}};
  CHECK(has_kind(validate_measurement(m), "idempotence"));
}

TEST_CASE("rank-2 projector measurements are legal") {
  const MatrixXcd u = computational_basis(4);
  const MatrixXcd low =
      ket_projector(u.col(0)) + ket_projector(u.col(1));
  const MatrixXcd high =
      ket_projector(u.col(2)) + ket_projector(u.col(3));
  ProjectiveMeasurement m{"coarse", {{"low", "high"}}, {low, high}};
  CHECK(validate_measurement(m).empty());
}

TEST_CASE("setups validate as a whole") {
  CHECK(validate_setup(singlet_setup()).empty());

  BipartiteSetup bad = singlet_setup();
  bad.local_measurements[0] = z_basis(3, "wrong-dim");
  CHECK(has_kind(validate_setup(bad), "shape"));

  BipartiteSetup bad_state = singlet_setup();
  bad_state.state.rho *= 2.0;
  CHECK(has_kind(validate_setup(bad_state), "trace"));
}

TEST_CASE("require_clean throws with the violation kinds listed") {
  require_clean({}, "ok");  // no throw
  try {
    require_clean({{"trace", {0}, 1.0}}, "state");
    FAIL("expected ConstructionError");
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()).find("trace") != std::string::npos);
  }
}

TEST_CASE("sequential probabilities on the mixed qubit are flat") {
  const auto p = joint_probability(maximally_mixed(2), z_basis(2), x_basis(2));
  REQUIRE(p.size() == 4);
  for (double v : p) CHECK(v == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("repeating a measurement is diagonal in its basis") {
  auto g = make_rng(5);
  const DensityMatrix rho = random_density(3, g);
  const auto m = z_basis(3);
  const auto p = joint_probability(rho, m, m);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const double expected = (i == j) ? rho.rho(i, i).real() : 0.0;
      CHECK(p[3 * i + j] == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("an eigenstate gives a deterministic repeated outcome") {
  const DensityMatrix rho{ket_projector(computational_basis(2).col(0))};
  const auto p = joint_probability(rho, z_basis(2), z_basis(2));
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p[1] + p[2] + p[3] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("sequential probabilities match a naive trace oracle") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto g = make_rng(seed);
    const DensityMatrix rho = random_density(3, g);
    const auto a = basis_measurement("A", random_unitary(3, g));
    const auto b = basis_measurement("B", random_unitary(3, g));
    const auto p = joint_probability(rho, a, b);
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double slow =
            slow_joint(rho.rho, a.projectors[i], b.projectors[j]);
        CHECK(p[3 * i + j] == doctest::Approx(slow).epsilon(1e-12));
        CHECK(p[3 * i + j] >= -1e-14);
        total += p[3 * i + j];
      }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("summing out the second outcome recovers the first marginal") {
  for (std::uint64_t seed = 11; seed <= 14; ++seed) {
    auto g = make_rng(seed);
    const DensityMatrix rho = random_density(4, g);
    const auto a = basis_measurement("A", random_unitary(4, g));
    const auto b = basis_measurement("B", random_unitary(4, g));
    const auto p = joint_probability(rho, a, b);
    for (std::size_t i = 0; i < 4; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < 4; ++j) row += p[4 * i + j];
      const double direct = (a.projectors[i] * rho.rho).trace().real();
      CHECK(std::abs(row - direct) <= 1e-12);
    }
  }
}

TEST_CASE("collapsing the mixed qubit onto |0> gives the pure state") {
  const MatrixXcd p0 = ket_projector(computational_basis(2).col(0));
  const PreConditioned pc = pre_condition(maximally_mixed(2), p0);
  CHECK(pc.probability == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(max_abs(pc.state.rho - p0) <= 1e-14);
}

TEST_CASE("collapsing an eigenstate changes nothing") {
  const MatrixXcd p0 = ket_projector(computational_basis(2).col(0));
  const PreConditioned pc = pre_condition({p0}, p0);
  CHECK(pc.probability == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(max_abs(pc.state.rho - p0) <= 1e-14);
}

TEST_CASE("collapsing onto an orthogonal projector is an error") {
  const MatrixXcd p0 = ket_projector(computational_basis(2).col(0));
  const MatrixXcd p1 = ket_projector(computational_basis(2).col(1));
  CHECK_THROWS_AS(pre_condition({p0}, p1), ConditioningError);
}

TEST_CASE("collapsed states are valid and reproduce conditionals") {
  for (std::uint64_t seed = 21; seed <= 24; ++seed) {
    auto g = make_rng(seed);
    const DensityMatrix rho = random_density(3, g);
    const auto a = basis_measurement("A", random_unitary(3, g));
    const auto b = basis_measurement("B", random_unitary(3, g));
    const auto p = joint_probability(rho, a, b);
    for (std::size_t i = 0; i < 3; ++i) {
      const PreConditioned pc = pre_condition(rho, a.projectors[i]);
      CHECK(validate_state(pc.state).empty());
      double row = 0.0;
      for (std::size_t j = 0; j < 3; ++j) row += p[3 * i + j];
      CHECK(pc.probability == doctest::Approx(row).epsilon(1e-12));
      for (std::size_t j = 0; j < 3; ++j) {
        const double cond =
            (b.projectors[j] * pc.state.rho).trace().real();
        CHECK(cond ==
              doctest::Approx(p[3 * i + j] / row).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("post-conditioning commuting coarse measurements is Bayes") {
  MatrixXcd d = MatrixXcd::Zero(4, 4);
  d.diagonal() << 0.1, 0.2, 0.3, 0.4;
  const DensityMatrix rho{d};
  const auto fine = z_basis(4, "fine");
  const MatrixXcd u = computational_basis(4);
  ProjectiveMeasurement coarse{
      "coarse",
      {{"low", "high"}},
      {ket_projector(u.col(0)) + ket_projector(u.col(1)),
       ket_projector(u.col(2)) + ket_projector(u.col(3))}};
  // Classical conditioning on the block: P(i | low) = rho_ii / 0.3.
  CHECK(post_condition(rho, fine, coarse, 0, 0) ==
        doctest::Approx(0.1 / 0.3).epsilon(1e-12));
  CHECK(post_condition(rho, fine, coarse, 1, 0) ==
        doctest::Approx(0.2 / 0.3).epsilon(1e-12));
  CHECK(post_condition(rho, fine, coarse, 2, 0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(post_condition(rho, fine, coarse, 2, 1) ==
        doctest::Approx(0.3 / 0.7).epsilon(1e-12));
}

TEST_CASE("post-conditioning the mixed qubit across bases is flat") {
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(post_condition(maximally_mixed(2), z_basis(2), x_basis(2), i, j) ==
            doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("post-conditioned probabilities are normalized") {
  for (std::uint64_t seed = 31; seed <= 34; ++seed) {
    auto g = make_rng(seed);
    const DensityMatrix rho = random_density(3, g);
    const auto a = basis_measurement("A", random_unitary(3, g));
    const auto b = basis_measurement("B", random_unitary(3, g));
    for (std::size_t j = 0; j < 3; ++j) {
      double total = 0.0;
      for (std::size_t i = 0; i < 3; ++i)
        total += post_condition(rho, a, b, i, j);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("a vanishing denominator is a conditioning error") {
  const MatrixXcd p0 = ket_projector(computational_basis(2).col(0));
  CHECK_THROWS_AS(post_condition({p0}, z_basis(2), z_basis(2), 0, 1),
                  ConditioningError);
}

TEST_CASE("the witness vanishes when the completions coincide") {
  auto g = make_rng(51);
  const DensityMatrix rho = random_density(3, g);
  const auto a = z_basis(3, "A");
  const auto b = basis_measurement("B", random_unitary(3, g));
  const MatrixXcd shared = a.projectors[0];
  CHECK(post_condition_witness(rho, b, shared, a, a) <= 1e-15);
}

TEST_CASE("the witness vanishes when everything commutes") {
  for (std::uint64_t seed = 61; seed <= 64; ++seed) {
    auto g = make_rng(seed);
    const DensityMatrix rho = random_density(3, g);
    const MatrixXcd u = computational_basis(3);
    const MatrixXcd shared = ket_projector(u.col(0));
    const auto a = z_basis(3, "A");
    ProjectiveMeasurement a_prime{
        "A'",
        {{"0", "rest"}},
        {shared, ket_projector(u.col(1)) + ket_projector(u.col(2))}};
    const auto b = z_basis(3, "B");
    CHECK(post_condition_witness(rho, b, shared, a, a_prime) <= 1e-12);
  }
}

TEST_CASE("incoherent completions shift the shared conditional") {
  // Coherent vs incoherent completion of |0><0| on a qutrit: measured
  // against a generic second basis, the conditional of the shared outcome
  // depends on which completion ran first.
  auto g = make_rng(7);
  const DensityMatrix rho = random_pure(3, g);
  const MatrixXcd u = computational_basis(3);
  const MatrixXcd shared = ket_projector(u.col(0));
  const auto a = z_basis(3, "A");
  Eigen::VectorXcd plus(3), minus(3);
  plus << 0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  minus << 0, 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  ProjectiveMeasurement a_prime{
      "A'", {{"0", "+", "-"}}, {shared, ket_projector(plus),
                                ket_projector(minus)}};
  const auto b = basis_measurement("B", random_unitary(3, g));
  CHECK(post_condition_witness(rho, b, shared, a, a_prime) > 0.01);
}

TEST_CASE("a foreign projector is rejected by the witness") {
  auto g = make_rng(53);
  const DensityMatrix rho = random_density(3, g);
  const auto a = z_basis(3, "A");
  const auto b = basis_measurement("B", random_unitary(3, g));
  const MatrixXcd foreign = ket_projector(fourier_basis(3).col(0));
  CHECK_THROWS_AS(post_condition_witness(rho, b, foreign, a, a),
                  ConstructionError);
}

TEST_CASE("product states factorize the bipartite behavior") {
  auto g = make_rng(71);
  const DensityMatrix ra = random_density(2, g);
  const DensityMatrix rb = random_density(3, g);
  BipartiteSetup s{2,
                   3,
                   {kron(ra.rho, rb.rho)},
                   {basis_measurement("A0", random_unitary(2, g))},
                   {basis_measurement("B0", random_unitary(3, g))}};
  const JointBehavior jb = bipartite_behavior(s);
  for (std::size_t i = 0; i < 2; ++i) {
    const double pi =
        (s.local_measurements[0].projectors[i] * ra.rho).trace().real();
    for (std::size_t j = 0; j < 3; ++j) {
      const double qj =
          (s.remote_measurements[0].projectors[j] * rb.rho).trace().real();
      CHECK(jb.at(0, 0, 0, i, j) ==
            doctest::Approx(pi * qj).epsilon(1e-12));
    }
  }
}

TEST_CASE("the singlet anticorrelates matched bases") {
  const JointBehavior jb = bipartite_behavior(singlet_setup());
  // Az vs Bz: opposite outcomes with probability 1/2 each.
  CHECK(jb.at(0, 0, 0, 0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(jb.at(0, 0, 0, 0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(jb.at(0, 0, 0, 1, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(jb.at(0, 0, 0, 1, 1) == doctest::Approx(0.0).epsilon(1e-14));
  // Ax vs Bx: the singlet anticorrelates every matched basis.
  CHECK(jb.at(0, 1, 1, 0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(jb.at(0, 1, 1, 0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  // Az vs Bx: unbiased.
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(jb.at(0, 0, 1, i, j) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("quantum behaviors never signal") {
  for (std::uint64_t seed = 81; seed <= 92; ++seed) {
    auto g = make_rng(seed);
    const std::size_t da = 2 + seed % 2;
    const std::size_t db = 2 + (seed / 2) % 2;
    const BipartiteSetup s = random_setup(da, db, 2, 2, g);
    REQUIRE(validate_setup(s).empty());
    const JointBehavior jb = bipartite_behavior(s);
    CHECK(validate(jb).empty());
    const SignalingReport r = signaling_measure(jb);
    CHECK(r.sig_to_remote <= 1e-10);
    CHECK(r.sig_to_local <= 1e-10);
    for (std::size_t e = 0; e < 2; ++e)
      for (std::size_t d = 0; d < 2; ++d)
        CHECK(total_probability_check(jb, 0, e, d) <= 1e-12);
  }
}

TEST_CASE("remote collapse of a product state leaves the local factor") {
  auto g = make_rng(95);
  const DensityMatrix ra = random_density(2, g);
  const DensityMatrix rb = random_density(2, g);
  BipartiteSetup s{2,
                   2,
                   {kron(ra.rho, rb.rho)},
                   {z_basis(2, "A0")},
                   {z_basis(2, "B0")}};
  const CollapsedState cs = collapsed_remote_state(s, 0, 0);
  CHECK(cs.c == doctest::Approx(rb.rho(0, 0).real()).epsilon(1e-12));
  CHECK(max_abs(cs.state.rho - ra.rho) <= 1e-12);
}

TEST_CASE("remote collapse of the singlet flips the local qubit") {
  const CollapsedState cs = collapsed_remote_state(singlet_setup(), 0, 0);
  CHECK(cs.c == doctest::Approx(0.5).epsilon(1e-14));
  const MatrixXcd p1 = ket_projector(computational_basis(2).col(1));
  CHECK(max_abs(cs.state.rho - p1) <= 1e-13);
}

TEST_CASE("remote collapse of the mixed pair keeps the local qubit mixed") {
  BipartiteSetup s{2,
                   2,
                   maximally_mixed(4),
                   {z_basis(2, "A0")},
                   {z_basis(2, "B0"), x_basis(2, "B1")}};
  for (std::size_t d = 0; d < 2; ++d)
    for (std::size_t j = 0; j < 2; ++j) {
      const CollapsedState cs = collapsed_remote_state(s, d, j);
      CHECK(cs.c == doctest::Approx(0.5).epsilon(1e-13));
      CHECK(max_abs(cs.state.rho - maximally_mixed(2).rho) <= 1e-13);
    }
}

TEST_CASE("behavior-level and state-level collapse agree") {
  for (std::uint64_t seed = 101; seed <= 106; ++seed) {
    auto g = make_rng(seed);
    const BipartiteSetup s = random_setup(2, 2, 2, 2, g);
    const JointBehavior jb = bipartite_behavior(s);
    for (std::size_t d = 0; d < 2; ++d)
      for (std::size_t j = 0; j < 2; ++j) {
        const Conditioned via_behavior = condition(jb, 0, d, j, 1e-8);
        const CollapsedState via_state = collapsed_remote_state(s, d, j);
        CHECK(std::abs(via_behavior.c - via_state.c) <= 1e-10);
        const Behavior from_state =
            behavior_from_state(via_state.state, s.local_measurements);
        for (std::size_t e = 0; e < 2; ++e)
          for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(via_behavior.behavior.at(0, e, i) -
                           from_state.at(0, e, i)) <= 1e-10);
      }
  }
}

TEST_CASE("kron and partial trace are mutually consistent") {
  auto g = make_rng(111);
  const DensityMatrix ra = random_density(2, g);
  const DensityMatrix rb = random_density(3, g);
  const MatrixXcd prod = kron(ra.rho, rb.rho);
  REQUIRE(prod.rows() == 6);
  CHECK(max_abs(partial_trace_remote(prod, 2, 3) - ra.rho) <= 1e-13);
  // Entry convention: (a d_B + b, a' d_B + b') = A(a,a') B(b,b').
  CHECK(prod(1 * 3 + 2, 0 * 3 + 1) ==
        ra.rho(1, 0) * rb.rho(2, 1));
}

TEST_CASE("the qubit Fourier basis is the x basis") {
  const MatrixXcd f = fourier_basis(2);
  const double s = 1 / std::sqrt(2.0);
  CHECK(max_abs(f.col(0) - (Eigen::VectorXcd(2) << s, s).finished()) <=
        1e-14);
  CHECK(max_abs(f.col(1) - (Eigen::VectorXcd(2) << s, -s).finished()) <=
        1e-14);
}

TEST_CASE("random unitaries are unitary and deterministic") {
  auto g1 = make_rng(123);
  auto g2 = make_rng(123);
  const MatrixXcd u1 = random_unitary(4, g1);
  const MatrixXcd u2 = random_unitary(4, g2);
  CHECK(max_abs(u1 - u2) == 0.0);
  CHECK(max_abs(u1.adjoint() * u1 - MatrixXcd::Identity(4, 4)) <= 1e-12);
}

TEST_CASE("random states are valid and pure states have unit purity") {
  auto g = make_rng(131);
  const DensityMatrix pure = random_pure(3, g);
  CHECK(validate_state(pure).empty());
  CHECK((pure.rho * pure.rho).trace().real() ==
        doctest::Approx(1.0).epsilon(1e-12));
  const DensityMatrix mixed = random_density(3, g);
  CHECK(validate_state(mixed).empty());
  CHECK((mixed.rho * mixed.rho).trace().real() < 1.0);
}

TEST_CASE("the singlet state has the textbook entries") {
  const DensityMatrix s = singlet_state();
  REQUIRE(s.rho.rows() == 4);
  CHECK(s.rho(1, 1).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.rho(2, 2).real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s.rho(1, 2).real() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(s.rho(0, 0).real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(validate_state(s).empty());
  CHECK((s.rho * s.rho).trace().real() ==
        doctest::Approx(1.0).epsilon(1e-14));
}
