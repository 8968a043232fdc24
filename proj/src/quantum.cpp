// Copyright (c) 2026 nosig authors.
// SPDX-License-Identifier: Apache-2.0

#include "nosig/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nosig/rng.hpp"

namespace nosig {
namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;

double re_trace(const MatrixXcd& a, const MatrixXcd& b) {
  return (a * b).trace().real();
}

std::string out_label(std::size_t k) { return std::to_string(k); }

OutcomeSet default_labels(std::size_t n) {
  OutcomeSet out;
  out.labels.reserve(n);
  for (std::size_t k = 0; k < n; ++k) out.labels.push_back(out_label(k));
  return out;
}

void check_dim(const ProjectiveMeasurement& m, std::size_t d,
               const std::string& what) {
  if (m.dim() != d)
    throw ShapeError("measurement '" + m.name + "' acts on dimension " +
                     std::to_string(m.dim()) + ", expected " +
                     std::to_string(d) + " (" + what + ")");
}

std::size_t find_projector(const ProjectiveMeasurement& m,
                           const MatrixXcd& target, double tau) {
  for (std::size_t k = 0; k < m.projectors.size(); ++k) {
    const auto& p = m.projectors[k];
    if (p.rows() != target.rows() || p.cols() != target.cols()) continue;
    if ((p - target).cwiseAbs().maxCoeff() <= tau) return k;
  }
  throw ConstructionError("measurement '" + m.name +
                          "' does not contain the shared projector");
}

}  // namespace

ValidationReport validate_state(const DensityMatrix& m, double tau) {
  ValidationReport report;
  const auto& rho = m.rho;
  if (rho.rows() == 0 || rho.rows() != rho.cols()) {
    report.push_back({"shape", {}, static_cast<double>(rho.size())});
    return report;
  }
  const double herm = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
  if (herm > tau) report.push_back({"hermiticity", {}, herm});
  const double tr = std::abs(rho.trace().real() - 1.0) +
                    std::abs(rho.trace().imag());
  if (tr > tau) report.push_back({"trace", {}, tr});
  const MatrixXcd sym = 0.5 * (rho + rho.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sym,
                                              Eigen::EigenvaluesOnly);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double lam = es.eigenvalues()[k];
    if (lam < -tau)
      report.push_back(
          {"negative-eigenvalue", {static_cast<std::size_t>(k)}, -lam});
  }
  return report;
}

ValidationReport validate_measurement(const ProjectiveMeasurement& m,
                                      double tau) {
  ValidationReport report;
  if (m.projectors.empty()) {
    report.push_back({"shape", {}, 0.0});
    return report;
  }
  const auto d = m.projectors.front().rows();
  for (std::size_t k = 0; k < m.projectors.size(); ++k) {
    const auto& p = m.projectors[k];
    if (p.rows() != d || p.cols() != d) {
      report.push_back({"shape", {k}, static_cast<double>(p.size())});
      return report;
    }
  }
  if (!m.outcomes.labels.empty() &&
      m.outcomes.size() != m.projectors.size())
    report.push_back({"shape", {m.outcomes.size()}, 0.0});
  for (std::size_t k = 0; k < m.projectors.size(); ++k) {
    const auto& p = m.projectors[k];
    const double herm = (p - p.adjoint().eval()).cwiseAbs().maxCoeff();
    if (herm > tau) report.push_back({"hermiticity", {k}, herm});
    const double idem = (p * p - p).cwiseAbs().maxCoeff();
    if (idem > tau) report.push_back({"idempotence", {k}, idem});
  }
  for (std::size_t a = 0; a < m.projectors.size(); ++a)
    for (std::size_t b = a + 1; b < m.projectors.size(); ++b) {
      const double ortho =
          (m.projectors[a] * m.projectors[b]).cwiseAbs().maxCoeff();
      if (ortho > tau) report.push_back({"orthogonality", {a, b}, ortho});
    }
  MatrixXcd sum = MatrixXcd::Zero(d, d);
  for (const auto& p : m.projectors) sum += p;
  const double comp =
      (sum - MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (comp > tau) report.push_back({"completeness", {}, comp});
  return report;
}

ValidationReport validate_setup(const BipartiteSetup& s, double tau) {
  ValidationReport report;
  if (s.state.dim() != s.dim_a * s.dim_b) {
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
    const auto& m = s.local_measurements[k];
    if (m.dim() != s.dim_a) {
      report.push_back({"shape", {1, k}, static_cast<double>(m.dim())});
      continue;
    }
    merge(validate_measurement(m, tau), 1);
  }
  for (std::size_t k = 0; k < s.remote_measurements.size(); ++k) {
    const auto& m = s.remote_measurements[k];
    if (m.dim() != s.dim_b) {
      report.push_back({"shape", {2, k}, static_cast<double>(m.dim())});
      continue;
    }
    merge(validate_measurement(m, tau), 2);
  }
  return report;
}

void require_clean(const ValidationReport& report, const std::string& what) {
  if (report.empty()) return;
  std::ostringstream msg;
  msg << "invalid " << what << ":";
  for (const auto& v : report) {
    msg << " " << v.kind << "[";
    for (std::size_t k = 0; k < v.index.size(); ++k)
      msg << (k ? "," : "") << v.index[k];
    msg << "]=" << v.magnitude;
  }
  throw ConstructionError(msg.str());
}

std::vector<double> joint_probability(const DensityMatrix& rho,
                                      const ProjectiveMeasurement& a,
                                      const ProjectiveMeasurement& b) {
  check_dim(a, rho.dim(), "first measurement");
  check_dim(b, rho.dim(), "second measurement");
  std::vector<double> table(a.projectors.size() * b.projectors.size(), 0.0);
  for (std::size_t i = 0; i < a.projectors.size(); ++i) {
    const MatrixXcd collapsed =
        a.projectors[i] * rho.rho * a.projectors[i];
    for (std::size_t j = 0; j < b.projectors.size(); ++j)
      table[i * b.projectors.size() + j] =
          re_trace(collapsed, b.projectors[j]);
  }
  return table;
}

PreConditioned pre_condition(const DensityMatrix& rho,
                             const Eigen::MatrixXcd& projector,
                             double tau_zero) {
  if (projector.rows() != static_cast<Eigen::Index>(rho.dim()) ||
      projector.cols() != projector.rows())
    throw ShapeError("projector dimension mismatch");
  const double p = re_trace(projector, rho.rho);
  if (p <= tau_zero) {
    std::ostringstream msg;
    msg << "projector probability " << p << " is not positive";
    throw ConditioningError(msg.str());
  }
  DensityMatrix out{(projector * rho.rho * projector) / p};
  return PreConditioned{p, std::move(out)};
}

double post_condition(const DensityMatrix& rho, const ProjectiveMeasurement& a,
                      const ProjectiveMeasurement& b, std::size_t i,
                      std::size_t j, double tau_zero) {
  check_dim(a, rho.dim(), "first measurement");
  check_dim(b, rho.dim(), "second measurement");
  if (i >= a.projectors.size())
    throw IndexError("first-measurement outcome index out of range");
  if (j >= b.projectors.size())
    throw IndexError("second-measurement outcome index out of range");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < a.projectors.size(); ++k) {
    const double t =
        re_trace(a.projectors[k] * rho.rho * a.projectors[k],
                 b.projectors[j]);
    den += t;
    if (k == i) num = t;
  }
  if (den <= tau_zero) {
    std::ostringstream msg;
    msg << "second-measurement outcome " << j << " has probability " << den;
    throw ConditioningError(msg.str());
  }
  return num / den;
}

double post_condition_witness(const DensityMatrix& rho,
                              const ProjectiveMeasurement& b,
                              const Eigen::MatrixXcd& shared,
                              const ProjectiveMeasurement& a,
                              const ProjectiveMeasurement& a_prime,
                              double tau_zero) {
  const std::size_t ia = find_projector(a, shared, qtol::matrix);
  const std::size_t ip = find_projector(a_prime, shared, qtol::matrix);
  double worst = 0.0;
  for (std::size_t j = 0; j < b.projectors.size(); ++j) {
    double va = 0.0, vp = 0.0;
    try {
      va = post_condition(rho, a, b, ia, j, tau_zero);
      vp = post_condition(rho, a_prime, b, ip, j, tau_zero);
    } catch (const ConditioningError&) {
      // Outcome j never fires; it carries no conditional distribution.
      continue;
    }
    worst = std::max(worst, std::abs(va - vp));
  }
  return worst;
}

JointBehavior bipartite_behavior(const BipartiteSetup& s) {
  if (s.state.dim() != s.dim_a * s.dim_b)
    throw ShapeError("state dimension does not equal d_A*d_B");
  std::vector<Context> local, remote;
  for (const auto& m : s.local_measurements) {
    check_dim(m, s.dim_a, "local");
    local.push_back({m.name, m.outcomes.labels.empty()
                                 ? default_labels(m.projectors.size())
                                 : m.outcomes});
  }
  for (const auto& m : s.remote_measurements) {
    check_dim(m, s.dim_b, "remote");
    remote.push_back({m.name, m.outcomes.labels.empty()
                                  ? default_labels(m.projectors.size())
                                  : m.outcomes});
  }
  std::vector<double> table;
  for (const auto& me : s.local_measurements)
    for (const auto& md : s.remote_measurements)
      for (const auto& p : me.projectors)
        for (const auto& q : md.projectors)
          table.push_back(re_trace(kron(p, q), s.state.rho));
  return JointBehavior({"W0"}, std::move(local), std::move(remote),
                       std::move(table));
}

CollapsedState collapsed_remote_state(const BipartiteSetup& s, std::size_t d,
                                      std::size_t j, double tau_zero) {
  if (d >= s.remote_measurements.size())
    throw IndexError("remote measurement index out of range");
  const auto& m = s.remote_measurements[d];
  if (j >= m.projectors.size())
    throw IndexError("remote outcome index out of range");
  const MatrixXcd big =
      kron(MatrixXcd::Identity(s.dim_a, s.dim_a), m.projectors[j]);
  const double c = re_trace(big, s.state.rho);
  if (c <= tau_zero) {
    std::ostringstream msg;
    msg << "remote outcome probability " << c << " is not positive";
    throw ConditioningError(msg.str());
  }
  const MatrixXcd collapsed = big * s.state.rho * big;
  DensityMatrix out{partial_trace_remote(collapsed, s.dim_a, s.dim_b) / c};
  return CollapsedState{c, std::move(out)};
}

Behavior behavior_from_state(const DensityMatrix& rho,
                             const std::vector<ProjectiveMeasurement>& menus,
                             const std::string& prep) {
  std::vector<Context> contexts;
  std::vector<double> table;
  for (const auto& m : menus) {
    check_dim(m, rho.dim(), "menu");
    contexts.push_back({m.name, m.outcomes.labels.empty()
                                    ? default_labels(m.projectors.size())
                                    : m.outcomes});
    for (const auto& p : m.projectors)
      table.push_back(re_trace(p, rho.rho));
  }
  return Behavior({prep}, std::move(contexts), std::move(table));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) =
          a(r, c) * b;
  return out;
}

Eigen::MatrixXcd partial_trace_remote(const Eigen::MatrixXcd& m,
                                      std::size_t d_a, std::size_t d_b) {
  const auto da = static_cast<Eigen::Index>(d_a);
  const auto db = static_cast<Eigen::Index>(d_b);
  if (m.rows() != da * db || m.cols() != da * db)
    throw ShapeError("matrix does not factor as d_A*d_B");
  MatrixXcd out = MatrixXcd::Zero(da, da);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index ap = 0; ap < da; ++ap)
      for (Eigen::Index b = 0; b < db; ++b)
        out(a, ap) += m(a * db + b, ap * db + b);
  return out;
}

ProjectiveMeasurement basis_measurement(const std::string& name,
                                        const Eigen::MatrixXcd& unitary) {
  if (unitary.rows() != unitary.cols())
    throw ShapeError("basis matrix must be square");
  ProjectiveMeasurement m;
  m.name = name;
  const auto d = static_cast<std::size_t>(unitary.cols());
  m.outcomes = default_labels(d);
  for (std::size_t k = 0; k < d; ++k) {
    const VectorXcd v = unitary.col(static_cast<Eigen::Index>(k));
    m.projectors.push_back(v * v.adjoint());
  }
  return m;
}

Eigen::MatrixXcd computational_basis(std::size_t d) {
  return MatrixXcd::Identity(static_cast<Eigen::Index>(d),
                             static_cast<Eigen::Index>(d));
}

Eigen::MatrixXcd fourier_basis(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  MatrixXcd out(n, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const double phase = 2.0 * std::numbers::pi *
                           static_cast<double>(r) * static_cast<double>(c) /
                           static_cast<double>(d);
      out(r, c) = norm * cplx(std::cos(phase), std::sin(phase));
    }
  return out;
}

Eigen::MatrixXcd random_unitary(std::size_t d, std::mt19937_64& g) {
  const auto n = static_cast<Eigen::Index>(d);
  MatrixXcd gin(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const double re = normal01(g);
      const double im = normal01(g);
      gin(r, c) = cplx(re, im);
    }
  Eigen::HouseholderQR<MatrixXcd> qr(gin);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(n, n);
  const MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx rkk = r(k, k);
    const double mag = std::abs(rkk);
    if (mag > 0.0) q.col(k) *= rkk / mag;
  }
  return q;
}

DensityMatrix random_pure(std::size_t d, std::mt19937_64& g) {
  const auto n = static_cast<Eigen::Index>(d);
  VectorXcd psi(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double re = normal01(g);
    const double im = normal01(g);
    psi(k) = cplx(re, im);
  }
  const double norm = psi.norm();
  if (norm <= 0.0) {
    psi.setZero();
    psi(0) = 1.0;
  } else {
    psi /= norm;
  }
  return DensityMatrix{psi * psi.adjoint()};
}

DensityMatrix random_density(std::size_t d, std::mt19937_64& g) {
  const auto n = static_cast<Eigen::Index>(d);
  MatrixXcd gin(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const double re = normal01(g);
      const double im = normal01(g);
      gin(r, c) = cplx(re, im);
    }
  MatrixXcd rho = gin * gin.adjoint();
  const double tr = rho.trace().real();
  if (tr <= 0.0) return DensityMatrix{MatrixXcd::Identity(n, n) / double(d)};
  return DensityMatrix{rho / tr};
}

DensityMatrix singlet_state() {
  VectorXcd psi = VectorXcd::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  psi(1) = s;   // |01>
  psi(2) = -s;  // |10>
  return DensityMatrix{psi * psi.adjoint()};
}

BipartiteSetup random_setup(std::size_t d_a, std::size_t d_b,
                            std::size_t n_local, std::size_t n_remote,
                            std::mt19937_64& g) {
  BipartiteSetup s;
  s.dim_a = d_a;
  s.dim_b = d_b;
  s.state = random_density(d_a * d_b, g);
  for (std::size_t k = 0; k < n_local; ++k)
    s.local_measurements.push_back(
        basis_measurement("E" + std::to_string(k), random_unitary(d_a, g)));
  for (std::size_t k = 0; k < n_remote; ++k)
    s.remote_measurements.push_back(
        basis_measurement("D" + std::to_string(k), random_unitary(d_b, g)));
  return s;
}

}  // namespace nosig
