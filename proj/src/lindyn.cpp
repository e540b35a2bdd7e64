#include "magnomech/lindyn.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "magnomech/errors.hpp"

namespace magnomech {

namespace {

// Quadrature indices for site j in {0, 1}.
inline int iXd(int j) { return 2 * j; }
inline int iPd(int j) { return 2 * j + 1; }
inline int iQ(int j) { return 4 + 2 * j; }
inline int iP(int j) { return 5 + 2 * j; }
inline int iXa(int j) { return 8 + 2 * j; }
inline int iPa(int j) { return 9 + 2 * j; }
inline int iXc(int j) { return 12 + 2 * j; }
inline int iPc(int j) { return 13 + 2 * j; }

// Mode rows (d, a, c) and phonon rows; the default linearization has no
// phonon -> mode feedback, which steady_covariance exploits.
constexpr std::array<int, 12> kModeIdx = {0, 1, 2, 3, 8, 9, 10, 11, 12, 13, 14, 15};
constexpr std::array<int, 4> kPhononIdx = {4, 5, 6, 7};

Eigen::MatrixXd gather(const Mat16& M, const int* rows, int nr, const int* cols,
                       int nc) {
  Eigen::MatrixXd out(nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) out(i, j) = M(rows[i], cols[j]);
  return out;
}

// Solve A X + X B^T = Q by Kronecker vectorization, (I (x) A + B (x) I) vec(X)
// = vec(Q), dense LU. A zero right-hand side yields an exactly zero X.
Eigen::MatrixXd sylvester_kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               const Eigen::MatrixXd& Q) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.rows());
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n * m, n * m);
  for (int k = 0; k < m; ++k) S.block(k * n, k * n, n, n) = A;
  for (int kc = 0; kc < m; ++kc)
    for (int kr = 0; kr < m; ++kr)
      S.block(kr * n, kc * n, n, n).diagonal().array() += B(kr, kc);
  Eigen::Map<const Eigen::VectorXd> q(Q.data(), n * m);
  Eigen::VectorXd x = S.partialPivLu().solve(q);
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), n, m);
}

Eigen::MatrixXd lyapunov_kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  return sylvester_kron(A, A, Q);
}

double relative_residual(const Mat16& K, const Mat16& L, const Mat16& C) {
  double num = (K * C + C * K.transpose() + L).norm();
  double den = L.norm();
  return den > 0.0 ? num / den : num;
}

}  // namespace

const std::array<const char*, kDim>& quadrature_names() {
  static const std::array<const char*, kDim> names = {
      "X_d1", "P_d1", "X_d2", "P_d2", "q1", "p1", "q2", "p2",
      "X_a1", "P_a1", "X_a2", "P_a2", "X_c1", "P_c1", "X_c2", "P_c2"};
  return names;
}

Mat16 assemble_drift(const SystemConfig& c, const std::array<double, 2>& G) {
  Mat16 K = Mat16::Zero();
  const double sq_x = 2.0 * c.lambda * std::cos(c.theta);
  const double sq_p = 2.0 * c.lambda * std::sin(c.theta);
  for (int j = 0; j < 2; ++j) {
    const int s = 1 - j;
    // magnon
    K(iXd(j), iXd(j)) = sq_x - c.kappa_d;
    K(iXd(j), iPd(j)) = c.delta_d + sq_p;
    K(iXd(j), iPa(j)) = c.g_a;
    K(iXd(j), iPc(j)) = c.g_c;
    if (c.full_linearization) K(iXd(j), iQ(j)) = -G[j];
    K(iPd(j), iXd(j)) = sq_p - c.delta_d;
    K(iPd(j), iPd(j)) = -(sq_x + c.kappa_d);
    K(iPd(j), iXa(j)) = -c.g_a;
    K(iPd(j), iXc(j)) = -c.g_c;
    // phonon
    K(iQ(j), iP(j)) = c.omega_b;
    K(iP(j), iQ(j)) = -c.omega_b;
    K(iP(j), iP(j)) = -c.gamma_b;
    K(iP(j), iPd(j)) = G[j];
    // a cavity
    K(iXa(j), iXa(j)) = -c.kappa_a;
    K(iXa(j), iPa(j)) = c.delta_a;
    K(iXa(j), iPd(j)) = c.g_a;
    K(iXa(j), iPa(s)) = -c.J_a;
    K(iPa(j), iXa(j)) = -c.delta_a;
    K(iPa(j), iPa(j)) = -c.kappa_a;
    K(iPa(j), iXd(j)) = -c.g_a;
    K(iPa(j), iXa(s)) = c.J_a;
    // c cavity
    K(iXc(j), iXc(j)) = -c.kappa_c;
    K(iXc(j), iPc(j)) = c.delta_c;
    K(iXc(j), iPd(j)) = c.g_c;
    K(iXc(j), iPc(s)) = -c.J_c;
    K(iPc(j), iXc(j)) = -c.delta_c;
    K(iPc(j), iPc(j)) = -c.kappa_c;
    K(iPc(j), iXd(j)) = -c.g_c;
    K(iPc(j), iXc(s)) = c.J_c;
  }
  return K;
}

Mat16 assemble_diffusion(const SystemConfig& c) {
  const double Nd = c.occupation_d();
  const double Na = c.occupation_a();
  const double Nc = c.occupation_c();
  const double nb = c.occupation_b();
  Mat16 L = Mat16::Zero();
  for (int j = 0; j < 2; ++j) {
    L(iXd(j), iXd(j)) = c.kappa_d * (1.0 + 2.0 * Nd);
    L(iPd(j), iPd(j)) = c.kappa_d * (1.0 + 2.0 * Nd);
    L(iQ(j), iQ(j)) = 0.0;
    L(iP(j), iP(j)) = c.gamma_b * (1.0 + 2.0 * nb);
    L(iXa(j), iXa(j)) = c.kappa_a * (1.0 + 2.0 * Na);
    L(iPa(j), iPa(j)) = c.kappa_a * (1.0 + 2.0 * Na);
    L(iXc(j), iXc(j)) = c.kappa_c * (1.0 + 2.0 * Nc);
    L(iPc(j), iPc(j)) = c.kappa_c * (1.0 + 2.0 * Nc);
  }
  return L;
}

LinearModel assemble_model(const SystemConfig& config, const std::array<double, 2>& G) {
  config.validate();
  return {assemble_drift(config, G), assemble_diffusion(config)};
}

StabilityReport stability(const Mat16& K) {
  if (!K.allFinite())
    throw NumericalError("stability: drift matrix has non-finite entries");
  Eigen::EigenSolver<Mat16> es(K, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericalError("stability: eigenvalue iteration did not converge");
  StabilityReport rep;
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDim; ++i) {
    rep.eigenvalues[i] = es.eigenvalues()(i);
    max_re = std::max(max_re, rep.eigenvalues[i].real());
  }
  rep.max_real_part = max_re;
  rep.stable = max_re < 0.0;
  return rep;
}

SteadySolution steady_covariance(const Mat16& K, const Mat16& L) {
  StabilityReport rep = stability(K);
  if (!rep.stable) throw InstabilityError(rep.max_real_part);
  if (L.norm() == 0.0) return {Mat16::Zero(), 0.0};  // unique solution is 0

  bool triangular = true;
  for (int i : kModeIdx) {
    for (int j : kPhononIdx)
      if (K(i, j) != 0.0) {
        triangular = false;
        break;
      }
    if (!triangular) break;
  }

  // Solve for the deviation D = C - (1/2)I. The vacuum-point residual
  // R = sym(K) + L cancels exactly on passive blocks, so exactly-decoupled
  // subsystems come out exactly at vacuum through the triangular path.
  Mat16 R = 0.5 * (K + K.transpose()) + L;
  Mat16 D = Mat16::Zero();

  if (triangular) {
    auto A = gather(K, kModeIdx.data(), 12, kModeIdx.data(), 12);
    auto B = gather(K, kPhononIdx.data(), 4, kModeIdx.data(), 12);
    auto M = gather(K, kPhononIdx.data(), 4, kPhononIdx.data(), 4);
    auto Ruu = gather(R, kModeIdx.data(), 12, kModeIdx.data(), 12);
    auto Ruv = gather(R, kModeIdx.data(), 12, kPhononIdx.data(), 4);
    auto Rvv = gather(R, kPhononIdx.data(), 4, kPhononIdx.data(), 4);

    Eigen::MatrixXd Duu = lyapunov_kron(A, -Ruu);
    Eigen::MatrixXd Duv =
        sylvester_kron(A, M, (-(Ruv + Duu * B.transpose())).eval());
    Eigen::MatrixXd BDuv = B * Duv;
    Eigen::MatrixXd Dvv =
        lyapunov_kron(M, (-(Rvv + BDuv + BDuv.transpose())).eval());

    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) D(kModeIdx[i], kModeIdx[j]) = Duu(i, j);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 4; ++j) {
        D(kModeIdx[i], kPhononIdx[j]) = Duv(i, j);
        D(kPhononIdx[j], kModeIdx[i]) = Duv(i, j);
      }
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) D(kPhononIdx[i], kPhononIdx[j]) = Dvv(i, j);
  } else {
    D = lyapunov_kron(K, -R);
  }

  Mat16 C = 0.5 * Mat16::Identity() + D;
  C = (0.5 * (C + C.transpose())).eval();
  return {C, relative_residual(K, L, C)};
}

SteadySolution steady_covariance_schur(const Mat16& K, const Mat16& L) {
  using Cx = std::complex<double>;
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(K.cast<Cx>(), /*computeU=*/true);
  if (schur.info() != Eigen::Success)
    throw NumericalError("steady_covariance_schur: Schur iteration failed");
  const Eigen::MatrixXcd& T = schur.matrixT();
  const Eigen::MatrixXcd& U = schur.matrixU();

  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDim; ++i) max_re = std::max(max_re, T(i, i).real());
  if (max_re >= 0.0) throw InstabilityError(max_re);
  if (L.norm() == 0.0) return {Mat16::Zero(), 0.0};

  // T C' + C' T^T = -L' in Schur coordinates, back-substituted columnwise
  // from the last column.
  Eigen::MatrixXcd Lp = U.adjoint() * L.cast<Cx>() * U.conjugate();
  Eigen::MatrixXcd Cp = Eigen::MatrixXcd::Zero(kDim, kDim);
  for (int k = kDim - 1; k >= 0; --k) {
    Eigen::VectorXcd rhs = -Lp.col(k);
    for (int j = k + 1; j < kDim; ++j) rhs -= T(k, j) * Cp.col(j);
    Eigen::MatrixXcd Tk = T;
    Tk.diagonal().array() += T(k, k);
    Cp.col(k) = Tk.triangularView<Eigen::Upper>().solve(rhs);
  }
  Mat16 C = (U * Cp * U.transpose()).real();
  C = (0.5 * (C + C.transpose())).eval();
  return {C, relative_residual(K, L, C)};
}

std::vector<Mat16> evolve_covariance(const Mat16& K, const Mat16& L,
                                     const Mat16& C0,
                                     std::span<const double> t_grid,
                                     double rate_bound) {
  if (t_grid.empty() || t_grid[0] != 0.0)
    throw Error(ErrorCode::validation, "evolve_covariance: t_grid must start at 0");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw Error(ErrorCode::validation,
                  "evolve_covariance: t_grid must be strictly increasing");
  if (rate_bound <= 0.0)
    rate_bound = K.cwiseAbs().rowwise().sum().maxCoeff() + std::abs(K(4, 5));

  const double h_max = rate_bound > 0.0
                           ? 0.05 / rate_bound
                           : std::numeric_limits<double>::infinity();

  std::vector<Mat16> out;
  out.reserve(t_grid.size());
  Mat16 C = (0.5 * (C0 + C0.transpose())).eval();
  out.push_back(C);

  auto deriv = [&](const Mat16& X) -> Mat16 { return K * X + X * K.transpose() + L; };

  for (size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    const double steps = std::ceil(dt / h_max);
    if (!(steps < 1e9))
      throw NumericalError("evolve_covariance: step size underflow on interval " +
                           std::to_string(i));
    const int n = std::max(1, static_cast<int>(steps));
    const double h = dt / n;
    for (int s = 0; s < n; ++s) {
      Mat16 k1 = deriv(C);
      Mat16 k2 = deriv(C + 0.5 * h * k1);
      Mat16 k3 = deriv(C + 0.5 * h * k2);
      Mat16 k4 = deriv(C + h * k3);
      C += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      C = (0.5 * (C + C.transpose())).eval();
      if (!C.allFinite())
        throw NumericalError(
            "evolve_covariance: non-finite covariance near t = " +
            std::to_string(t_grid[i - 1] + (s + 1) * h) + " s");
    }
    out.push_back(C);
  }
  return out;
}

double physicality_check(const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(C.rows());
  if (C.cols() != n || n % 2 != 0)
    throw Error(ErrorCode::validation,
                "physicality_check: matrix must be square with even dimension");
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
  for (int m = 0; m < n / 2; ++m) {
    omega(2 * m, 2 * m + 1) = 1.0;
    omega(2 * m + 1, 2 * m) = -1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(omega * C, false);
  if (es.info() != Eigen::Success)
    throw NumericalError("physicality_check: eigenvalue iteration failed");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) best = std::min(best, std::abs(es.eigenvalues()(i)));
  return best;
}

Mat16 vacuum_covariance() { return 0.5 * Mat16::Identity(); }

}  // namespace magnomech
