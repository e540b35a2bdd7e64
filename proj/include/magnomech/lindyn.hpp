#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <vector>

#include "magnomech/config.hpp"

namespace magnomech {

inline constexpr int kDim = 16;
using Mat16 = Eigen::Matrix<double, kDim, kDim>;

/// Fixed quadrature ordering of the 16-dimensional fluctuation vector:
///   [X_d1, P_d1, X_d2, P_d2, q1, p1, q2, p2,
///    X_a1, P_a1, X_a2, P_a2, X_c1, P_c1, X_c2, P_c2]
/// Modes are indexed 0..7 in the order d1, d2, b1, b2, a1, a2, c1, c2;
/// mode m occupies rows/columns (2m, 2m+1).
const std::array<const char*, kDim>& quadrature_names();

struct LinearModel {
  Mat16 K;  // drift
  Mat16 L;  // diffusion (diagonal)
};

/// Drift matrix of the linearized dynamics for per-site couplings G.
/// With full_linearization set, the phonon back-action −G_j·q_j is added to
/// the X_dj row (absent from the equations of motion as printed otherwise).
Mat16 assemble_drift(const SystemConfig& config, const std::array<double, 2>& G);

/// Diagonal diffusion matrix; occupations evaluated at each mode's absolute
/// frequency. Entries at the q positions are exactly zero.
Mat16 assemble_diffusion(const SystemConfig& config);

LinearModel assemble_model(const SystemConfig& config, const std::array<double, 2>& G);

struct StabilityReport {
  std::array<std::complex<double>, kDim> eigenvalues{};
  double max_real_part = 0.0;
  bool stable = false;
};

/// Eigenvalues of the dense nonsymmetric drift matrix (balanced
/// Hessenberg-QR); stable iff every real part is negative.
StabilityReport stability(const Mat16& K);

struct SteadySolution {
  Mat16 C;
  double residual = 0.0;  // ‖KC + CKᵀ + L‖_F / ‖L‖_F
};

/// Steady covariance from K C + C Kᵀ + L = 0 via Kronecker vectorization and
/// dense LU. When the drift carries no phonon→mode feedback (the default
/// linearization) the solve proceeds blockwise through that triangular
/// structure, which keeps exactly-decoupled blocks exact.
/// Throws InstabilityError when K is unstable.
SteadySolution steady_covariance(const Mat16& K, const Mat16& L);

/// Independent Bartels–Stewart route (complex Schur reduction followed by
/// triangular back-substitution). Used as the cross-check oracle.
SteadySolution steady_covariance_schur(const Mat16& K, const Mat16& L);

/// Integrate Ċ = K C + C Kᵀ + L with fixed-step classical RK4, sampling at
/// t_grid (strictly increasing, t_grid[0] == 0 where C(0) = C0). The step
/// obeys h ≤ 0.05/rate_bound; rate_bound defaults to ‖K‖_∞ + |K(4,5)|
/// (the q̇ row carries the mechanical frequency in the fixed ordering).
/// Symmetry is enforced each step. Throws NumericalError on NaN.
std::vector<Mat16> evolve_covariance(const Mat16& K, const Mat16& L,
                                     const Mat16& C0,
                                     std::span<const double> t_grid,
                                     double rate_bound = 0.0);

/// Minimum symplectic eigenvalue, min |eig(iΩ_s C)|; physical Gaussian
/// states satisfy ≥ 1/2. C must be symmetric with even dimension.
double physicality_check(const Eigen::MatrixXd& C);

/// Vacuum covariance (1/2)·I in this quadrature convention.
Mat16 vacuum_covariance();

}  // namespace magnomech
