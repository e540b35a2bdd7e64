#pragma once

#include <Eigen/Dense>
#include <utility>

#include "magnomech/lindyn.hpp"

namespace magnomech {

using Mat4 = Eigen::Matrix4d;

/// Two-mode covariance matrix in block form [[X, Z], [Zᵀ, Y]], ordering
/// (X_1, P_1, X_2, P_2).
struct TwoModeCM {
  Mat4 C;
  Eigen::Matrix2d X() const { return C.topLeftCorner<2, 2>(); }
  Eigen::Matrix2d Y() const { return C.bottomRightCorner<2, 2>(); }
  Eigen::Matrix2d Z() const { return C.topRightCorner<2, 2>(); }
};

struct MeasureSet {
  double E_dd = 0.0;       // logarithmic negativity (natural log)
  double purity = 0.0;     // 1/(4√det C)
  double S_c = 0.0;        // complete synchronization
  double S_p = 0.0;        // phase synchronization
  double nu_minus = 0.0;   // smallest PT symplectic eigenvalue
  double min_symplectic = 0.0;  // physicality of the extracted 4×4
};

/// Principal 4×4 submatrix for a mode pair (default: the two magnons).
TwoModeCM extract_two_mode(const Mat16& C, std::pair<int, int> mode_pair = {0, 1});

/// E = max(0, −ln 2μ⁻) with μ⁻ = sqrt((Γ − sqrt(Γ² − 4 det C))/2),
/// Γ = det X + det Y − 2 det Z. Discriminants in [−1e−12, 0) are clamped to
/// zero; anything lower throws NumericalError (unphysical input).
double log_negativity(const TwoModeCM& cm);
double ptranspose_symplectic_min(const TwoModeCM& cm);

/// P = 1/(4√det C); 1 for pure states.
double purity(const TwoModeCM& cm);

/// S_c = 1/⟨δX_−² + δP_−²⟩ with δX_− = (X_1 − X_2)/√2 etc.
double complete_sync(const TwoModeCM& cm);

/// S_p = 1/(2⟨δP_−²⟩); values above 1 signal squeezed difference fluctuations.
double phase_sync(const TwoModeCM& cm);

/// Magnon-block measures of a full covariance matrix in one pass.
MeasureSet measure_all(const Mat16& C);

}  // namespace magnomech
