#include "magnomech/measures.hpp"

#include <cmath>

#include "magnomech/errors.hpp"

namespace magnomech {

namespace {

constexpr double kDiscriminantSlack = 1e-12;

double det2(const Eigen::Matrix2d& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

double var_x_minus(const Mat4& C) { return 0.5 * (C(0, 0) + C(2, 2) - 2.0 * C(0, 2)); }
double var_p_minus(const Mat4& C) { return 0.5 * (C(1, 1) + C(3, 3) - 2.0 * C(1, 3)); }

}  // namespace

TwoModeCM extract_two_mode(const Mat16& C, std::pair<int, int> mode_pair) {
  auto [m1, m2] = mode_pair;
  if (m1 < 0 || m1 >= kDim / 2 || m2 < 0 || m2 >= kDim / 2 || m1 == m2)
    throw Error(ErrorCode::validation,
                "extract_two_mode: mode indices must be distinct and in [0, 8)");
  TwoModeCM cm;
  const int r[4] = {2 * m1, 2 * m1 + 1, 2 * m2, 2 * m2 + 1};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) cm.C(i, j) = C(r[i], r[j]);
  return cm;
}

double ptranspose_symplectic_min(const TwoModeCM& cm) {
  const double gamma = det2(cm.X()) + det2(cm.Y()) - 2.0 * det2(cm.Z());
  const double det_c = cm.C.determinant();
  double disc = gamma * gamma - 4.0 * det_c;
  if (disc < 0.0) {
    if (disc < -kDiscriminantSlack)
      throw NumericalError(
          "log_negativity: discriminant " + std::to_string(disc) +
          " is negative beyond tolerance (unphysical covariance matrix)");
    disc = 0.0;
  }
  double inner = 0.5 * (gamma - std::sqrt(disc));
  if (inner < 0.0) {
    if (inner < -kDiscriminantSlack)
      throw NumericalError("log_negativity: negative symplectic invariant");
    inner = 0.0;
  }
  return std::sqrt(inner);
}

double log_negativity(const TwoModeCM& cm) {
  const double mu = ptranspose_symplectic_min(cm);
  return std::max(0.0, -std::log(2.0 * mu));
}

double purity(const TwoModeCM& cm) {
  const double det_c = cm.C.determinant();
  if (!(det_c > 0.0))
    throw NumericalError("purity: covariance determinant must be positive");
  return 1.0 / (4.0 * std::sqrt(det_c));
}

double complete_sync(const TwoModeCM& cm) {
  const double total = var_x_minus(cm.C) + var_p_minus(cm.C);
  if (!(total > 0.0))
    throw NumericalError("complete_sync: non-positive difference variance");
  return 1.0 / total;
}

double phase_sync(const TwoModeCM& cm) {
  const double vp = var_p_minus(cm.C);
  if (!(vp > 0.0))
    throw NumericalError("phase_sync: non-positive momentum difference variance");
  return 1.0 / (2.0 * vp);
}

MeasureSet measure_all(const Mat16& C) {
  const TwoModeCM cm = extract_two_mode(C, {0, 1});
  MeasureSet m;
  m.nu_minus = ptranspose_symplectic_min(cm);
  m.E_dd = std::max(0.0, -std::log(2.0 * m.nu_minus));
  m.purity = purity(cm);
  m.S_c = complete_sync(cm);
  m.S_p = phase_sync(cm);
  m.min_symplectic = physicality_check(cm.C);
  return m;
}

}  // namespace magnomech
