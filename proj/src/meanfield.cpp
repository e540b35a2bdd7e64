#include "magnomech/meanfield.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "magnomech/errors.hpp"

namespace magnomech {

namespace {

using Cplx = std::complex<double>;
using Mat12 = Eigen::Matrix<double, 12, 12>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

// Unknown layout: [a1, a2, c1, c2, d1, d2], each as (Re, Im).
enum : int { kA1, kA2, kC1, kC2, kD1, kD2 };

// Coefficient z acting on variable w (or on conj(w)) as a 2x2 real block.
void add_block(Mat12& A, int eq, int var, Cplx z, bool conj = false) {
  int r = 2 * eq, c = 2 * var;
  double x = z.real(), y = z.imag();
  if (!conj) {
    A(r, c) += x;     A(r, c + 1) += -y;
    A(r + 1, c) += y; A(r + 1, c + 1) += x;
  } else {
    A(r, c) += x;     A(r, c + 1) += y;
    A(r + 1, c) += y; A(r + 1, c + 1) += -x;
  }
}

struct Solved {
  std::array<Cplx, 6> z;  // a1, a2, c1, c2, d1, d2
  double rcond = 0.0;
};

// One pass of the linear fixed-point solve at a given magnon detuning
// (delta_d may carry the folded mean shift).
Solved solve_linear(const SystemConfig& cfg, double delta_d, double Omega, double E) {
  const Cplx i(0.0, 1.0);
  Mat12 A = Mat12::Zero();
  Vec12 b = Vec12::Zero();

  Cplx pole_a = -(i * cfg.delta_a + cfg.kappa_a);
  Cplx pole_c = -(i * cfg.delta_c + cfg.kappa_c);
  Cplx pole_d = -(i * delta_d + cfg.kappa_d);
  Cplx hop_a = i * cfg.J_a;
  Cplx hop_c = i * cfg.J_c;
  Cplx sq = 2.0 * cfg.lambda * std::exp(i * cfg.theta);

  // Cavity drive E enters site 1 of both cavity chains.
  add_block(A, kA1, kA1, pole_a);
  add_block(A, kA1, kD1, -i * cfg.g_a);
  add_block(A, kA1, kA2, hop_a);
  b(2 * kA1 + 1) = E;  // i*E on the right-hand side

  add_block(A, kA2, kA2, pole_a);
  add_block(A, kA2, kD2, -i * cfg.g_a);
  add_block(A, kA2, kA1, hop_a);

  add_block(A, kC1, kC1, pole_c);
  add_block(A, kC1, kD1, -i * cfg.g_c);
  add_block(A, kC1, kC2, hop_c);
  b(2 * kC1 + 1) = E;

  add_block(A, kC2, kC2, pole_c);
  add_block(A, kC2, kD2, -i * cfg.g_c);
  add_block(A, kC2, kC1, hop_c);

  for (int j = 0; j < 2; ++j) {
    int d = kD1 + j;
    add_block(A, d, d, pole_d);
    add_block(A, d, kA1 + j, -i * cfg.g_a);
    add_block(A, d, kC1 + j, -i * cfg.g_c);
    add_block(A, d, d, sq, /*conj=*/true);
    b(2 * d) = -Omega;  // both magnons are driven
  }

  Eigen::PartialPivLU<Mat12> lu(A);
  double rc = lu.rcond();
  if (!(rc > 16 * std::numeric_limits<double>::epsilon()))
    throw NumericalError(
        "mean-field system is singular (reciprocal condition estimate " +
        std::to_string(rc) + ")");
  Vec12 x = lu.solve(b);

  Solved out;
  out.rcond = rc;
  for (int k = 0; k < 6; ++k) out.z[k] = Cplx(x(2 * k), x(2 * k + 1));
  return out;
}

// Relative residual of Eq.-of-motion lines at the solution, against the
// largest term magnitude appearing in any line.
double relative_residual(const SystemConfig& cfg, double delta_d, double Omega,
                         double E, const std::array<Cplx, 6>& z) {
  const Cplx i(0.0, 1.0);
  Cplx a[2] = {z[kA1], z[kA2]}, c[2] = {z[kC1], z[kC2]}, d[2] = {z[kD1], z[kD2]};
  double max_term = 0.0, max_res = 0.0;
  auto track = [&](std::initializer_list<Cplx> terms) {
    Cplx sum(0.0, 0.0);
    for (Cplx t : terms) {
      sum += t;
      max_term = std::max(max_term, std::abs(t));
    }
    max_res = std::max(max_res, std::abs(sum));
  };
  Cplx sq = 2.0 * cfg.lambda * std::exp(i * cfg.theta);
  for (int j = 0; j < 2; ++j) {
    int s = 1 - j;
    track({-(i * cfg.delta_a + cfg.kappa_a) * a[j], -i * cfg.g_a * d[j],
           i * cfg.J_a * a[s], j == 0 ? Cplx(0, -E) : Cplx(0, 0)});
    track({-(i * cfg.delta_c + cfg.kappa_c) * c[j], -i * cfg.g_c * d[j],
           i * cfg.J_c * c[s], j == 0 ? Cplx(0, -E) : Cplx(0, 0)});
    track({-(i * delta_d + cfg.kappa_d) * d[j], -i * cfg.g_a * a[j],
           -i * cfg.g_c * c[j], sq * std::conj(d[j]), Cplx(Omega, 0)});
  }
  return max_term > 0.0 ? max_res / max_term : max_res;
}

}  // namespace

OperatingPoint solve_operating_point(const SystemConfig& cfg) {
  if (!cfg.drive)
    throw Error(ErrorCode::validation,
                "solve_operating_point requires a [drive] section");
  const DriveSpec& drv = *cfg.drive;
  double Omega = drv.rabi();
  double E = drv.E;
  double g_db = drv.g_db_bare;

  double delta_d = cfg.delta_d;
  Solved sol = solve_linear(cfg, delta_d, Omega, E);

  if (cfg.fold_mean_shift) {
    // Self-consistent loop: the displacement shifts the magnon detuning by
    // g_db*<q>. Converges in a few rounds since the shift is tiny.
    for (int it = 0; it < 64; ++it) {
      double q = -g_db * std::norm(sol.z[kD1]) / cfg.omega_b;
      double next = cfg.delta_d + g_db * q;
      if (std::abs(next - delta_d) <= 1e-12 * std::max(1.0, std::abs(delta_d))) {
        delta_d = next;
        break;
      }
      delta_d = next;
      sol = solve_linear(cfg, delta_d, Omega, E);
    }
    sol = solve_linear(cfg, delta_d, Omega, E);
  }

  OperatingPoint op;
  op.a = {sol.z[kA1], sol.z[kA2]};
  op.c = {sol.z[kC1], sol.z[kC2]};
  op.d = {sol.z[kD1], sol.z[kD2]};
  for (int j = 0; j < 2; ++j) {
    op.q[j] = -g_db * std::norm(op.d[j]) / cfg.omega_b;
    op.G[j] = std::complex<double>(0.0, 1.0) * std::sqrt(2.0) * g_db * op.d[j];
  }
  op.rcond = sol.rcond;
  op.residual = relative_residual(cfg, delta_d, Omega, E, sol.z);
  return op;
}

EffectiveCoupling effective_coupling(const OperatingPoint& op) {
  EffectiveCoupling ec;
  for (int j = 0; j < 2; ++j) {
    ec.magnitude[j] = std::abs(op.G[j]);
    ec.discarded_phase[j] = ec.magnitude[j] > 0.0 ? std::arg(op.G[j]) : 0.0;
  }
  return ec;
}

std::string operating_point_json(const OperatingPoint& op) {
  std::ostringstream o;
  o.precision(17);
  auto cplx = [&](const std::complex<double>& z) {
    std::ostringstream s;
    s.precision(17);
    s << "[" << z.real() << ", " << z.imag() << "]";
    return s.str();
  };
  o << "{\n";
  o << "  \"a\": [" << cplx(op.a[0]) << ", " << cplx(op.a[1]) << "],\n";
  o << "  \"c\": [" << cplx(op.c[0]) << ", " << cplx(op.c[1]) << "],\n";
  o << "  \"d\": [" << cplx(op.d[0]) << ", " << cplx(op.d[1]) << "],\n";
  o << "  \"q\": [" << op.q[0] << ", " << op.q[1] << "],\n";
  o << "  \"G\": [" << cplx(op.G[0]) << ", " << cplx(op.G[1]) << "],\n";
  o << "  \"residual\": " << op.residual << ",\n";
  o << "  \"rcond\": " << op.rcond << "\n";
  o << "}\n";
  return o.str();
}

}  // namespace magnomech
