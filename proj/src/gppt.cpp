#include "relclock/gppt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relclock::gppt {

using qcore::Complex;
using qcore::DensityMatrix;
using qcore::Ket;
using qcore::Operator;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

int amplitude_index(int j, int k) {
  if ((j != 3 && j != 4) || (k != 1 && k != 2)) throw std::invalid_argument("invalid detector indices");
  const int clock = (k == 1) ? 0 : 1;  // H path fires detector 1
  const int rest = (j == 3) ? 1 : 0;   // V fires detector 3
  return 2 * clock + rest;
}

void check_nodes(int n_nodes) {
  if (n_nodes < kMinNodes) throw std::invalid_argument("quadrature needs at least 64 nodes");
}

void check_params(double tau, double omega) {
  if (!std::isfinite(tau)) throw std::invalid_argument("tau must be finite");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be > 0");
}

// Clock-outcome projector |k><k|_c ⊗ 1 and the joint projector
// |k><k|_c ⊗ |V><V|_r of the detector map.
Operator clock_projector(int k) {
  const Ket basis = Ket::basis_state(2, k == 1 ? 0 : 1);
  return tensor(Operator::dyad(basis), Operator::identity(2));
}

Operator joint_projector(int j, int k) {
  const Ket clock = Ket::basis_state(2, k == 1 ? 0 : 1);
  const Ket rest = Ket::basis_state(2, j == 3 ? 1 : 0);
  return tensor(Operator::dyad(clock), Operator::dyad(rest));
}

double trace_product(const Operator& a, const DensityMatrix& rho) {
  Complex s(0.0, 0.0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) s += a.entry(r, c) * rho.entry(c, r);
  return s.real();
}

}  // namespace

Ket projected_initial_state() { return Ket::basis_state(4, qcore::kHV); }

Ket global_state_T(double T, double tau, double omega) {
  check_params(tau, omega);
  if (!std::isfinite(T)) throw std::invalid_argument("T must be finite");
  const double a = omega * (T + tau);
  const double b = omega * T;
  const Ket clock = Ket::normalized({Complex(std::cos(a), 0.0), Complex(-std::sin(a), 0.0)});
  const Ket rest = Ket::normalized({Complex(std::sin(b), 0.0), Complex(std::cos(b), 0.0)});
  return tensor(clock, rest);
}

double joint_prob_quadrature(int j, int k, double tau, int n_nodes, double omega) {
  const int idx = amplitude_index(j, k);
  check_nodes(n_nodes);
  check_params(tau, omega);
  KahanSum acc;
  for (int i = 0; i < n_nodes; ++i) {
    const double phi = kTwoPi * static_cast<double>(i) / static_cast<double>(n_nodes);
    const Ket psi = global_state_T(phi / omega, tau, omega);
    acc.add(std::norm(psi.amplitude(idx)));
  }
  return acc.value() / static_cast<double>(n_nodes);
}

double joint_prob_closed(int j, int k, double tau, double omega) {
  const int idx = amplitude_index(j, k);
  check_params(tau, omega);
  const double c = std::cos(omega * tau);
  const double s = std::sin(omega * tau);
  // |HV> and |VH> carry the cos² pattern, |HH> and |VV> the sin² pattern.
  const bool cos_branch = (idx == qcore::kHV || idx == qcore::kVH);
  return cos_branch ? (1.0 + 2.0 * c * c) / 8.0 : (1.0 + 2.0 * s * s) / 8.0;
}

JointProbTable JointProbTable::quadrature(double tau, int n_nodes, double omega) {
  return JointProbTable{joint_prob_quadrature(3, 1, tau, n_nodes, omega),
                        joint_prob_quadrature(3, 2, tau, n_nodes, omega),
                        joint_prob_quadrature(4, 1, tau, n_nodes, omega),
                        joint_prob_quadrature(4, 2, tau, n_nodes, omega)};
}

JointProbTable JointProbTable::closed(double tau, double omega) {
  return JointProbTable{joint_prob_closed(3, 1, tau, omega), joint_prob_closed(3, 2, tau, omega),
                        joint_prob_closed(4, 1, tau, omega), joint_prob_closed(4, 2, tau, omega)};
}

DensityMatrix time_averaged_state(double tau, int n_nodes, double omega) {
  check_nodes(n_nodes);
  check_params(tau, omega);
  KahanSum re[16], im[16];
  for (int i = 0; i < n_nodes; ++i) {
    const double phi = kTwoPi * static_cast<double>(i) / static_cast<double>(n_nodes);
    const Ket psi = global_state_T(phi / omega, tau, omega);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const Complex z = psi.amplitude(r) * std::conj(psi.amplitude(c));
        re[r * 4 + c].add(z.real());
        im[r * 4 + c].add(z.imag());
      }
  }
  std::vector<Complex> m(16);
  KahanSum trace;
  for (int i = 0; i < 4; ++i) trace.add(re[i * 4 + i].value());
  const double tr = trace.value();
  for (int e = 0; e < 16; ++e) m[static_cast<size_t>(e)] = Complex(re[e].value(), im[e].value()) / tr;
  return DensityMatrix::validated(4, std::move(m));
}

double two_time_conditional(int k, double tau, Route route, int n_nodes, double omega) {
  if (k != 1 && k != 2) throw std::invalid_argument("invalid detector indices");
  double p3k, p4k;
  if (route == Route::Quadrature) {
    p3k = joint_prob_quadrature(3, k, tau, n_nodes, omega);
    p4k = joint_prob_quadrature(4, k, tau, n_nodes, omega);
  } else {
    p3k = joint_prob_closed(3, k, tau, omega);
    p4k = joint_prob_closed(4, k, tau, omega);
  }
  return p3k / (p3k + p4k);
}

double two_time_conditional_via_rhobar(int k, double tau, int n_nodes, double omega) {
  if (k != 1 && k != 2) throw std::invalid_argument("invalid detector indices");
  const DensityMatrix rho_bar = time_averaged_state(tau, n_nodes, omega);
  const double num = trace_product(joint_projector(3, k), rho_bar);
  const double den = trace_product(clock_projector(k), rho_bar);
  return num / den;
}

double one_time_conditional(int k, double tau, int n_nodes, double omega) {
  if (k != 1 && k != 2) throw std::invalid_argument("invalid detector indices");
  check_nodes(n_nodes);
  check_params(tau, omega);
  const DensityMatrix rho0 = DensityMatrix::pure(projected_initial_state());
  const Operator p_joint = joint_projector(3, k);
  const Operator p_clock = clock_projector(k);
  KahanSum num, den;
  for (int i = 0; i < n_nodes; ++i) {
    const double phi = kTwoPi * static_cast<double>(i) / static_cast<double>(n_nodes);
    // Heisenberg projectors P(T) = U_T† P U_T with the clock-delayed
    // evolution U_T = R(ωT+δ) ⊗ R(ωT).
    const Operator u = tensor(qcore::rotation_unitary(phi + omega * tau), qcore::rotation_unitary(phi));
    const Operator ud = u.adjoint();
    num.add(trace_product(ud * p_joint * u, rho0));
    den.add(trace_product(ud * p_clock * u, rho0));
  }
  return num.value() / den.value();
}

double two_time_conditional_double_integral(int k, double tau, int n_nodes, double omega) {
  if (k != 1 && k != 2) throw std::invalid_argument("invalid detector indices");
  check_nodes(n_nodes);
  check_params(tau, omega);
  const paw::PawState singlet = paw::make_singlet(omega);
  const DensityMatrix rho = DensityMatrix::pure(singlet.psi);
  const Operator p_init = clock_projector(1);  // clock projected on the H path
  const Operator p_joint = joint_projector(3, k);
  const Operator p_clock = clock_projector(k);
  const Operator delay = tensor(qcore::rotation_unitary(omega * tau), Operator::identity(2));
  KahanSum num, den;
  for (int ip = 0; ip < n_nodes; ++ip) {
    const double phi_first = kTwoPi * static_cast<double>(ip) / static_cast<double>(n_nodes);
    const Operator u1 = tensor(qcore::rotation_unitary(phi_first), qcore::rotation_unitary(phi_first));
    const Operator projected = p_init * (u1 * rho.as_operator() * u1.adjoint()) * p_init;
    for (int i = 0; i < n_nodes; ++i) {
      const double phi = kTwoPi * static_cast<double>(i) / static_cast<double>(n_nodes);
      const Operator u = delay * tensor(qcore::rotation_unitary(phi), qcore::rotation_unitary(phi));
      const Operator evolved = u * projected * u.adjoint();
      num.add(((p_joint * evolved).trace()).real());
      den.add(((p_clock * evolved).trace()).real());
    }
  }
  return num.value() / den.value();
}

std::vector<CurvePoint> theory_curve(std::span<const double> tau_list,
                                     const paw::ClockParams& clock) {
  std::vector<CurvePoint> out;
  out.reserve(2 * tau_list.size());
  for (double tau : tau_list) {
    out.push_back(CurvePoint{clock.t1 + tau,
                             two_time_conditional(1, tau, Route::Closed, kDefaultNodes, clock.omega),
                             1, tau});
    out.push_back(CurvePoint{clock.t2 + tau,
                             two_time_conditional(2, tau, Route::Closed, kDefaultNodes, clock.omega),
                             2, tau});
  }
  return out;
}

}  // namespace relclock::gppt
