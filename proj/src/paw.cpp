#include "relclock/paw.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relclock::paw {

using qcore::Complex;
using qcore::Ket;
using qcore::Operator;

ClockParams ClockParams::make(double omega, double t1) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be > 0");
  if (!std::isfinite(t1)) throw std::invalid_argument("t1 must be finite");
  return ClockParams{omega, t1, t1 + std::numbers::pi / (2.0 * omega)};
}

PawState make_singlet(double omega, double t1) {
  const double r = 1.0 / std::numbers::sqrt2;
  Ket psi = Ket::normalized({Complex(0.0, 0.0), Complex(r, 0.0), Complex(-r, 0.0), Complex(0.0, 0.0)});
  return PawState{std::move(psi), ClockParams::make(omega, t1)};
}

PawState prepare_state(double theta, double phi, bool swap_rest, double omega, double t1) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) throw std::invalid_argument("state angles must be finite");
  const Complex a(std::cos(theta), 0.0);
  const Complex b = Complex(std::cos(phi), std::sin(phi)) * std::sin(theta);
  // cosθ|HH> + e^{iφ} sinθ|VV>, then optionally H↔V on the rest letter.
  std::vector<Complex> amps(4, Complex(0.0, 0.0));
  if (swap_rest) {
    amps[qcore::kHV] = a;
    amps[qcore::kVH] = b;
  } else {
    amps[qcore::kHH] = a;
    amps[qcore::kVV] = b;
  }
  return PawState{Ket::normalized(std::move(amps)), ClockParams::make(omega, t1)};
}

namespace {

Operator local_generator(double omega) {
  // i ω (|H><V| - |V><H|)
  return Operator::hermitian(
      2, {Complex(0.0, 0.0), Complex(0.0, omega), Complex(0.0, -omega), Complex(0.0, 0.0)});
}

}  // namespace

Operator total_hamiltonian(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be > 0");
  const Operator h = local_generator(omega);
  const Operator one = Operator::identity(2);
  return tensor(h, one) + tensor(one, h);
}

double constraint_residual(const PawState& state) {
  const Operator h = total_hamiltonian(state.clock.omega);
  const std::vector<Complex> v = apply_vector(h, state.psi);
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return std::sqrt(s);
}

qcore::Ket relational_state(const PawState& state, const qcore::Ket& clock_initial, double t) {
  if (clock_initial.dim() != 2 || !clock_initial.is_normalized())
    throw std::invalid_argument("clock_initial must be a normalized dim-2 ket");
  if (!std::isfinite(t)) throw std::invalid_argument("t must be finite");
  const Ket phi_t = apply(qcore::rotation_unitary(state.clock.omega * t), clock_initial);
  // <φ(t)|Ψ> partial inner product over the clock factor.
  std::vector<Complex> rest(2, Complex(0.0, 0.0));
  for (int c = 0; c < 2; ++c) {
    const Complex w = std::conj(phi_t.amplitude(c));
    for (int r = 0; r < 2; ++r) rest[static_cast<size_t>(r)] += w * state.psi.amplitude(2 * c + r);
  }
  return Ket::subnormalized(std::move(rest));
}

qcore::Ket evolve_global(const PawState& state, double T, double delta_clock_extra) {
  if (!std::isfinite(T) || !std::isfinite(delta_clock_extra))
    throw std::invalid_argument("evolution parameters must be finite");
  const double w = state.clock.omega;
  const Operator u = tensor(qcore::rotation_unitary(w * T + delta_clock_extra),
                            qcore::rotation_unitary(w * T));
  return apply(u, state.psi);
}

ConditionalTable observer_conditionals(const PawState& state, double T) {
  const Ket psi_t = evolve_global(state, T);
  // Joint Born weights in the fixed basis; clock letter selects k, rest
  // letter selects j (V fires detector 3, H fires detector 4).
  const double j31 = std::norm(psi_t.amplitude(qcore::kHV));
  const double j41 = std::norm(psi_t.amplitude(qcore::kHH));
  const double j32 = std::norm(psi_t.amplitude(qcore::kVV));
  const double j42 = std::norm(psi_t.amplitude(qcore::kVH));
  ConditionalTable out;
  out.denom1 = j31 + j41;
  out.denom2 = j32 + j42;
  if (out.denom1 >= qcore::kNullOutcomeProb) {
    out.p31 = j31 / out.denom1;
    out.p41 = j41 / out.denom1;
  }
  if (out.denom2 >= qcore::kNullOutcomeProb) {
    out.p32 = j32 / out.denom2;
    out.p42 = j42 / out.denom2;
  }
  return out;
}

ErasedState erase_channel(const qcore::DensityMatrix& rho, double chi) {
  if (rho.dim() != 4) throw std::invalid_argument("erase_channel requires a dim-4 state");
  if (!std::isfinite(chi)) throw std::invalid_argument("chi must be finite");
  // Kraus piece of the kept port: (|H><H| + e^{i chi}|V><V|)/sqrt(2) on the
  // clock factor. Diagonal, so K rho K† just rephases the clock coherences
  // and halves the trace.
  const Complex phase(std::cos(chi), std::sin(chi));
  const Complex kd[2] = {Complex(1.0, 0.0), phase};
  std::vector<Complex> m(16);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          m[static_cast<size_t>((2 * a + b) * 4 + (2 * c + d))] =
              0.5 * kd[a] * std::conj(kd[c]) * rho.entry(2 * a + b, 2 * c + d);
  double prob = 0.0;
  for (int i = 0; i < 4; ++i) prob += m[static_cast<size_t>(i * 4 + i)].real();
  for (Complex& z : m) z /= prob;
  return ErasedState{qcore::DensityMatrix::validated(4, std::move(m)), prob};
}

ErasedState superobserver_erased_state(const PawState& state, double T, double chi) {
  const Ket psi_t = evolve_global(state, T);
  return erase_channel(qcore::DensityMatrix::pure(psi_t), chi);
}

std::vector<std::pair<double, double>> superobserver_fidelity_sweep(
    const PawState& state, std::span<const double> T_list, const qcore::Ket& target) {
  std::vector<std::pair<double, double>> out;
  out.reserve(T_list.size());
  for (double T : T_list) {
    const ErasedState erased = superobserver_erased_state(state, T);
    out.emplace_back(T, qcore::fidelity_pure(erased.state, target));
  }
  return out;
}

std::vector<std::pair<double, double>> superobserver_fidelity_sweep(
    const PawState& state, std::span<const double> T_list) {
  return superobserver_fidelity_sweep(state, T_list, state.psi);
}

}  // namespace relclock::paw
