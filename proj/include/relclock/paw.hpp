#pragma once

// Page–Wootters engine: a two-valued polarization clock entangled with a
// single "rest of the universe" qubit. Provides the zero-energy constraint
// check, relational (clock-conditioned) evolution, observer-mode conditional
// probabilities, and the super-observer erasure that restores the global
// state conditioned on one interferometer port.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "relclock/qcore.hpp"

namespace relclock::paw {

// Rotation rate omega and the two dial readings t1, t2 = t1 + pi/(2 omega):
// the clock polarization flips from H to V in that interval.
struct ClockParams {
  double omega;
  double t1;
  double t2;
  static ClockParams make(double omega, double t1 = 0.0);
};

struct PawState {
  qcore::Ket psi;           // dim 4, normalized
  ClockParams clock;
};

// Conditional probabilities P(system outcome j | clock outcome k) with the
// detector map k=1 ↔ clock H (time t1), k=2 ↔ clock V (time t2),
// j=3 ↔ system V, j=4 ↔ system H. A conditional is empty (undefined) when
// its clock outcome has probability below 1e-14; denominators carry the two
// clock-outcome probabilities.
struct ConditionalTable {
  std::optional<double> p31, p32, p41, p42;
  double denom1 = 0.0;
  double denom2 = 0.0;
};

// The global state (|HV> - |VH>)/sqrt(2).
PawState make_singlet(double omega = 1.0, double t1 = 0.0);

// cos θ|HH> + e^{iφ} sin θ|VV>, optionally followed by H↔V on the rest
// factor (half-wave plate at 45° in that arm).
PawState prepare_state(double theta, double phi, bool swap_rest,
                       double omega = 1.0, double t1 = 0.0);

// Hc ⊗ 1 + 1 ⊗ Hr with Hc = Hr = i ω (|H><V| - |V><H|), ħ = 1.
qcore::Operator total_hamiltonian(double omega);

// ||H |psi>|| in units of ħω=ω; zero iff the state is stationary.
double constraint_residual(const PawState& state);

// <φ(t)|Ψ> with |φ(t)> = exp(-i Hc t)|φ(0)>: the state of the rest
// conditioned on the clock reading t. Subnormalized.
qcore::Ket relational_state(const PawState& state, const qcore::Ket& clock_initial, double t);

// U_rot(ω T + δ_extra) ⊗ U_rot(ω T) |Ψ>: evolution by abstract coordinate
// time T with an optional extra clock delay (plate in the clock arm only).
qcore::Ket evolve_global(const PawState& state, double T, double delta_clock_extra = 0.0);

ConditionalTable observer_conditionals(const PawState& state, double T);

struct ErasedState {
  qcore::DensityMatrix state;
  double postselect_prob;
};

// Which-way erasure of the clock measurement: PBS splits the clock
// polarization into two paths, a 50/50 recombination follows, and the right
// output port is kept. With relative path phase chi the kept branch applies
// (|H><H| + e^{i chi}|V><V|)/sqrt(2) to the clock factor; chi = 0 is the
// calibrated interferometer.
ErasedState superobserver_erased_state(const PawState& state, double T, double chi = 0.0);

// Same erasure as a channel on an arbitrary dim-4 mixed state.
ErasedState erase_channel(const qcore::DensityMatrix& rho, double chi = 0.0);

// F(T) = <target| erased(T) |target> over a sweep of coordinate times.
std::vector<std::pair<double, double>> superobserver_fidelity_sweep(
    const PawState& state, std::span<const double> T_list, const qcore::Ket& target);

// Target defaults to the state's own initial ket (staticity test).
std::vector<std::pair<double, double>> superobserver_fidelity_sweep(
    const PawState& state, std::span<const double> T_list);

}  // namespace relclock::paw
