#pragma once

// Two-time conditional probabilities for the clock/rest model: the
// coordinate-time average of the post-selected global state, joint detector
// probabilities by spectrally exact trapezoid quadrature, their closed
// forms, and the resulting clock-conditioned curves. A slow double-integral
// route and the single-time average are kept as independent cross-checks.
//
// Detector map, fixed throughout: k=1 ↔ clock H, k=2 ↔ clock V,
// j=3 ↔ system V, j=4 ↔ system H.

#include <span>
#include <vector>

#include "relclock/paw.hpp"
#include "relclock/qcore.hpp"

namespace relclock::gppt {

inline constexpr int kDefaultNodes = 256;
inline constexpr int kMinNodes = 64;

// Clock delay tau in time units; the plate thickness equivalent is
// delta_B = omega * tau radians. All observables are periodic in
// omega*tau with period pi.
struct DelaySetting {
  double tau;
  double delta_b(double omega) const { return omega * tau; }
};

// Joint probabilities P_jk that detectors j and k click, averaged over the
// inaccessible coordinate time. They sum to 1 and each clock column sums
// to 1/2.
struct JointProbTable {
  double p31, p32, p41, p42;
  double sum() const { return p31 + p32 + p41 + p42; }
  static JointProbTable quadrature(double tau, int n_nodes = kDefaultNodes, double omega = 1.0);
  static JointProbTable closed(double tau, double omega = 1.0);
};

enum class Route { Quadrature, Closed };

// |HV>: the kept branch after the initial clock measurement projects the
// clock onto H (the V branch is discarded).
qcore::Ket projected_initial_state();

// The product ket reached from |HV> after coordinate time T with clock
// delay tau:
//   [cos(ω(T+τ))|H> - sin(ω(T+τ))|V>] ⊗ [cos(ωT)|V> + sin(ωT)|H>].
qcore::Ket global_state_T(double T, double tau, double omega = 1.0);

// (1/2π) ∫ |<jk|Ψ(φ/ω, τ)>|² dφ by the trapezoid rule on n_nodes equispaced
// nodes. The integrand is a degree-4 trigonometric polynomial, so the rule
// is spectrally exact for n_nodes >= 8; n_nodes >= 64 is required and 256 is
// the default. Accumulation is compensated (Kahan), so results are
// bit-identical for a fixed node count regardless of evaluation order.
double joint_prob_quadrature(int j, int k, double tau, int n_nodes = kDefaultNodes,
                             double omega = 1.0);

// Closed forms verified against the quadrature:
//   P31 = (1+2cos²ωτ)/8   P41 = (1+2sin²ωτ)/8
//   P32 = (1+2sin²ωτ)/8   P42 = (1+2cos²ωτ)/8
// Note the time average of sin²(φ+δ)cos²φ over φ is (1+2sin²δ)/8; the value
// (1+2cos²δ)/8 belongs to the cos²(φ+δ)cos²φ and sin²(φ+δ)sin²φ integrands.
double joint_prob_closed(int j, int k, double tau, double omega = 1.0);

// ρ̄ ∝ ∫ dT U_T |HV><HV| U_T†, normalized to unit trace. Commutes with the
// total Hamiltonian (full-orbit average).
qcore::DensityMatrix time_averaged_state(double tau, int n_nodes = kDefaultNodes,
                                         double omega = 1.0);

// p(3 | final clock outcome k) = P3k / (P3k + P4k).
double two_time_conditional(int k, double tau, Route route = Route::Quadrature,
                            int n_nodes = kDefaultNodes, double omega = 1.0);

// Same conditional through Tr[P_{3,k} ρ̄] / Tr[P_{t_k} ρ̄] with the
// projectors P_{3,k} = |k><k|_c ⊗ |V><V|_r and P_{t_k} = |k><k|_c ⊗ 1_r.
double two_time_conditional_via_rhobar(int k, double tau, int n_nodes = kDefaultNodes,
                                       double omega = 1.0);

// Single-time-measurement route: conditional probability of the system
// outcome given the clock outcome, computed by averaging the Heisenberg
// projector expectation Tr[P(T) ρ0] over coordinate time.
double one_time_conditional(int k, double tau, int n_nodes = kDefaultNodes, double omega = 1.0);

// Full double average over both measurement coordinate times, starting from
// the singlet with the initial projection onto the clock-H path. Slow
// cross-check; n_nodes is per axis.
double two_time_conditional_double_integral(int k, double tau, int n_nodes = kMinNodes,
                                            double omega = 1.0);

// One point of the clock-time curve: the conditional p was observed at
// clock time t = t_k + tau.
struct CurvePoint {
  double clock_time;
  double p;
  int k;
  double tau;
};

// Closed-form theory curve: for each delay emits (t1+τ, p(3|t1;τ)) and
// (t2+τ, p(3|t2;τ)). Both branches lie on one sinusoid of mean 1/2 and
// amplitude 1/4.
std::vector<CurvePoint> theory_curve(std::span<const double> tau_list,
                                     const paw::ClockParams& clock);

}  // namespace relclock::gppt
