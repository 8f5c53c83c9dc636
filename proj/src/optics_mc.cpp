#include "relclock/optics_mc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relclock/gppt.hpp"
#include "relclock/paw.hpp"
#include "relclock/rng.hpp"

namespace relclock::optics_mc {

using qcore::Ket;

OutcomeDistribution outcome_distribution(Mode mode, double plate_A, double delta_B, double omega) {
  if (!std::isfinite(plate_A) || !std::isfinite(delta_B))
    throw std::invalid_argument("plate settings must be finite");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be > 0");
  OutcomeDistribution d;
  if (mode == Mode::PawObserver) {
    if (delta_B != 0.0) throw std::invalid_argument("delta_B applies to gppt mode only");
    const qcore::Operator u = qcore::waveplate_unitary(plate_A);
    const Ket psi = apply(tensor(u, u), paw::make_singlet(omega).psi);
    d.p31 = std::norm(psi.amplitude(qcore::kHV));
    d.p32 = std::norm(psi.amplitude(qcore::kVV));
    d.p41 = std::norm(psi.amplitude(qcore::kHH));
    d.p42 = std::norm(psi.amplitude(qcore::kVH));
    d.discard = 0.0;
  } else {
    const Ket psi = gppt::global_state_T(plate_A / omega, delta_B / omega, omega);
    d.p31 = std::norm(psi.amplitude(qcore::kHV));
    d.p32 = std::norm(psi.amplitude(qcore::kVV));
    d.p41 = std::norm(psi.amplitude(qcore::kHH));
    d.p42 = std::norm(psi.amplitude(qcore::kVH));
    // Initial clock measurement on the kept branch: the clock letter of
    // the projected start is H with certainty.
    d.discard = std::norm(gppt::projected_initial_state().amplitude(qcore::kVH)) +
                std::norm(gppt::projected_initial_state().amplitude(qcore::kVV));
  }
  return d;
}

namespace {

// Outcome cells in fixed cumulative order; a draw u in [0,1) selects the
// first cell whose cumulative bound exceeds it, so zero-probability cells
// can never fire.
enum Cell : int { kCell31 = 0, kCell32 = 1, kCell41 = 2, kCell42 = 3, kCellDiscard = 4 };

int draw_cell(const OutcomeDistribution& d, double u) {
  const double probs[5] = {d.p31, d.p32, d.p41, d.p42, d.discard};
  double cum = 0.0;
  int last_nonzero = kCell31;
  for (int c = 0; c < 5; ++c) {
    if (probs[c] > 0.0) last_nonzero = c;
    cum += probs[c];
    if (u < cum && probs[c] > 0.0) return c;
  }
  return last_nonzero;  // u fell in the rounding sliver above the last bound
}

void validate(const ShotConfig& config) {
  if (config.n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
  if (!config.continuous_plate && config.plate_A_list.empty())
    throw std::invalid_argument("plate_A_list empty");
  for (double v : config.plate_A_list)
    if (!std::isfinite(v)) throw std::invalid_argument("plate_A_list must be finite");
}

}  // namespace

CoincidenceTable sample_shots(const ShotConfig& config) {
  validate(config);
  // Distributions per plate are exact and reusable; only the draws are random.
  std::vector<OutcomeDistribution> dists;
  dists.reserve(config.plate_A_list.size());
  if (!config.continuous_plate) {
    for (double plate : config.plate_A_list)
      dists.push_back(outcome_distribution(config.mode,
                                           plate,
                                           config.mode == Mode::Gppt ? config.delta_B : 0.0,
                                           config.omega));
  }
  CoincidenceTable table;
  table.n_shots = config.n_shots;
  table.seed = config.seed;
  for (long long shot = 0; shot < config.n_shots; ++shot) {
    rng::Stream stream(config.seed, static_cast<std::uint64_t>(shot));
    OutcomeDistribution d;
    if (config.continuous_plate) {
      const double plate = stream.next_unit() * 2.0 * std::numbers::pi;
      d = outcome_distribution(config.mode, plate,
                               config.mode == Mode::Gppt ? config.delta_B : 0.0, config.omega);
    } else {
      const std::uint64_t idx = stream.next_below(config.plate_A_list.size());
      d = dists[static_cast<size_t>(idx)];
    }
    switch (draw_cell(d, stream.next_unit())) {
      case kCell31: ++table.n31; break;
      case kCell32: ++table.n32; break;
      case kCell41: ++table.n41; break;
      case kCell42: ++table.n42; break;
      default: ++table.discarded; break;
    }
  }
  return table;
}

namespace {

EstimatedConditional make_estimate(long long numerator, long long denominator) {
  EstimatedConditional e;
  e.numerator = numerator;
  e.denominator = denominator;
  if (denominator > 0) {
    const double p = static_cast<double>(numerator) / static_cast<double>(denominator);
    e.p_hat = p;
    e.stderr_value = std::sqrt(p * (1.0 - p) / static_cast<double>(denominator));
  }
  return e;
}

}  // namespace

ConditionalEstimates estimate_conditionals(const CoincidenceTable& table) {
  ConditionalEstimates est;
  est.p3g1 = make_estimate(table.n31, table.n31 + table.n41);
  est.p4g1 = make_estimate(table.n41, table.n31 + table.n41);
  est.p3g2 = make_estimate(table.n32, table.n32 + table.n42);
  est.p4g2 = make_estimate(table.n42, table.n32 + table.n42);
  return est;
}

}  // namespace relclock::optics_mc
