#pragma once

// Shot-level Monte Carlo of the detection layer: exact Born probabilities
// per plate setting, seeded coincidence sampling, and conditional-probability
// estimates with binomial standard errors. The statistical mirror of
// coincidence counting; detectors are ideal.

#include <cstdint>
#include <optional>
#include <vector>

#include "relclock/qcore.hpp"

namespace relclock::optics_mc {

enum class Mode { PawObserver, Gppt };

// One Monte Carlo run: every shot draws a plate-A thickness (uniformly from
// plate_A_list, or continuously from [0, 2π) when continuous_plate is set)
// and then a detector outcome from the exact distribution at that setting.
// Shot i draws from the counter-based stream (seed, i): first the plate,
// then the outcome.
struct ShotConfig {
  long long n_shots = 0;
  std::uint64_t seed = 0;
  Mode mode = Mode::PawObserver;
  std::vector<double> plate_A_list;  // radians
  double delta_B = 0.0;              // radians, gppt only
  bool continuous_plate = false;
  double omega = 1.0;
};

struct CoincidenceTable {
  long long n31 = 0, n32 = 0, n41 = 0, n42 = 0;
  long long discarded = 0;
  long long n_shots = 0;
  std::uint64_t seed = 0;
};

struct EstimatedConditional {
  std::optional<double> p_hat;  // empty when the conditioning column is empty
  double stderr_value = 0.0;    // sqrt(p(1-p)/denominator)
  long long numerator = 0;
  long long denominator = 0;
};

struct ConditionalEstimates {
  EstimatedConditional p3g1, p3g2, p4g1, p4g2;
};

// Probabilities over {(3,1),(3,2),(4,1),(4,2),discard}, summing to 1.
// PawObserver: the singlet passes plate δ=plate_A (waveplate model) in both
// arms; nothing is discarded. Gppt: the kept branch |HV> of the initial
// clock measurement evolves to Ψ(T=plate_A/ω) with clock delay
// τ=delta_B/ω; discard carries the clock-V probability at the initial
// measurement, identically zero for the kept branch.
struct OutcomeDistribution {
  double p31 = 0.0, p32 = 0.0, p41 = 0.0, p42 = 0.0;
  double discard = 0.0;
  double sum() const { return p31 + p32 + p41 + p42 + discard; }
};
OutcomeDistribution outcome_distribution(Mode mode, double plate_A, double delta_B = 0.0,
                                         double omega = 1.0);

CoincidenceTable sample_shots(const ShotConfig& config);

ConditionalEstimates estimate_conditionals(const CoincidenceTable& table);

}  // namespace relclock::optics_mc
