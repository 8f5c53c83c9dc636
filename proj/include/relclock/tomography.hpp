#pragma once

// Two-qubit polarization (ququart) state tomography: the 16 product
// projections onto {H, V, D, L} per arm realized by quarter/half-wave plate
// angles in front of a fixed V analyzer, Born-rule count simulation, linear
// inversion, and a maximum-likelihood reconstruction that is physical by
// construction.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "relclock/qcore.hpp"

namespace relclock::tomography {

// Waveplate angles (radians) of one projection: in each arm the light
// passes the quarter-wave plate, then the half-wave plate, then a polarizer
// transmitting V. The analyzed single-arm ket is QWP(q)† HWP(h)† |V>, and
// the induced projector is the rank-1 product |v_c><v_c| ⊗ |v_r><v_r|.
struct ProjectionSetting {
  double qwp_c, hwp_c, qwp_r, hwp_r;
  std::string label;  // two letters from {H,V,D,L}, clock arm first

  qcore::Ket analyzed_clock() const;
  qcore::Ket analyzed_rest() const;
  qcore::Operator projector() const;
};

// The canonical informationally complete product set: all 16 pairs over
// {H, V, D=(H+V)/√2, L=(H+iV)/√2}, ordered clock-major.
std::vector<ProjectionSetting> standard_16_settings();

// Condition number of the 16x16 design matrix mapping a Hermitian matrix
// (in the Pauli⊗Pauli basis) to the setting probabilities.
double design_condition_number(std::span<const ProjectionSetting> settings);

// p_i = Tr[Π_i ρ]
std::vector<double> born_probabilities(const qcore::DensityMatrix& rho,
                                       std::span<const ProjectionSetting> settings);

enum class CountModel { Binomial, Poisson };

struct TomographyData {
  std::vector<ProjectionSetting> settings;
  std::vector<long long> counts;
  long long exposure = 0;
  CountModel model = CountModel::Binomial;
};

// Counts drawn independently per setting from stream (seed, setting index):
// Binomial(exposure, p_i) by default, or Poisson(exposure * p_i).
TomographyData simulate_counts(const qcore::DensityMatrix& rho,
                               std::span<const ProjectionSetting> settings, long long exposure,
                               std::uint64_t seed, CountModel model = CountModel::Binomial);

enum class Method { Linear, Mle };

struct ReconstructionResult {
  ReconstructionResult(qcore::DensityMatrix state, Method how)
      : rho(std::move(state)), method(how) {}

  qcore::DensityMatrix rho;
  Method method = Method::Linear;
  bool physical = true;          // min eigenvalue >= -1e-8
  double min_eigenvalue = 0.0;
  // MLE diagnostics; zero/empty for the linear method.
  double log_likelihood = 0.0;
  long long iterations = 0;
  bool converged = true;
  double gradient_norm = 0.0;            // trace-orthogonal likelihood gradient at exit
  std::vector<double> log_likelihood_trace;  // filled when requested
};

// Solves the 16x16 linear system from observed frequencies, Hermitizes and
// trace-normalizes. The result may be unphysical; `physical` flags it.
ReconstructionResult reconstruct_linear(const TomographyData& data);

// Same inversion from real-valued frequencies (e.g. exact Born
// probabilities for a noiseless round trip).
ReconstructionResult reconstruct_linear_from_frequencies(
    std::span<const ProjectionSetting> settings, std::span<const double> frequencies);

struct MleOptions {
  long long max_iterations = 10000;
  double loglik_tolerance = 1e-10;  // stop when the improvement drops below this
  bool keep_trace = false;
};

// Maximizes the count-model log-likelihood over density matrices by a
// damped congruence ascent (multiplicative gradient steps A ρ A† with
// backtracking), which preserves positivity and unit trace and is monotone
// in the likelihood by construction.
ReconstructionResult reconstruct_mle(const TomographyData& data, const MleOptions& options = {});

// MLE on real-valued counts (expected counts N·p_i give the noiseless
// limit); the integer-count overload delegates here.
ReconstructionResult reconstruct_mle_weighted(std::span<const ProjectionSetting> settings,
                                              std::span<const double> counts, double exposure,
                                              CountModel model = CountModel::Binomial,
                                              const MleOptions& options = {});

// Log-likelihood of a state under the data's count model, same convention
// as reconstruct_mle (binomial coefficients / factorials dropped).
double log_likelihood(const TomographyData& data, const qcore::DensityMatrix& rho);

// Clip negative eigenvalues to zero and renormalize; identity on physical
// states up to rounding.
qcore::DensityMatrix project_to_physical(const qcore::DensityMatrix& rho);

// <target| rho |target> of a reconstruction.
double fidelity_report(const ReconstructionResult& result, const qcore::Ket& target);

}  // namespace relclock::tomography
