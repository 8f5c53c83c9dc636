#include "relclock/tomography.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "relclock/rng.hpp"

namespace relclock::tomography {

using qcore::Complex;
using qcore::DensityMatrix;
using qcore::Ket;
using qcore::Operator;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Jones matrices, fast axis at angle theta from horizontal.
Operator hwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  return Operator::unitary(2, {Complex(c, 0.0), Complex(s, 0.0), Complex(s, 0.0), Complex(-c, 0.0)});
}

Operator qwp(double theta) {
  const double c = std::cos(2.0 * theta);
  const double s = std::sin(2.0 * theta);
  const double r = 1.0 / std::numbers::sqrt2;
  return Operator::unitary(2, {r * Complex(1.0, c), r * Complex(0.0, s),
                               r * Complex(0.0, s), r * Complex(1.0, -c)});
}

Ket analyzed_ket(double q, double h) {
  // Light crosses QWP(q) then HWP(h) then a V polarizer, so the analyzed
  // state is QWP(q)† HWP(h)† |V>.
  const Ket v = Ket::basis_state(2, 1);
  return apply(qwp(q).adjoint(), apply(hwp(h).adjoint(), v));
}

Eigen::Matrix4cd to_eigen4(const std::vector<Complex>& m) {
  Eigen::Matrix4cd a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = m[static_cast<size_t>(r * 4 + c)];
  return a;
}

std::vector<Complex> from_eigen4(const Eigen::Matrix4cd& a) {
  std::vector<Complex> m(16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[static_cast<size_t>(r * 4 + c)] = a(r, c);
  return m;
}

// Pauli ⊗ Pauli Hermitian basis, clock factor first.
const std::array<Eigen::Matrix4cd, 16>& pauli_basis() {
  static const std::array<Eigen::Matrix4cd, 16> basis = [] {
    std::array<Eigen::Matrix2cd, 4> pauli;
    pauli[0] << 1, 0, 0, 1;
    pauli[1] << 0, 1, 1, 0;
    pauli[2] << 0, Complex(0, -1), Complex(0, 1), 0;
    pauli[3] << 1, 0, 0, -1;
    std::array<Eigen::Matrix4cd, 16> out;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Eigen::Matrix4cd m;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            m.block<2, 2>(2 * i, 2 * j) = pauli[static_cast<size_t>(a)](i, j) * pauli[static_cast<size_t>(b)];
        out[static_cast<size_t>(4 * a + b)] = m;
      }
    return out;
  }();
  return basis;
}

Eigen::MatrixXd design_matrix(std::span<const ProjectionSetting> settings) {
  const auto& basis = pauli_basis();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(settings.size()), 16);
  for (size_t i = 0; i < settings.size(); ++i) {
    const Eigen::Matrix4cd proj = to_eigen4(settings[i].projector().entries());
    for (int j = 0; j < 16; ++j)
      m(static_cast<Eigen::Index>(i), j) = (proj * basis[static_cast<size_t>(j)]).trace().real();
  }
  return m;
}

void check_data(const TomographyData& data) {
  if (data.settings.size() != data.counts.size())
    throw std::invalid_argument("tomography data: settings/counts length mismatch");
  if (data.settings.empty()) throw std::invalid_argument("tomography data: no settings");
  if (data.exposure < 1) throw std::invalid_argument("tomography data: exposure must be >= 1");
  for (long long n : data.counts) {
    if (n < 0) throw std::invalid_argument("tomography data: negative count");
    if (data.model == CountModel::Binomial && n > data.exposure)
      throw std::invalid_argument("tomography data: count exceeds exposure");
  }
}

}  // namespace

Ket ProjectionSetting::analyzed_clock() const { return analyzed_ket(qwp_c, hwp_c); }
Ket ProjectionSetting::analyzed_rest() const { return analyzed_ket(qwp_r, hwp_r); }

Operator ProjectionSetting::projector() const {
  return tensor(Operator::dyad(analyzed_clock()), Operator::dyad(analyzed_rest()));
}

std::vector<ProjectionSetting> standard_16_settings() {
  // Plate angles steering the V analyzer onto each basis state.
  struct ArmSetting {
    char letter;
    double q, h;
  };
  static const ArmSetting arm[4] = {
      {'H', 0.0, kPi / 4.0},
      {'V', 0.0, 0.0},
      {'D', kPi / 4.0, 3.0 * kPi / 8.0},
      {'L', 0.0, 3.0 * kPi / 8.0},
  };
  std::vector<ProjectionSetting> out;
  out.reserve(16);
  for (const ArmSetting& c : arm)
    for (const ArmSetting& r : arm)
      out.push_back(ProjectionSetting{c.q, c.h, r.q, r.h, std::string{c.letter, r.letter}});
  return out;
}

double design_condition_number(std::span<const ProjectionSetting> settings) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design_matrix(settings));
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(sv.size() - 1);
}

std::vector<double> born_probabilities(const DensityMatrix& rho,
                                       std::span<const ProjectionSetting> settings) {
  if (rho.dim() != 4) throw std::invalid_argument("born_probabilities requires a dim-4 state");
  std::vector<double> out;
  out.reserve(settings.size());
  const Eigen::Matrix4cd r = to_eigen4(rho.entries());
  for (const ProjectionSetting& s : settings) {
    const Eigen::Matrix4cd proj = to_eigen4(s.projector().entries());
    out.push_back(std::clamp((proj * r).trace().real(), 0.0, 1.0));
  }
  return out;
}

namespace {

long long sample_binomial(rng::Stream& stream, long long exposure, double p) {
  long long n = 0;
  for (long long t = 0; t < exposure; ++t)
    if (stream.next_unit() < p) ++n;
  return n;
}

long long sample_poisson(rng::Stream& stream, double lambda) {
  // Knuth's product method on chunks small enough that exp(-chunk) stays
  // normal.
  long long total = 0;
  while (lambda > 0.0) {
    const double chunk = std::min(lambda, 256.0);
    lambda -= chunk;
    const double limit = std::exp(-chunk);
    double prod = stream.next_unit();
    long long k = 0;
    while (prod > limit) {
      ++k;
      prod *= stream.next_unit();
    }
    total += k;
  }
  return total;
}

}  // namespace

TomographyData simulate_counts(const DensityMatrix& rho,
                               std::span<const ProjectionSetting> settings, long long exposure,
                               std::uint64_t seed, CountModel model) {
  if (exposure < 1) throw std::invalid_argument("exposure must be >= 1");
  const std::vector<double> probs = born_probabilities(rho, settings);
  TomographyData data;
  data.settings.assign(settings.begin(), settings.end());
  data.exposure = exposure;
  data.model = model;
  data.counts.reserve(settings.size());
  for (size_t i = 0; i < settings.size(); ++i) {
    rng::Stream stream(seed, static_cast<std::uint64_t>(i));
    if (model == CountModel::Binomial) {
      data.counts.push_back(sample_binomial(stream, exposure, probs[i]));
    } else {
      data.counts.push_back(sample_poisson(stream, static_cast<double>(exposure) * probs[i]));
    }
  }
  return data;
}

ReconstructionResult reconstruct_linear_from_frequencies(
    std::span<const ProjectionSetting> settings, std::span<const double> frequencies) {
  if (settings.size() != 16 || frequencies.size() != 16)
    throw std::invalid_argument("linear inversion requires exactly 16 settings");
  const Eigen::MatrixXd design = design_matrix(settings);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(design);
  if (!lu.isInvertible()) throw std::runtime_error("singular design matrix");
  Eigen::VectorXd freq(16);
  for (int i = 0; i < 16; ++i) freq(i) = frequencies[static_cast<size_t>(i)];
  const Eigen::VectorXd coeff = lu.solve(freq);
  const auto& basis = pauli_basis();
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (int j = 0; j < 16; ++j) rho += coeff(j) * basis[static_cast<size_t>(j)];
  rho = 0.5 * (rho + rho.adjoint().eval());  // Hermitize
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw std::runtime_error("linear inversion produced a non-positive trace");
  rho /= tr;
  ReconstructionResult result{DensityMatrix::hermitian_unit_trace(4, from_eigen4(rho)),
                              Method::Linear};
  result.min_eigenvalue = result.rho.min_eigenvalue();
  result.physical = result.min_eigenvalue >= qcore::kPsdFloor;
  return result;
}

ReconstructionResult reconstruct_linear(const TomographyData& data) {
  check_data(data);
  std::vector<double> freq(data.counts.size());
  for (size_t i = 0; i < freq.size(); ++i)
    freq[i] = static_cast<double>(data.counts[i]) / static_cast<double>(data.exposure);
  return reconstruct_linear_from_frequencies(data.settings, freq);
}

namespace {

// Log-likelihood up to count-model constants; -inf when an observed outcome
// is assigned zero probability.
double loglik_value(std::span<const double> counts, double exposure, CountModel model,
                    const std::vector<double>& probs) {
  double l = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    const double n = counts[i];
    const double p = probs[i];
    if (model == CountModel::Binomial) {
      const double miss = exposure - n;
      if (n > 0.0) {
        if (p <= 0.0) return kNegInf;
        l += n * std::log(p);
      }
      if (miss > 0.0) {
        if (p >= 1.0) return kNegInf;
        l += miss * std::log(1.0 - p);
      }
    } else {
      if (n > 0.0) {
        if (p <= 0.0) return kNegInf;
        l += n * std::log(p);
      }
      l -= exposure * p;
    }
  }
  return l;
}

std::vector<double> probs_of(const std::array<Eigen::Matrix4cd, 16>& proj, size_t n_settings,
                             const Eigen::Matrix4cd& rho) {
  std::vector<double> p(n_settings);
  for (size_t i = 0; i < n_settings; ++i) p[i] = std::max((proj[i] * rho).trace().real(), 0.0);
  return p;
}

// Likelihood gradient dL/dρ, scaled by 1/(n_settings * exposure) so it is
// O(1); for binomial data it equals the POVM iteration operator whose fixed
// point R ρ R = ρ is the maximum-likelihood state.
Eigen::Matrix4cd gradient_operator(std::span<const double> counts, double exposure,
                                   CountModel model,
                                   const std::array<Eigen::Matrix4cd, 16>& proj,
                                   const std::vector<double>& probs) {
  const double scale = 1.0 / (static_cast<double>(probs.size()) * exposure);
  Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
  const Eigen::Matrix4cd eye = Eigen::Matrix4cd::Identity();
  for (size_t i = 0; i < probs.size(); ++i) {
    const double n = counts[i];
    const double p = std::max(probs[i], 1e-300);
    if (model == CountModel::Binomial) {
      const double miss = exposure - n;
      const double q = std::max(1.0 - probs[i], 1e-300);
      if (n > 0.0) g += (scale * n / p) * proj[i];
      if (miss > 0.0) g += (scale * miss / q) * (eye - proj[i]);
    } else {
      if (n > 0.0) g += (scale * n / p) * proj[i];
      g -= (scale * exposure) * proj[i];
    }
  }
  return g;
}

}  // namespace

double log_likelihood(const TomographyData& data, const DensityMatrix& rho) {
  check_data(data);
  std::vector<double> counts(data.counts.begin(), data.counts.end());
  return loglik_value(counts, static_cast<double>(data.exposure), data.model,
                      born_probabilities(rho, data.settings));
}

ReconstructionResult reconstruct_mle(const TomographyData& data, const MleOptions& options) {
  check_data(data);
  std::vector<double> counts(data.counts.begin(), data.counts.end());
  return reconstruct_mle_weighted(data.settings, counts, static_cast<double>(data.exposure),
                                  data.model, options);
}

ReconstructionResult reconstruct_mle_weighted(std::span<const ProjectionSetting> settings,
                                              std::span<const double> counts, double exposure,
                                              CountModel model, const MleOptions& options) {
  const size_t n_settings = settings.size();
  if (n_settings == 0 || n_settings != counts.size())
    throw std::invalid_argument("mle: settings/counts length mismatch");
  if (!(exposure > 0.0)) throw std::invalid_argument("mle: exposure must be positive");
  for (double n : counts) {
    if (!(n >= 0.0)) throw std::invalid_argument("mle: negative count");
    if (model == CountModel::Binomial && n > exposure)
      throw std::invalid_argument("mle: count exceeds exposure");
  }
  std::array<Eigen::Matrix4cd, 16> proj;
  if (n_settings > proj.size()) throw std::invalid_argument("too many settings");
  for (size_t i = 0; i < n_settings; ++i) proj[i] = to_eigen4(settings[i].projector().entries());

  const Eigen::Matrix4cd eye = Eigen::Matrix4cd::Identity();
  Eigen::Matrix4cd rho = 0.25 * eye;
  std::vector<double> probs = probs_of(proj, n_settings, rho);
  double loglik = loglik_value(counts, exposure, model, probs);

  std::vector<double> loglik_trace;
  if (options.keep_trace) loglik_trace.push_back(loglik);

  const bool binomial = model == CountModel::Binomial;
  bool converged = false;
  long long iter = 0;
  Eigen::Matrix4cd direction = Eigen::Matrix4cd::Zero();
  for (; iter < options.max_iterations; ++iter) {
    const Eigen::Matrix4cd g = gradient_operator(counts, exposure, model, proj, probs);
    direction = g - (g * rho).trace().real() * eye;
    const double dir_norm = direction.norm();
    if (dir_norm == 0.0) {
      converged = true;
      break;
    }

    // Candidate steps: for binomial data the full fixed-point congruence
    // G ρ G first, then damped steps (1 + ε D) ρ (1 + ε D) with ε halved
    // until the likelihood improves.
    Eigen::Matrix4cd best_rho;
    std::vector<double> best_probs;
    double best_loglik = kNegInf;
    bool improved = false;

    auto consider = [&](const Eigen::Matrix4cd& a) {
      Eigen::Matrix4cd cand = a * rho * a.adjoint();
      const double tr = cand.trace().real();
      if (!(tr > 0.0) || !std::isfinite(tr)) return false;
      cand /= tr;
      cand = 0.5 * (cand + cand.adjoint().eval());
      std::vector<double> cand_probs = probs_of(proj, n_settings, cand);
      const double cand_loglik = loglik_value(counts, exposure, model, cand_probs);
      if (cand_loglik > loglik) {
        best_rho = cand;
        best_probs = std::move(cand_probs);
        best_loglik = cand_loglik;
        return true;
      }
      return false;
    };

    if (binomial) improved = consider(g);
    if (!improved) {
      const Eigen::Matrix4cd step = direction / std::max(dir_norm, 1.0);
      for (double eps = 1.0; eps > 1e-14; eps *= 0.5) {
        if (consider(eye + eps * step)) {
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      converged = true;  // no ascent direction left at line-search resolution
      break;
    }

    const double gain = best_loglik - loglik;
    rho = best_rho;
    probs = std::move(best_probs);
    loglik = best_loglik;
    if (options.keep_trace) loglik_trace.push_back(loglik);
    if (gain < options.loglik_tolerance) {
      ++iter;
      converged = true;
      break;
    }
  }

  // The congruence updates keep ρ positive semidefinite; tiny negative
  // rounding is clipped before validation.
  Eigen::Matrix4cd final_rho = rho;
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(final_rho);
    Eigen::Vector4d ev = es.eigenvalues();
    for (int i = 0; i < 4; ++i) ev(i) = std::max(ev(i), 0.0);
    ev /= ev.sum();
    final_rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  }
  ReconstructionResult result{DensityMatrix::validated(4, from_eigen4(final_rho)), Method::Mle};
  result.iterations = iter;
  result.converged = converged;
  result.gradient_norm = direction.norm();
  result.log_likelihood = loglik;
  result.log_likelihood_trace = std::move(loglik_trace);
  result.min_eigenvalue = result.rho.min_eigenvalue();
  result.physical = true;
  return result;
}

DensityMatrix project_to_physical(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(to_eigen4(rho.entries()));
  Eigen::Vector4d ev = es.eigenvalues();
  for (int i = 0; i < 4; ++i) ev(i) = std::max(ev(i), 0.0);
  const double sum = ev.sum();
  if (!(sum > 0.0)) throw std::runtime_error("cannot project a trace-free matrix");
  ev /= sum;
  const Eigen::Matrix4cd out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix::validated(4, from_eigen4(out));
}

double fidelity_report(const ReconstructionResult& result, const Ket& target) {
  return qcore::fidelity_pure(result.rho, target);
}

}  // namespace relclock::tomography
