#pragma once

// Test-side oracles, independent of the library's closed forms: a Taylor
// matrix exponential, a midpoint-rule integral, and seeded random states.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "relclock/qcore.hpp"

namespace test_oracles {

using relclock::qcore::Complex;

inline std::vector<Complex> mat_mul(int dim, const std::vector<Complex>& a,
                                    const std::vector<Complex>& b) {
  std::vector<Complex> out(static_cast<size_t>(dim * dim), Complex(0.0, 0.0));
  for (int r = 0; r < dim; ++r)
    for (int k = 0; k < dim; ++k)
      for (int c = 0; c < dim; ++c)
        out[static_cast<size_t>(r * dim + c)] +=
            a[static_cast<size_t>(r * dim + k)] * b[static_cast<size_t>(k * dim + c)];
  return out;
}

// exp(M) by scaling-and-squaring with a plain Taylor series.
inline std::vector<Complex> matrix_exp_taylor(int dim, std::vector<Complex> m) {
  double norm = 0.0;
  for (const Complex& z : m) norm += std::abs(z);
  int squarings = 0;
  while (norm > 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (Complex& z : m) z *= scale;

  std::vector<Complex> result(static_cast<size_t>(dim * dim), Complex(0.0, 0.0));
  for (int i = 0; i < dim; ++i) result[static_cast<size_t>(i * dim + i)] = 1.0;
  std::vector<Complex> term = result;
  for (int k = 1; k <= 24; ++k) {
    term = mat_mul(dim, term, m);
    for (Complex& z : term) z /= static_cast<double>(k);
    for (size_t i = 0; i < result.size(); ++i) result[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) result = mat_mul(dim, result, result);
  return result;
}

// Mean of f over [0, 2pi) by the midpoint rule.
template <typename F>
double midpoint_mean(F f, int n) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    sum += f(phi);
  }
  return sum / static_cast<double>(n);
}

inline relclock::qcore::Ket random_ket(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> amps(static_cast<size_t>(dim));
  for (Complex& z : amps) z = Complex(gauss(rng), gauss(rng));
  return relclock::qcore::Ket::unit(std::move(amps));
}

// Random mixture of a few pure states.
inline relclock::qcore::DensityMatrix random_density(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> weights(3);
  double total = 0.0;
  for (double& w : weights) {
    w = unit(rng) + 1e-3;
    total += w;
  }
  std::vector<Complex> m(static_cast<size_t>(dim * dim), Complex(0.0, 0.0));
  for (double w : weights) {
    const relclock::qcore::Ket psi = random_ket(dim, rng);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c)
        m[static_cast<size_t>(r * dim + c)] +=
            (w / total) * psi.amplitude(r) * std::conj(psi.amplitude(c));
  }
  return relclock::qcore::DensityMatrix::validated(dim, std::move(m));
}

}  // namespace test_oracles
