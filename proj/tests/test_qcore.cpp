#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "relclock/gppt.hpp"
#include "relclock/paw.hpp"
#include "relclock/qcore.hpp"

using namespace relclock::qcore;
using test_oracles::matrix_exp_taylor;
using test_oracles::random_ket;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

Ket singlet() {
  return Ket::normalized({Complex(0, 0), Complex(kInvSqrt2, 0), Complex(-kInvSqrt2, 0), Complex(0, 0)});
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("qcore");

TEST_CASE("ket families enforce their norms") {
  CHECK_THROWS(Ket::normalized({Complex(1, 0), Complex(1, 0)}));
  CHECK_THROWS(Ket::subnormalized({Complex(1, 0), Complex(1, 0)}));
  CHECK_THROWS(Ket::normalized({Complex(std::nan(""), 0), Complex(0, 0)}));
  const Ket sub = Ket::subnormalized({Complex(0.5, 0), Complex(0, 0)});
  CHECK(!sub.is_normalized());
  CHECK(sub.norm_sq() == doctest::Approx(0.25));
  const Ket u = Ket::unit({Complex(3, 0), Complex(4, 0)});
  CHECK(u.norm() == doctest::Approx(1.0));
}

TEST_CASE("tensor of basis kets lands on the fixed index order") {
  const Ket h = Ket::basis_state(2, 0);
  const Ket v = Ket::basis_state(2, 1);
  const Ket hv = tensor(h, v);
  CHECK(hv.amplitude(kHV) == Complex(1, 0));
  CHECK(hv.amplitude(kHH) == Complex(0, 0));
  CHECK(hv.amplitude(kVH) == Complex(0, 0));
  CHECK(hv.amplitude(kVV) == Complex(0, 0));
  CHECK_THROWS(tensor(hv, h));  // 4 x 2 is out of contract
}

TEST_CASE("tensor of identities is the identity") {
  const Operator one4 = tensor(Operator::identity(2), Operator::identity(2));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(one4.entry(r, c) == Complex(r == c ? 1 : 0, 0));
}

TEST_CASE("rotation tensor identity moves |HV> to -|VV>") {
  const Operator u = tensor(rotation_unitary(std::numbers::pi / 2), Operator::identity(2));
  const std::vector<Complex> out = apply_vector(u, Ket::basis_state(4, kHV));
  // Frozen from the 2x2 product: R(pi/2)|H> = -|V>, identity on the rest.
  CHECK(std::abs(out[kVV] - Complex(-1, 0)) < 1e-15);
  CHECK(std::abs(out[kHH]) < 1e-15);
  CHECK(std::abs(out[kHV]) < 1e-15);
  CHECK(std::abs(out[kVH]) < 1e-15);
}

TEST_CASE("tensor factorizes application on random product states") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Ket a = random_ket(2, rng);
    const Ket b = random_ket(2, rng);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    const Operator u = rotation_unitary(angle(rng));
    const Operator w = waveplate_unitary(angle(rng));
    const Ket lhs = apply(tensor(u, w), tensor(a, b));
    const Ket rhs = tensor(apply(u, a), apply(w, b));
    CHECK(max_abs_diff(lhs.amplitudes(), rhs.amplitudes()) < 1e-12);
  }
}

TEST_CASE("rotation_unitary matches the exponential of its generator") {
  SUBCASE("theta = 0 is the identity") {
    const Operator u = rotation_unitary(0.0);
    CHECK(u.entry(0, 0) == Complex(1, 0));
    CHECK(u.entry(0, 1) == Complex(0, 0));
  }
  SUBCASE("quarter turn flips H to -V") {
    const std::vector<Complex> out = apply_vector(rotation_unitary(std::numbers::pi / 2),
                                                  Ket::basis_state(2, 0));
    CHECK(std::abs(out[0]) < 1e-15);
    CHECK(std::abs(out[1] - Complex(-1, 0)) < 1e-15);
  }
  SUBCASE("eighth turn takes V to (H+V)/sqrt(2)") {
    const std::vector<Complex> out = apply_vector(rotation_unitary(std::numbers::pi / 4),
                                                  Ket::basis_state(2, 1));
    CHECK(std::abs(out[0] - Complex(kInvSqrt2, 0)) < 1e-12);
    CHECK(std::abs(out[1] - Complex(kInvSqrt2, 0)) < 1e-12);
  }
  SUBCASE("agrees with the Taylor exponential of -i Hc t") {
    for (double theta : {0.3, 1.0, 2.5, -0.7, 9.1}) {
      // -i * Hc * t with Hc = i(|H><V| - |V><H|), omega = 1, theta = t.
      const std::vector<Complex> gen = {Complex(0, 0), Complex(theta, 0),
                                        Complex(-theta, 0), Complex(0, 0)};
      const std::vector<Complex> expected = matrix_exp_taylor(2, gen);
      CHECK(max_abs_diff(rotation_unitary(theta).entries(), expected) < 1e-13);
    }
  }
  SUBCASE("group property over random angle pairs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
      const double t1 = angle(rng);
      const double t2 = angle(rng);
      const Operator lhs = rotation_unitary(t1) * rotation_unitary(t2);
      const Operator rhs = rotation_unitary(t1 + t2);
      CHECK(max_abs_diff(lhs.entries(), rhs.entries()) < 1e-12);
    }
  }
  SUBCASE("real orthogonal with unit determinant") {
    const Operator u = rotation_unitary(1.234);
    CHECK(u.flagged_unitary());
    const Complex det = u.entry(0, 0) * u.entry(1, 1) - u.entry(0, 1) * u.entry(1, 0);
    CHECK(std::abs(det - Complex(1, 0)) < 1e-15);
  }
}

TEST_CASE("waveplate_unitary implements cos d + i sin d X") {
  SUBCASE("delta = 0 is the identity") {
    CHECK(waveplate_unitary(0.0).entry(0, 0) == Complex(1, 0));
    CHECK(waveplate_unitary(0.0).entry(0, 1) == Complex(0, 0));
  }
  SUBCASE("quarter-wave sends V to iH") {
    const std::vector<Complex> out = apply_vector(waveplate_unitary(std::numbers::pi / 2),
                                                  Ket::basis_state(2, 1));
    CHECK(std::abs(out[0] - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(out[1]) < 1e-15);
  }
  SUBCASE("|<V|U|V>|^2 = cos^2 d") {
    const Operator u = waveplate_unitary(std::numbers::pi / 4);
    CHECK(std::norm(u.entry(1, 1)) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("SU(2): unit determinant on a grid") {
    for (int i = 0; i < 100; ++i) {
      const double delta = 2 * std::numbers::pi * i / 100.0;
      const Operator u = waveplate_unitary(delta);
      const Complex det = u.entry(0, 0) * u.entry(1, 1) - u.entry(0, 1) * u.entry(1, 0);
      CHECK(std::abs(det - Complex(1, 0)) < 1e-12);
    }
  }
  SUBCASE("H/V detection statistics match the rotation model on a grid") {
    for (int i = 0; i < 100; ++i) {
      const double delta = 2 * std::numbers::pi * i / 100.0;
      const Operator rot = rotation_unitary(delta);
      const Operator plate = waveplate_unitary(delta);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          CHECK(std::abs(std::norm(rot.entry(b, a)) - std::norm(plate.entry(b, a))) < 1e-12);
    }
  }
}

TEST_CASE("operator factories validate their flags") {
  CHECK_THROWS(Operator::unitary(2, {Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(2, 0)}));
  CHECK_THROWS(Operator::hermitian(2, {Complex(0, 0), Complex(1, 0), Complex(2, 0), Complex(0, 0)}));
  CHECK_THROWS(Operator::projector(2, {Complex(0.5, 0), Complex(0, 0), Complex(0, 0), Complex(2, 0)}));
  const Operator p = Operator::projector(2, {Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(0, 0)});
  CHECK(p.flagged_projector());
  CHECK(p.flagged_hermitian());
}

TEST_CASE("project_and_renorm handles the singlet and null outcomes") {
  const Ket psi = singlet();
  const Operator ph = tensor(Operator::dyad(Ket::basis_state(2, 0)), Operator::identity(2));
  SUBCASE("clock-H projection of the singlet leaves |HV>/norm") {
    const ProjectionOutcome out = project_and_renorm(ph, psi);
    REQUIRE(!out.null_outcome());
    CHECK(out.probability == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(out.state->amplitude(kHV) - Complex(1, 0)) < 1e-12);
  }
  SUBCASE("identity projector returns the state with probability 1") {
    const ProjectionOutcome out = project_and_renorm(Operator::identity(4), psi);
    REQUIRE(!out.null_outcome());
    CHECK(out.probability == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs_diff(out.state->amplitudes(), psi.amplitudes()) < 1e-15);
  }
  SUBCASE("orthogonal projection is a flagged null outcome, not NaN") {
    const Operator pv = tensor(Operator::dyad(Ket::basis_state(2, 1)), Operator::identity(2));
    const ProjectionOutcome out = project_and_renorm(pv, Ket::basis_state(4, kHV));
    CHECK(out.null_outcome());
    CHECK(out.probability == 0.0);
  }
  SUBCASE("rejects non-projectors") {
    CHECK_THROWS(project_and_renorm(rotation_unitary(0.3), Ket::basis_state(2, 0)));
  }
}

TEST_CASE("projection probabilities over a complete set sum to 1") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Ket psi = random_ket(4, rng);
    const Ket basis_c = random_ket(2, rng);
    // Complete set {|b><b|, 1-|b><b|} x clock/rest assignments.
    const Operator p0 = tensor(Operator::dyad(basis_c), Operator::identity(2));
    const Operator p1 = Operator::identity(4) - p0;
    double total = 0.0;
    for (const Operator* p : {&p0, &p1}) {
      std::vector<Complex> v = apply_vector(*p, psi);
      double s = 0.0;
      for (const Complex& z : v) s += std::norm(z);
      total += s;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("fidelity_pure basics and symmetries") {
  const Ket psi = singlet();
  CHECK(fidelity_pure(DensityMatrix::pure(psi), psi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fidelity_pure(DensityMatrix::maximally_mixed(4), psi) == doctest::Approx(0.25).epsilon(1e-12));
  // |<HV|singlet>|^2 from the amplitudes: (1/sqrt2)^2.
  CHECK(fidelity_pure(DensityMatrix::pure(Ket::basis_state(4, kHV)), psi) ==
        doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("linear in rho") {
    std::mt19937_64 rng(5);
    const DensityMatrix a = test_oracles::random_density(4, rng);
    const DensityMatrix b = test_oracles::random_density(4, rng);
    const double w = 0.3;
    std::vector<Complex> mixed(16);
    for (int i = 0; i < 16; ++i) mixed[i] = w * a.entries()[i] + (1 - w) * b.entries()[i];
    const DensityMatrix m = DensityMatrix::validated(4, std::move(mixed));
    CHECK(fidelity_pure(m, psi) ==
          doctest::Approx(w * fidelity_pure(a, psi) + (1 - w) * fidelity_pure(b, psi))
              .epsilon(1e-12));
  }
  SUBCASE("invariant under a global phase of psi") {
    std::mt19937_64 rng(6);
    const DensityMatrix rho = test_oracles::random_density(4, rng);
    const Ket psi2 = random_ket(4, rng);
    std::vector<Complex> rotated = psi2.amplitudes();
    const Complex phase = std::polar(1.0, 1.9);
    for (Complex& z : rotated) z *= phase;
    CHECK(fidelity_pure(rho, psi2) ==
          doctest::Approx(fidelity_pure(rho, Ket::normalized(rotated))).epsilon(1e-12));
  }
}

TEST_CASE("partial_trace reduces known states") {
  SUBCASE("singlet reduces to the maximally mixed qubit on both sides") {
    const DensityMatrix rho = DensityMatrix::pure(singlet());
    for (Subsystem keep : {Subsystem::Clock, Subsystem::Rest}) {
      const DensityMatrix red = partial_trace(rho, keep);
      CHECK(std::abs(red.entry(0, 0) - Complex(0.5, 0)) < 1e-12);
      CHECK(std::abs(red.entry(1, 1) - Complex(0.5, 0)) < 1e-12);
      CHECK(std::abs(red.entry(0, 1)) < 1e-12);
    }
  }
  SUBCASE("|HV><HV| keeps |H><H| on the clock side") {
    const DensityMatrix red =
        partial_trace(DensityMatrix::pure(Ket::basis_state(4, kHV)), Subsystem::Clock);
    CHECK(std::abs(red.entry(0, 0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(red.entry(1, 1)) < 1e-15);
  }
  SUBCASE("time-averaged state at zero delay reduces to 1/2 on the rest side") {
    // Quadrature oracle: diag(avg sin^2, avg cos^2) = 1/2.
    const DensityMatrix red =
        partial_trace(relclock::gppt::time_averaged_state(0.0), Subsystem::Rest);
    CHECK(std::abs(red.entry(0, 0) - Complex(0.5, 0)) < 1e-9);
    CHECK(std::abs(red.entry(1, 1) - Complex(0.5, 0)) < 1e-9);
    CHECK(std::abs(red.entry(0, 1)) < 1e-9);
  }
}

TEST_CASE("density matrix validation tiers") {
  // Unit trace but badly non-PSD: validated() rejects, the lenient factory
  // accepts and reports the eigenvalue.
  std::vector<Complex> m(16, Complex(0, 0));
  m[0 * 4 + 0] = 1.5;
  m[1 * 4 + 1] = -0.5;
  CHECK_THROWS(DensityMatrix::validated(4, m));
  const DensityMatrix loose = DensityMatrix::hermitian_unit_trace(4, m);
  CHECK(loose.min_eigenvalue() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(!loose.is_physical());
  // Non-Hermitian and non-unit-trace inputs are rejected by both factories.
  std::vector<Complex> skew(16, Complex(0, 0));
  for (int i = 0; i < 4; ++i) skew[static_cast<size_t>(i * 4 + i)] = 0.25;
  skew[0 * 4 + 1] = Complex(0, 0.3);
  skew[1 * 4 + 0] = Complex(0, 0.3);
  CHECK_THROWS(DensityMatrix::hermitian_unit_trace(4, skew));
  std::vector<Complex> short_trace(16, Complex(0, 0));
  short_trace[0] = 0.5;
  CHECK_THROWS(DensityMatrix::hermitian_unit_trace(4, short_trace));
}

TEST_CASE("eig_hermitian reconstructs random Hermitian matrices") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> a(16);
    for (Complex& z : a) z = Complex(gauss(rng), gauss(rng));
    std::vector<Complex> h(16);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        h[static_cast<size_t>(r * 4 + c)] =
            a[static_cast<size_t>(r * 4 + c)] + std::conj(a[static_cast<size_t>(c * 4 + r)]);
    const HermitianEigen eig = eig_hermitian(4, h);
    // Q L Q^dagger == H
    std::vector<Complex> rebuilt(16, Complex(0, 0));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        for (int k = 0; k < 4; ++k)
          rebuilt[static_cast<size_t>(r * 4 + c)] += eig.vectors[static_cast<size_t>(r * 4 + k)] *
                                                     eig.values[static_cast<size_t>(k)] *
                                                     std::conj(eig.vectors[static_cast<size_t>(c * 4 + k)]);
    CHECK(max_abs_diff(rebuilt, h) < 1e-12);
    for (int k = 0; k + 1 < 4; ++k) CHECK(eig.values[k] <= eig.values[k + 1]);
  }
}

TEST_CASE("distance_up_to_phase ignores global phase only") {
  std::mt19937_64 rng(41);
  const Ket psi = random_ket(4, rng);
  std::vector<Complex> rotated = psi.amplitudes();
  for (Complex& z : rotated) z *= std::polar(1.0, -2.13);
  CHECK(distance_up_to_phase(psi, Ket::normalized(rotated)) < 1e-14);
  const Ket other = random_ket(4, rng);
  CHECK(distance_up_to_phase(psi, other) > 1e-3);
}

TEST_CASE("apply keeps the state family honest") {
  // A Hamiltonian blows past norm 1; apply() refuses, apply_vector is raw.
  const Operator h = relclock::paw::total_hamiltonian(1.0);
  const Ket hv = Ket::basis_state(4, kHV);
  CHECK_THROWS(apply(h, hv));
  const std::vector<Complex> raw = apply_vector(h, hv);
  double n2 = 0.0;
  for (const Complex& z : raw) n2 += std::norm(z);
  CHECK(std::sqrt(n2) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
}

TEST_SUITE_END();
