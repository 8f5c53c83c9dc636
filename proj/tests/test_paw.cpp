#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "relclock/paw.hpp"

using namespace relclock;
using namespace relclock::paw;
using qcore::Complex;
using qcore::Ket;
using qcore::Operator;

namespace {
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const double kPi = std::numbers::pi;
}  // namespace

TEST_SUITE_BEGIN("paw");

TEST_CASE("clock params fix t2 - t1 = pi/(2 omega)") {
  const ClockParams c = ClockParams::make(2.0, 0.7);
  CHECK(c.t2 - c.t1 == doctest::Approx(kPi / 4.0).epsilon(1e-12));
  CHECK_THROWS(ClockParams::make(0.0));
  CHECK_THROWS(ClockParams::make(-1.0));
}

TEST_CASE("make_singlet matches the fixed amplitude convention") {
  const PawState s = make_singlet();
  CHECK(s.psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(s.psi.amplitude(qcore::kHV) - Complex(kInvSqrt2, 0)) < 1e-15);
  CHECK(std::abs(s.psi.amplitude(qcore::kVH) - Complex(-kInvSqrt2, 0)) < 1e-15);
  CHECK(s.psi.amplitude(qcore::kHH) == Complex(0, 0));
  CHECK(s.psi.amplitude(qcore::kVV) == Complex(0, 0));
}

TEST_CASE("prepare_state spans the biphoton family") {
  SUBCASE("theta = 0 gives |HH>") {
    const PawState s = prepare_state(0.0, 0.0, false);
    CHECK(std::abs(s.psi.amplitude(qcore::kHH) - Complex(1, 0)) < 1e-15);
  }
  SUBCASE("theta = pi/4 with the rest swap gives the triplet") {
    const PawState s = prepare_state(kPi / 4, 0.0, true);
    CHECK(std::abs(s.psi.amplitude(qcore::kHV) - Complex(kInvSqrt2, 0)) < 1e-12);
    CHECK(std::abs(s.psi.amplitude(qcore::kVH) - Complex(kInvSqrt2, 0)) < 1e-12);
  }
  SUBCASE("phi = pi with the rest swap reaches the singlet up to phase") {
    const PawState s = prepare_state(kPi / 4, kPi, true);
    CHECK(qcore::distance_up_to_phase(s.psi, make_singlet().psi) < 1e-12);
  }
}

TEST_CASE("total_hamiltonian structure") {
  const double omega = 1.0;
  const Operator h = total_hamiltonian(omega);
  SUBCASE("Hermitian within 1e-12") { CHECK(h.is_hermitian()); }
  SUBCASE("H|HV> = i w (|HH> - |VV>)") {
    const std::vector<Complex> v = apply_vector(h, Ket::basis_state(4, qcore::kHV));
    CHECK(std::abs(v[qcore::kHH] - Complex(0, omega)) < 1e-12);
    CHECK(std::abs(v[qcore::kVV] - Complex(0, -omega)) < 1e-12);
    CHECK(std::abs(v[qcore::kHV]) < 1e-15);
    CHECK(std::abs(v[qcore::kVH]) < 1e-15);
    double n2 = 0.0;
    for (const Complex& z : v) n2 += std::norm(z);
    CHECK(std::sqrt(n2) == doctest::Approx(omega * std::numbers::sqrt2).epsilon(1e-12));
  }
  SUBCASE("eigenvalues are {-2w, 0, 0, 2w}") {
    for (double w : {1.0, 2.7}) {
      const auto eig = qcore::eig_hermitian(4, total_hamiltonian(w).entries());
      CHECK(eig.values[0] == doctest::Approx(-2 * w).epsilon(1e-12));
      CHECK(std::abs(eig.values[1]) < 1e-12);
      CHECK(std::abs(eig.values[2]) < 1e-12);
      CHECK(eig.values[3] == doctest::Approx(2 * w).epsilon(1e-12));
    }
  }
}

TEST_CASE("constraint_residual separates static from evolving states") {
  CHECK(constraint_residual(make_singlet()) < 1e-12);
  const ClockParams clock = ClockParams::make(1.0);
  const PawState hv{Ket::basis_state(4, qcore::kHV), clock};
  CHECK(constraint_residual(hv) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
  const PawState triplet = prepare_state(kPi / 4, 0.0, true);
  CHECK(constraint_residual(triplet) == doctest::Approx(2.0).epsilon(1e-12));
  // Scales with omega.
  const PawState hv3{Ket::basis_state(4, qcore::kHV), ClockParams::make(3.0)};
  CHECK(constraint_residual(hv3) == doctest::Approx(3.0 * std::numbers::sqrt2).epsilon(1e-12));
}

TEST_CASE("relational_state reproduces the conditioned evolution") {
  const PawState s = make_singlet();
  const Ket clock_h = Ket::basis_state(2, 0);
  SUBCASE("t = 0 projects onto |V>/sqrt2") {
    const Ket r = relational_state(s, clock_h, 0.0);
    CHECK(std::abs(r.amplitude(0)) < 1e-15);
    CHECK(std::abs(r.amplitude(1) - Complex(kInvSqrt2, 0)) < 1e-12);
  }
  SUBCASE("t = pi/2w lands on |H>/sqrt2") {
    const Ket r = relational_state(s, clock_h, kPi / 2);
    CHECK(std::abs(r.amplitude(0) - Complex(kInvSqrt2, 0)) < 1e-12);
    CHECK(std::abs(r.amplitude(1)) < 1e-12);
  }
  SUBCASE("t = pi/4w gives (|H>+|V>)/2") {
    const Ket r = relational_state(s, clock_h, kPi / 4);
    CHECK(std::abs(r.amplitude(0) - Complex(0.5, 0)) < 1e-12);
    CHECK(std::abs(r.amplitude(1) - Complex(0.5, 0)) < 1e-12);
  }
}

TEST_CASE("conditioned projection equals local evolution of the residue") {
  // <phi(t)|Psi> == exp(-i Hr t) <phi(0)|Psi> for the constrained state,
  // over random times and random complex clock states.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> time(-8.0, 8.0);
  const PawState s = make_singlet();
  for (int trial = 0; trial < 20; ++trial) {
    const Ket phi0 = test_oracles::random_ket(2, rng);
    for (int i = 0; i < 100; ++i) {
      const double t = time(rng);
      const Ket lhs = relational_state(s, phi0, t);
      const Ket rhs = apply(qcore::rotation_unitary(s.clock.omega * t),
                            relational_state(s, phi0, 0.0));
      double err = 0.0;
      for (int a = 0; a < 2; ++a) err += std::norm(lhs.amplitude(a) - rhs.amplitude(a));
      CHECK(std::sqrt(err) < 1e-12);
    }
  }
}

TEST_CASE("evolve_global closed forms") {
  const ClockParams clock = ClockParams::make(1.0);
  SUBCASE("singlet is pointwise invariant across coordinate time") {
    const PawState s = make_singlet();
    for (int i = 0; i < 100; ++i) {
      const double T = -10.0 + 0.2 * i;
      CHECK(qcore::distance_up_to_phase(evolve_global(s, T), s.psi) < 1e-12);
    }
  }
  SUBCASE("|HV> rotates to -|VH> after a quarter turn") {
    const PawState hv{Ket::basis_state(4, qcore::kHV), clock};
    const Ket out = evolve_global(hv, kPi / 2);
    CHECK(std::abs(out.amplitude(qcore::kVH) - Complex(-1, 0)) < 1e-12);
  }
  SUBCASE("pure clock delay rotates only the clock letter") {
    const PawState hv{Ket::basis_state(4, qcore::kHV), clock};
    const Ket out = evolve_global(hv, 0.0, kPi / 2);
    CHECK(std::abs(out.amplitude(qcore::kVV) - Complex(-1, 0)) < 1e-12);
  }
}

TEST_CASE("zero constraint residual is equivalent to staticity") {
  std::mt19937_64 rng(29);
  const ClockParams clock = ClockParams::make(1.0);
  SUBCASE("random null-space combinations stay put") {
    // The kernel of H is spanned by the singlet and (|HH>+|VV>)/sqrt2.
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const Complex a(gauss(rng), gauss(rng));
      const Complex b(gauss(rng), gauss(rng));
      std::vector<Complex> amps = {b * kInvSqrt2, a * kInvSqrt2, -a * kInvSqrt2, b * kInvSqrt2};
      const PawState s{Ket::unit(std::move(amps)), clock};
      CHECK(constraint_residual(s) < 1e-12);
      for (int i = 0; i < 25; ++i)
        CHECK(qcore::distance_up_to_phase(evolve_global(s, 0.4 * i), s.psi) < 1e-12);
    }
  }
  SUBCASE("states with a sizable residual move for some T") {
    for (int trial = 0; trial < 20; ++trial) {
      const PawState s{test_oracles::random_ket(4, rng), clock};
      if (constraint_residual(s) < 0.1) continue;
      double max_move = 0.0;
      for (int i = 1; i < 40; ++i)
        max_move = std::max(max_move, qcore::distance_up_to_phase(evolve_global(s, 0.05 * i), s.psi));
      CHECK(max_move > 1e-6);
    }
  }
}

TEST_CASE("observer conditionals implement the detector map") {
  SUBCASE("singlet sweep is flat and exact") {
    const PawState s = make_singlet();
    for (int i = 0; i < 15; ++i) {
      const double T = 2 * kPi * i / 15.0;
      const ConditionalTable t = observer_conditionals(s, T);
      REQUIRE(t.p31.has_value());
      REQUIRE(t.p32.has_value());
      // Exact: the anticorrelated cells vanish identically.
      CHECK(*t.p31 == 1.0);
      CHECK(*t.p32 == 0.0);
      CHECK(*t.p41 == 0.0);
      CHECK(*t.p42 == 1.0);
    }
  }
  SUBCASE("|HH> leaves the clock-V column undefined") {
    const PawState s{Ket::basis_state(4, qcore::kHH), ClockParams::make(1.0)};
    const ConditionalTable t = observer_conditionals(s, 0.0);
    REQUIRE(t.p31.has_value());
    CHECK(*t.p31 == 0.0);
    CHECK(*t.p41 == 1.0);
    CHECK(!t.p32.has_value());
    CHECK(!t.p42.has_value());
    CHECK(t.denom2 == 0.0);
  }
  SUBCASE("product state with diagonal rest gives 1/2") {
    const Ket psi = tensor(Ket::basis_state(2, 0),
                           Ket::normalized({Complex(kInvSqrt2, 0), Complex(kInvSqrt2, 0)}));
    const PawState s{psi, ClockParams::make(1.0)};
    const ConditionalTable t = observer_conditionals(s, 0.0);
    CHECK(*t.p31 == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("defined rows sum to one on random states") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 50; ++trial) {
      const PawState s{test_oracles::random_ket(4, rng), ClockParams::make(1.0)};
      const ConditionalTable t = observer_conditionals(s, 0.37 * trial);
      if (t.p31) CHECK(*t.p31 + *t.p41 == doctest::Approx(1.0).epsilon(1e-12));
      if (t.p32) CHECK(*t.p32 + *t.p42 == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("superobserver erasure restores the global state at chi = 0") {
  const PawState s = make_singlet();
  SUBCASE("singlet: erased state equals the singlet, prob 1/2") {
    for (double T : {0.0, 0.3, 1.7, 4.4}) {
      const ErasedState e = superobserver_erased_state(s, T);
      CHECK(e.postselect_prob == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(qcore::fidelity_pure(e.state, s.psi) == doctest::Approx(1.0).epsilon(1e-12));
      const qcore::DensityMatrix target = qcore::DensityMatrix::pure(s.psi);
      for (int i = 0; i < 16; ++i)
        CHECK(std::abs(e.state.entries()[i] - target.entries()[i]) < 1e-12);
    }
  }
  SUBCASE("|HV> at T = 0 comes back unchanged") {
    const PawState hv{Ket::basis_state(4, qcore::kHV), ClockParams::make(1.0)};
    const ErasedState e = superobserver_erased_state(hv, 0.0);
    CHECK(e.postselect_prob == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(e.state.entry(qcore::kHV, qcore::kHV) - Complex(1, 0)) < 1e-12);
  }
  SUBCASE("maximally mixed input passes through the channel") {
    const ErasedState e = erase_channel(qcore::DensityMatrix::maximally_mixed(4));
    CHECK(e.postselect_prob == doctest::Approx(0.5).epsilon(1e-12));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        CHECK(std::abs(e.state.entry(r, c) - Complex(r == c ? 0.25 : 0.0, 0)) < 1e-12);
  }
  SUBCASE("postselection probability is 1/2 for random states") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
      const PawState r{test_oracles::random_ket(4, rng), ClockParams::make(1.0)};
      CHECK(superobserver_erased_state(r, 0.9).postselect_prob ==
            doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  SUBCASE("a path phase degrades the singlet fidelity as cos^2(chi/2)") {
    for (double chi : {0.0, 0.6, kPi / 2, kPi}) {
      const ErasedState e = superobserver_erased_state(s, 1.1, chi);
      const double expected = std::cos(chi / 2) * std::cos(chi / 2);
      CHECK(qcore::fidelity_pure(e.state, s.psi) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("superobserver fidelity sweep") {
  const PawState s = make_singlet();
  SUBCASE("flat at one for the singlet") {
    std::vector<double> ts;
    for (int i = 0; i < 15; ++i) ts.push_back(2 * kPi * i / 15.0);
    const auto sweep = superobserver_fidelity_sweep(s, ts);
    REQUIRE(sweep.size() == 15);
    for (const auto& [T, f] : sweep) CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("|HV> against the singlet target reads 1/2 at T = 0") {
    const PawState hv{Ket::basis_state(4, qcore::kHV), ClockParams::make(1.0)};
    const std::vector<double> ts = {0.0};
    const auto sweep = superobserver_fidelity_sweep(hv, ts, s.psi);
    CHECK(sweep.at(0).second == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("empty sweep is empty") {
    CHECK(superobserver_fidelity_sweep(s, std::vector<double>{}).empty());
  }
}

TEST_SUITE_END();
