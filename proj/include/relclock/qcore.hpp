#pragma once

// Exact complex linear algebra for the two-polarization-qubit model:
// kets and operators of dimension 2 (one qubit) and 4 (clock ⊗ rest),
// the two birefringent-plate unitary models, projection, partial trace
// and fidelity. Everything is immutable after construction and every
// operation is a pure function.

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace relclock::qcore {

using Complex = std::complex<double>;

// Tolerance tiers. Exact algebra (closed forms, group identities) is held
// to 1e-12, quadrature averages to 1e-9; Monte Carlo quantities are judged
// by statistical bounds, not by these constants.
inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kQuadratureTol = 1e-9;
inline constexpr double kDensityTol = 1e-10;     // Hermiticity/trace of density matrices
inline constexpr double kPsdFloor = -1e-8;       // smallest admissible eigenvalue
inline constexpr double kNullOutcomeProb = 1e-14;

bool is_finite(Complex z);

// Subsystem labels for the fixed tensor order: the clock factor comes first.
// Basis order of the 4-dim space is |HH>, |HV>, |VH>, |VV> with the clock
// letter first, so index = 2*clock + rest with H=0, V=1.
enum class Subsystem { Clock, Rest };

inline constexpr int kHH = 0;
inline constexpr int kHV = 1;
inline constexpr int kVH = 2;
inline constexpr int kVV = 3;

// A pure state of dimension 2 or 4. Two families exist: normalized kets
// (|amplitudes|^2 summing to 1 within 1e-12) and subnormalized kets
// (post-selection residues, norm^2 <= 1 + 1e-12, flagged normalized=false).
class Ket {
 public:
  // Validates that the amplitudes already have unit norm.
  static Ket normalized(std::vector<Complex> amplitudes);
  // Rescales a nonzero vector to unit norm.
  static Ket unit(std::vector<Complex> amplitudes);
  // Validates norm^2 <= 1 + 1e-12 and flags the ket subnormalized.
  static Ket subnormalized(std::vector<Complex> amplitudes);
  static Ket basis_state(int dim, int index);

  int dim() const { return dim_; }
  bool is_normalized() const { return normalized_; }
  const std::vector<Complex>& amplitudes() const { return amps_; }
  Complex amplitude(int i) const { return amps_.at(static_cast<size_t>(i)); }
  double norm_sq() const;
  double norm() const;

 private:
  Ket(int dim, std::vector<Complex> amps, bool normalized);
  int dim_;
  std::vector<Complex> amps_;
  bool normalized_;
};

// <a|b>
Complex inner(const Ket& a, const Ket& b);

// ||a - e^{i phase} b|| minimized over the global phase, computed on the
// residual vector so that states equal up to rounding report ~1e-16, not
// the sqrt-amplified 1e-8.
double distance_up_to_phase(const Ket& a, const Ket& b);

// A dim x dim complex matrix, row-major. Construction through the flagged
// factories enforces the corresponding invariant: U†U = 1 within 1e-12 for
// unitaries, A = A† for Hermitian operators, P² = P = P† for projectors.
class Operator {
 public:
  enum Flags : unsigned {
    kNone = 0,
    kUnitary = 1u << 0,
    kHermitian = 1u << 1,
    kProjector = 1u << 2,
  };

  static Operator general(int dim, std::vector<Complex> entries);
  static Operator unitary(int dim, std::vector<Complex> entries);
  static Operator hermitian(int dim, std::vector<Complex> entries);
  static Operator projector(int dim, std::vector<Complex> entries);
  static Operator identity(int dim);
  // |ket><ket| of a normalized ket.
  static Operator dyad(const Ket& ket);

  int dim() const { return dim_; }
  Complex entry(int r, int c) const { return m_[static_cast<size_t>(r * dim_ + c)]; }
  const std::vector<Complex>& entries() const { return m_; }

  bool flagged_unitary() const { return flags_ & kUnitary; }
  bool flagged_hermitian() const { return flags_ & kHermitian; }
  bool flagged_projector() const { return flags_ & kProjector; }

  bool is_unitary(double tol = kAlgebraTol) const;
  bool is_hermitian(double tol = kAlgebraTol) const;
  bool is_projector(double tol = kAlgebraTol) const;

  Operator adjoint() const;
  double frobenius_norm() const;
  Complex trace() const;

  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(Complex s, const Operator& a);

 private:
  Operator(int dim, std::vector<Complex> m, unsigned flags);
  int dim_;
  std::vector<Complex> m_;
  unsigned flags_;
};

// A|psi> as a raw amplitude vector; no state-family invariant is imposed,
// so it is valid for non-unitary operators (Hamiltonians, Kraus pieces).
std::vector<Complex> apply_vector(const Operator& a, const Ket& psi);

// A|psi> as a Ket. The result must land back in one of the two state
// families (norm^2 <= 1 + 1e-12); throws otherwise.
Ket apply(const Operator& a, const Ket& psi);

// Tensor products on the fixed clock-first index order.
Ket tensor(const Ket& clock, const Ket& rest);
Operator tensor(const Operator& clock, const Operator& rest);

// exp(-i Hc t) for the polarization-rotation generator with theta = omega*t:
// |H> -> cos θ|H> - sin θ|V>,  |V> -> sin θ|H> + cos θ|V>.
Operator rotation_unitary(double theta);

// Birefringent-plate action of optical thickness delta, completed to the
// unitary cos δ·1 + i sin δ·X, so |V> -> cos δ|V> + i sin δ|H>. Gives the
// same H/V-basis detection statistics as rotation_unitary(delta).
Operator waveplate_unitary(double delta);

// P|psi> renormalized together with the outcome probability ||P|psi>||².
// Conditioning on an outcome of probability < 1e-14 yields an empty state
// (explicit null outcome, never NaN).
struct ProjectionOutcome {
  std::optional<Ket> state;
  double probability = 0.0;
  bool null_outcome() const { return !state.has_value(); }
};
ProjectionOutcome project_and_renorm(const Operator& p, const Ket& psi);

// Mixed states. dim 4 for the clock⊗rest space; dim 2 reduced states come
// out of partial_trace. `validated` enforces Hermiticity and unit trace
// within 1e-10 and eigenvalues >= -1e-8; `hermitian_unit_trace` skips the
// eigenvalue bound (linear tomography inversions may be unphysical and are
// flagged by the caller).
class DensityMatrix {
 public:
  static DensityMatrix validated(int dim, std::vector<Complex> entries);
  static DensityMatrix hermitian_unit_trace(int dim, std::vector<Complex> entries);
  static DensityMatrix pure(const Ket& psi);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return dim_; }
  Complex entry(int r, int c) const { return m_[static_cast<size_t>(r * dim_ + c)]; }
  const std::vector<Complex>& entries() const { return m_; }

  double trace_real() const;
  std::vector<double> eigenvalues() const;  // ascending
  double min_eigenvalue() const;
  bool is_physical(double floor = kPsdFloor) const;
  Operator as_operator() const;  // hermitian-flagged copy

 private:
  DensityMatrix(int dim, std::vector<Complex> m);
  int dim_;
  std::vector<Complex> m_;
};

// <psi|rho|psi>, checked real within 1e-12 and clipped to [0, 1].
double fidelity_pure(const DensityMatrix& rho, const Ket& psi);

// Reduced 2x2 state of a 4-dim density matrix.
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

// Eigenvalues (ascending) and eigenvectors (columns of `vectors`, row-major
// dim x dim) of a Hermitian matrix given by its row-major entries.
struct HermitianEigen {
  std::vector<double> values;
  std::vector<Complex> vectors;
};
HermitianEigen eig_hermitian(int dim, std::span<const Complex> entries);

}  // namespace relclock::qcore
