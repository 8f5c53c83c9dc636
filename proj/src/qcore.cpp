#include "relclock/qcore.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relclock::qcore {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_dim(int dim) {
  require(dim == 2 || dim == 4, "dimension must be 2 or 4");
}

void check_finite(std::span<const Complex> v, const char* what) {
  for (const Complex& z : v) {
    require(is_finite(z), std::string(what) + " contains a non-finite entry");
  }
}

double norm_sq_of(std::span<const Complex> v) {
  double s = 0.0;
  for (const Complex& z : v) s += std::norm(z);
  return s;
}

Eigen::MatrixXcd to_eigen(int dim, std::span<const Complex> m) {
  Eigen::MatrixXcd a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = m[static_cast<size_t>(r * dim + c)];
  return a;
}

}  // namespace

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// ---------------------------------------------------------------------------
// Ket

Ket::Ket(int dim, std::vector<Complex> amps, bool normalized)
    : dim_(dim), amps_(std::move(amps)), normalized_(normalized) {}

Ket Ket::normalized(std::vector<Complex> amplitudes) {
  const int dim = static_cast<int>(amplitudes.size());
  check_dim(dim);
  check_finite(amplitudes, "ket");
  const double n2 = norm_sq_of(amplitudes);
  require(std::abs(n2 - 1.0) <= 1e-12,
          "normalized ket must have unit norm (|norm^2 - 1| = " + std::to_string(std::abs(n2 - 1.0)) + ")");
  return Ket(dim, std::move(amplitudes), true);
}

Ket Ket::unit(std::vector<Complex> amplitudes) {
  const int dim = static_cast<int>(amplitudes.size());
  check_dim(dim);
  check_finite(amplitudes, "ket");
  const double n = std::sqrt(norm_sq_of(amplitudes));
  require(n > 0.0, "cannot normalize the zero vector");
  for (Complex& z : amplitudes) z /= n;
  return Ket(dim, std::move(amplitudes), true);
}

Ket Ket::subnormalized(std::vector<Complex> amplitudes) {
  const int dim = static_cast<int>(amplitudes.size());
  check_dim(dim);
  check_finite(amplitudes, "ket");
  const double n2 = norm_sq_of(amplitudes);
  require(n2 <= 1.0 + 1e-12, "subnormalized ket must have norm^2 <= 1");
  return Ket(dim, std::move(amplitudes), false);
}

Ket Ket::basis_state(int dim, int index) {
  check_dim(dim);
  require(index >= 0 && index < dim, "basis index out of range");
  std::vector<Complex> a(static_cast<size_t>(dim), Complex(0.0, 0.0));
  a[static_cast<size_t>(index)] = 1.0;
  return Ket(dim, std::move(a), true);
}

double Ket::norm_sq() const { return norm_sq_of(amps_); }
double Ket::norm() const { return std::sqrt(norm_sq()); }

Complex inner(const Ket& a, const Ket& b) {
  require(a.dim() == b.dim(), "inner: dimension mismatch");
  Complex s(0.0, 0.0);
  for (int i = 0; i < a.dim(); ++i) s += std::conj(a.amplitude(i)) * b.amplitude(i);
  return s;
}

double distance_up_to_phase(const Ket& a, const Ket& b) {
  require(a.dim() == b.dim(), "distance_up_to_phase: dimension mismatch");
  const Complex ov = inner(b, a);  // <b|a>
  Complex phase(1.0, 0.0);
  const double mag = std::abs(ov);
  if (mag > 0.0) phase = ov / mag;  // aligns b onto a
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += std::norm(a.amplitude(i) - phase * b.amplitude(i));
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(int dim, std::vector<Complex> m, unsigned flags)
    : dim_(dim), m_(std::move(m)), flags_(flags) {}

Operator Operator::general(int dim, std::vector<Complex> entries) {
  check_dim(dim);
  require(entries.size() == static_cast<size_t>(dim * dim), "operator entry count mismatch");
  check_finite(entries, "operator");
  return Operator(dim, std::move(entries), kNone);
}

Operator Operator::unitary(int dim, std::vector<Complex> entries) {
  Operator a = general(dim, std::move(entries));
  require(a.is_unitary(), "operator flagged unitary fails U†U = 1 within 1e-12");
  a.flags_ |= kUnitary;
  return a;
}

Operator Operator::hermitian(int dim, std::vector<Complex> entries) {
  Operator a = general(dim, std::move(entries));
  require(a.is_hermitian(), "operator flagged Hermitian fails A = A† within 1e-12");
  a.flags_ |= kHermitian;
  return a;
}

Operator Operator::projector(int dim, std::vector<Complex> entries) {
  Operator a = general(dim, std::move(entries));
  require(a.is_projector(), "operator flagged projector fails P² = P = P† within 1e-12");
  a.flags_ |= kProjector | kHermitian;
  return a;
}

Operator Operator::identity(int dim) {
  check_dim(dim);
  std::vector<Complex> m(static_cast<size_t>(dim * dim), Complex(0.0, 0.0));
  for (int i = 0; i < dim; ++i) m[static_cast<size_t>(i * dim + i)] = 1.0;
  return Operator(dim, std::move(m), kUnitary | kHermitian | kProjector);
}

Operator Operator::dyad(const Ket& ket) {
  require(ket.is_normalized(), "dyad requires a normalized ket");
  const int d = ket.dim();
  std::vector<Complex> m(static_cast<size_t>(d * d));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      m[static_cast<size_t>(r * d + c)] = ket.amplitude(r) * std::conj(ket.amplitude(c));
  Operator a(d, std::move(m), kHermitian | kProjector);
  return a;
}

bool Operator::is_unitary(double tol) const {
  const int d = dim_;
  // U†U - 1, max-abs entry
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      Complex s(0.0, 0.0);
      for (int k = 0; k < d; ++k) s += std::conj(entry(k, r)) * entry(k, c);
      if (r == c) s -= 1.0;
      if (std::abs(s) > tol) return false;
    }
  }
  return true;
}

bool Operator::is_hermitian(double tol) const {
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      if (std::abs(entry(r, c) - std::conj(entry(c, r))) > tol) return false;
  return true;
}

bool Operator::is_projector(double tol) const {
  if (!is_hermitian(tol)) return false;
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) {
      Complex s(0.0, 0.0);
      for (int k = 0; k < dim_; ++k) s += entry(r, k) * entry(k, c);
      if (std::abs(s - entry(r, c)) > tol) return false;
    }
  }
  return true;
}

Operator Operator::adjoint() const {
  std::vector<Complex> m(m_.size());
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c) m[static_cast<size_t>(r * dim_ + c)] = std::conj(entry(c, r));
  return Operator(dim_, std::move(m), flags_);
}

double Operator::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& z : m_) s += std::norm(z);
  return std::sqrt(s);
}

Complex Operator::trace() const {
  Complex s(0.0, 0.0);
  for (int i = 0; i < dim_; ++i) s += entry(i, i);
  return s;
}

Operator operator*(const Operator& a, const Operator& b) {
  require(a.dim_ == b.dim_, "operator product: dimension mismatch");
  const int d = a.dim_;
  std::vector<Complex> m(static_cast<size_t>(d * d), Complex(0.0, 0.0));
  for (int r = 0; r < d; ++r)
    for (int k = 0; k < d; ++k) {
      const Complex ark = a.entry(r, k);
      for (int c = 0; c < d; ++c) m[static_cast<size_t>(r * d + c)] += ark * b.entry(k, c);
    }
  unsigned flags = Operator::kNone;
  if (a.flagged_unitary() && b.flagged_unitary()) flags |= Operator::kUnitary;
  return Operator(d, std::move(m), flags);
}

Operator operator+(const Operator& a, const Operator& b) {
  require(a.dim_ == b.dim_, "operator sum: dimension mismatch");
  std::vector<Complex> m(a.m_.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = a.m_[i] + b.m_[i];
  unsigned flags = Operator::kNone;
  if (a.flagged_hermitian() && b.flagged_hermitian()) flags |= Operator::kHermitian;
  return Operator(a.dim_, std::move(m), flags);
}

Operator operator-(const Operator& a, const Operator& b) {
  require(a.dim_ == b.dim_, "operator difference: dimension mismatch");
  std::vector<Complex> m(a.m_.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = a.m_[i] - b.m_[i];
  unsigned flags = Operator::kNone;
  if (a.flagged_hermitian() && b.flagged_hermitian()) flags |= Operator::kHermitian;
  return Operator(a.dim_, std::move(m), flags);
}

Operator operator*(Complex s, const Operator& a) {
  std::vector<Complex> m(a.m_.size());
  for (size_t i = 0; i < m.size(); ++i) m[i] = s * a.m_[i];
  return Operator(a.dim_, std::move(m), Operator::kNone);
}

std::vector<Complex> apply_vector(const Operator& a, const Ket& psi) {
  require(a.dim() == psi.dim(), "apply: dimension mismatch");
  const int d = a.dim();
  std::vector<Complex> out(static_cast<size_t>(d), Complex(0.0, 0.0));
  for (int r = 0; r < d; ++r) {
    Complex s(0.0, 0.0);
    for (int c = 0; c < d; ++c) s += a.entry(r, c) * psi.amplitude(c);
    out[static_cast<size_t>(r)] = s;
  }
  return out;
}

Ket apply(const Operator& a, const Ket& psi) {
  std::vector<Complex> v = apply_vector(a, psi);
  const double n2 = norm_sq_of(v);
  if (psi.is_normalized() && std::abs(n2 - 1.0) <= 1e-12) return Ket::normalized(std::move(v));
  require(n2 <= 1.0 + 1e-12, "apply: result leaves the (sub)normalized state family");
  return Ket::subnormalized(std::move(v));
}

Ket tensor(const Ket& clock, const Ket& rest) {
  require(clock.dim() == 2 && rest.dim() == 2, "ket tensor: operands must both be dim 2");
  std::vector<Complex> a(4);
  for (int c = 0; c < 2; ++c)
    for (int r = 0; r < 2; ++r)
      a[static_cast<size_t>(2 * c + r)] = clock.amplitude(c) * rest.amplitude(r);
  if (clock.is_normalized() && rest.is_normalized()) return Ket::normalized(std::move(a));
  return Ket::subnormalized(std::move(a));
}

Operator tensor(const Operator& clock, const Operator& rest) {
  require(clock.dim() == 2 && rest.dim() == 2, "operator tensor: operands must both be dim 2");
  std::vector<Complex> m(16);
  for (int cr = 0; cr < 2; ++cr)
    for (int rr = 0; rr < 2; ++rr)
      for (int cc = 0; cc < 2; ++cc)
        for (int rc = 0; rc < 2; ++rc)
          m[static_cast<size_t>((2 * cr + rr) * 4 + (2 * cc + rc))] =
              clock.entry(cr, cc) * rest.entry(rr, rc);
  // Flags are inherited through the validating factories; tensor products of
  // flagged operators satisfy the same identities up to rounding.
  if (clock.flagged_unitary() && rest.flagged_unitary()) return Operator::unitary(4, std::move(m));
  if (clock.flagged_projector() && rest.flagged_projector()) return Operator::projector(4, std::move(m));
  if (clock.flagged_hermitian() && rest.flagged_hermitian()) return Operator::hermitian(4, std::move(m));
  return Operator::general(4, std::move(m));
}

Operator rotation_unitary(double theta) {
  require(std::isfinite(theta), "rotation angle must be finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Operator::unitary(2, {Complex(c, 0.0), Complex(s, 0.0), Complex(-s, 0.0), Complex(c, 0.0)});
}

Operator waveplate_unitary(double delta) {
  require(std::isfinite(delta), "plate thickness must be finite");
  const double c = std::cos(delta);
  const double s = std::sin(delta);
  return Operator::unitary(2, {Complex(c, 0.0), Complex(0.0, s), Complex(0.0, s), Complex(c, 0.0)});
}

ProjectionOutcome project_and_renorm(const Operator& p, const Ket& psi) {
  require(p.dim() == psi.dim(), "project_and_renorm: dimension mismatch");
  require(p.flagged_projector() || p.is_projector(), "project_and_renorm requires an idempotent Hermitian operator");
  std::vector<Complex> v = apply_vector(p, psi);
  double prob = norm_sq_of(v);
  if (prob < kNullOutcomeProb) {
    return ProjectionOutcome{std::nullopt, std::max(prob, 0.0)};
  }
  const double n = std::sqrt(prob);
  for (Complex& z : v) z /= n;
  prob = std::min(prob, 1.0);
  return ProjectionOutcome{Ket::normalized(std::move(v)), prob};
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(int dim, std::vector<Complex> m) : dim_(dim), m_(std::move(m)) {}

DensityMatrix DensityMatrix::hermitian_unit_trace(int dim, std::vector<Complex> entries) {
  check_dim(dim);
  require(entries.size() == static_cast<size_t>(dim * dim), "density matrix entry count mismatch");
  check_finite(entries, "density matrix");
  double tr = 0.0;
  for (int i = 0; i < dim; ++i) tr += entries[static_cast<size_t>(i * dim + i)].real();
  require(std::abs(tr - 1.0) <= kDensityTol, "density matrix must have unit trace within 1e-10");
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const Complex d = entries[static_cast<size_t>(r * dim + c)] -
                        std::conj(entries[static_cast<size_t>(c * dim + r)]);
      require(std::abs(d) <= kDensityTol, "density matrix must be Hermitian within 1e-10");
    }
  return DensityMatrix(dim, std::move(entries));
}

DensityMatrix DensityMatrix::validated(int dim, std::vector<Complex> entries) {
  DensityMatrix rho = hermitian_unit_trace(dim, std::move(entries));
  require(rho.min_eigenvalue() >= kPsdFloor, "density matrix has an eigenvalue below -1e-8");
  return rho;
}

DensityMatrix DensityMatrix::pure(const Ket& psi) {
  require(psi.is_normalized(), "pure density matrix requires a normalized ket");
  const int d = psi.dim();
  std::vector<Complex> m(static_cast<size_t>(d * d));
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      m[static_cast<size_t>(r * d + c)] = psi.amplitude(r) * std::conj(psi.amplitude(c));
  return DensityMatrix(d, std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  check_dim(dim);
  std::vector<Complex> m(static_cast<size_t>(dim * dim), Complex(0.0, 0.0));
  for (int i = 0; i < dim; ++i) m[static_cast<size_t>(i * dim + i)] = 1.0 / dim;
  return DensityMatrix(dim, std::move(m));
}

double DensityMatrix::trace_real() const {
  double tr = 0.0;
  for (int i = 0; i < dim_; ++i) tr += entry(i, i).real();
  return tr;
}

std::vector<double> DensityMatrix::eigenvalues() const {
  return eig_hermitian(dim_, m_).values;
}

double DensityMatrix::min_eigenvalue() const { return eigenvalues().front(); }

bool DensityMatrix::is_physical(double floor) const { return min_eigenvalue() >= floor; }

Operator DensityMatrix::as_operator() const {
  // Symmetrize so the hermitian factory accepts entries that are Hermitian
  // only within the density tolerance.
  std::vector<Complex> m(m_.size());
  for (int r = 0; r < dim_; ++r)
    for (int c = 0; c < dim_; ++c)
      m[static_cast<size_t>(r * dim_ + c)] =
          0.5 * (entry(r, c) + std::conj(entry(c, r)));
  return Operator::hermitian(dim_, std::move(m));
}

double fidelity_pure(const DensityMatrix& rho, const Ket& psi) {
  require(psi.is_normalized(), "fidelity_pure requires a normalized ket");
  require(rho.dim() == psi.dim(), "fidelity_pure: dimension mismatch");
  Complex f(0.0, 0.0);
  for (int r = 0; r < rho.dim(); ++r)
    for (int c = 0; c < rho.dim(); ++c)
      f += std::conj(psi.amplitude(r)) * rho.entry(r, c) * psi.amplitude(c);
  require(std::abs(f.imag()) <= 1e-12, "fidelity_pure: <psi|rho|psi> not real within 1e-12");
  return std::clamp(f.real(), 0.0, 1.0);
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
  require(rho.dim() == 4, "partial_trace requires a dim-4 state");
  std::vector<Complex> m(4, Complex(0.0, 0.0));
  if (keep == Subsystem::Clock) {
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c)
        for (int b = 0; b < 2; ++b)
          m[static_cast<size_t>(a * 2 + c)] += rho.entry(2 * a + b, 2 * c + b);
  } else {
    for (int b = 0; b < 2; ++b)
      for (int d = 0; d < 2; ++d)
        for (int a = 0; a < 2; ++a)
          m[static_cast<size_t>(b * 2 + d)] += rho.entry(2 * a + b, 2 * a + d);
  }
  return DensityMatrix::validated(2, std::move(m));
}

HermitianEigen eig_hermitian(int dim, std::span<const Complex> entries) {
  check_dim(dim);
  require(entries.size() == static_cast<size_t>(dim * dim), "eig_hermitian entry count mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(dim, entries));
  require(solver.info() == Eigen::Success, "Hermitian eigendecomposition failed");
  HermitianEigen out;
  out.values.resize(static_cast<size_t>(dim));
  out.vectors.resize(static_cast<size_t>(dim * dim));
  for (int i = 0; i < dim; ++i) out.values[static_cast<size_t>(i)] = solver.eigenvalues()(i);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      out.vectors[static_cast<size_t>(r * dim + c)] = solver.eigenvectors()(r, c);
  return out;
}

}  // namespace relclock::qcore
