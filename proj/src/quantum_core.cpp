#include "weakmeter/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "weakmeter/errors.hpp"

namespace weakmeter {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kUnitTol = 1e-12;
constexpr int kMaxJacobiSweeps = 100;

void check_dim(std::size_t d, const char* what) {
  if (d < kMinDim || d > kMaxDim) {
    throw ValidationError(std::string(what) + ": dimension " + std::to_string(d) +
                          " outside supported range [2, 8]");
  }
}

// Multiply column k by a unit phase so its first nonzero entry is real >= 0.
void fix_column_phase(CMatrix& v, std::size_t k) {
  const std::size_t d = v.dim();
  double scale = 0.0;
  for (std::size_t r = 0; r < d; ++r) scale = std::max(scale, std::abs(v(r, k)));
  for (std::size_t r = 0; r < d; ++r) {
    const double mag = std::abs(v(r, k));
    if (mag > 1e-12 * scale) {
      const cplx phase = std::conj(v(r, k)) / mag;
      for (std::size_t i = 0; i < d; ++i) v(i, k) *= phase;
      v(r, k) = mag;
      return;
    }
  }
}

}  // namespace

CMatrix::CMatrix(std::size_t dim, std::initializer_list<cplx> row_major)
    : dim_(dim), data_(row_major) {
  if (data_.size() != dim * dim) throw ValidationError("CMatrix: element count does not match dimension");
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

CVector CMatrix::apply(std::span<const cplx> v) const {
  if (v.size() != dim_) throw ValidationError("CMatrix::apply: dimension mismatch");
  CVector out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    cplx acc = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) acc += (*this)(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

double CMatrix::max_abs_diff(const CMatrix& other) const {
  if (other.dim_ != dim_) throw ValidationError("CMatrix: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
  return m;
}

bool CMatrix::is_hermitian(double tol) const {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
  return true;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.dim_ != b.dim_) throw ValidationError("CMatrix: dimension mismatch");
  const std::size_t d = a.dim_;
  CMatrix out(d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t k = 0; k < d; ++k) {
      const cplx ark = a(r, k);
      for (std::size_t c = 0; c < d; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  if (a.dim_ != b.dim_) throw ValidationError("CMatrix: dimension mismatch");
  CMatrix out(a.dim_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] + b.data_[i];
  return out;
}

CMatrix operator*(cplx s, const CMatrix& a) {
  CMatrix out(a.dim_);
  for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = s * a.data_[i];
  return out;
}

cplx inner(std::span<const cplx> bra, std::span<const cplx> ket) {
  if (bra.size() != ket.size()) throw ValidationError("inner: dimension mismatch");
  cplx acc = 0.0;
  for (std::size_t i = 0; i < bra.size(); ++i) acc += std::conj(bra[i]) * ket[i];
  return acc;
}

double norm(std::span<const cplx> v) {
  double acc = 0.0;
  for (const auto& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

SystemState::SystemState(CVector amplitudes) : amps_(std::move(amplitudes)) {
  check_dim(amps_.size(), "SystemState");
  const double n = norm(amps_);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTol) {
    throw ValidationError("SystemState: norm " + std::to_string(n) + " is not 1");
  }
}

SystemState SystemState::normalized(CVector amplitudes) {
  const double n = norm(amplitudes);
  if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("SystemState: zero or non-finite vector");
  for (auto& a : amplitudes) a /= n;
  return SystemState(std::move(amplitudes));
}

Eigensystem eigh(const CMatrix& hermitian) {
  const std::size_t d = hermitian.dim();
  check_dim(d, "eigh");
  if (!hermitian.is_hermitian(kHermitianTol)) throw ValidationError("eigh: matrix is not Hermitian");

  CMatrix a = hermitian;
  CMatrix v = CMatrix::identity(d);

  double total = 0.0;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) total += std::norm(a(r, c));
  const double stop = 1e-30 * std::max(total, 1e-300);

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = r + 1; c < d; ++c) off += std::norm(a(r, c));
    if (off <= stop) break;

    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        // J = diag(1, e^{-i alpha}) * rotation(theta) zeroes a(p,q).
        const cplx phase = std::conj(a(p, q)) / r;
        const double theta = 0.5 * std::atan2(2.0 * r, a(q, q).real() - a(p, p).real());
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const cplx jpp = c, jpq = s, jqp = -s * phase, jqq = c * phase;

        for (std::size_t i = 0; i < d; ++i) {  // a <- a J, v <- v J
          const cplx aip = a(i, p), aiq = a(i, q);
          a(i, p) = aip * jpp + aiq * jqp;
          a(i, q) = aip * jpq + aiq * jqq;
          const cplx vip = v(i, p), viq = v(i, q);
          v(i, p) = vip * jpp + viq * jqp;
          v(i, q) = vip * jpq + viq * jqq;
        }
        for (std::size_t i = 0; i < d; ++i) {  // a <- J^dagger a
          const cplx api = a(p, i), aqi = a(q, i);
          a(p, i) = std::conj(jpp) * api + std::conj(jqp) * aqi;
          a(q, i) = std::conj(jpq) * api + std::conj(jqq) * aqi;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  Eigensystem out{std::vector<double>(d), CMatrix(d)};
  for (std::size_t k = 0; k < d; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < d; ++r) out.vectors(r, k) = v(r, order[k]);
    fix_column_phase(out.vectors, k);
  }
  return out;
}

ObservableOp::ObservableOp(CMatrix matrix) : matrix_(std::move(matrix)), eig_(eigh(matrix_)) {}

CVector ObservableOp::eigenvector(std::size_t k) const {
  CVector col(dim());
  for (std::size_t r = 0; r < dim(); ++r) col[r] = eig_.vectors(r, k);
  return col;
}

double ObservableOp::max_abs_eigenvalue() const {
  double m = 0.0;
  for (double a : eig_.values) m = std::max(m, std::abs(a));
  return m;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Direction::Direction(const Vec3& v) : v_(v) {
  const double n = std::sqrt(dot(v, v));
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTol) {
    throw ValidationError("Direction: norm " + std::to_string(n) + " is not 1");
  }
}

Direction Direction::from_angles(double polar, double azimuth) {
  const double sp = std::sin(polar);
  return Direction({sp * std::cos(azimuth), sp * std::sin(azimuth), std::cos(polar)});
}

const CMatrix& pauli_x() {
  static const CMatrix m(2, {0.0, 1.0, 1.0, 0.0});
  return m;
}

const CMatrix& pauli_y() {
  static const CMatrix m(2, {0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0});
  return m;
}

const CMatrix& pauli_z() {
  static const CMatrix m(2, {1.0, 0.0, 0.0, -1.0});
  return m;
}

ObservableOp spin_observable(const Direction& n) {
  return ObservableOp(cplx(n.x()) * pauli_x() + cplx(n.y()) * pauli_y() + cplx(n.z()) * pauli_z());
}

SystemState bloch_to_spinor(const Direction& n) {
  // (cos(g/2), e^{i f} sin(g/2)) via half-angle identities, no acos
  const double up = std::sqrt(std::max(0.0, 0.5 * (1.0 + n.z())));
  const double down = std::sqrt(std::max(0.0, 0.5 * (1.0 - n.z())));
  const double rho = std::hypot(n.x(), n.y());
  const cplx phase = rho > 0.0 ? cplx(n.x(), n.y()) / rho : cplx(1.0);
  return SystemState::normalized({up, phase * down});
}

SystemState evolve_state(const SystemState& s, const ObservableOp& hamiltonian, double tau) {
  if (s.dim() != hamiltonian.dim()) throw ValidationError("evolve_state: dimension mismatch");
  const std::size_t d = s.dim();
  const CMatrix& v = hamiltonian.eigenvectors();
  CVector out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    cplx proj = 0.0;  // <a_k|s>
    for (std::size_t r = 0; r < d; ++r) proj += std::conj(v(r, k)) * s[r];
    proj *= std::polar(1.0, -hamiltonian.eigenvalues()[k] * tau);
    for (std::size_t r = 0; r < d; ++r) out[r] += v(r, k) * proj;
  }
  return SystemState(std::move(out));
}

double expectation(const SystemState& s, const ObservableOp& obs) {
  return inner(s.span(), obs.matrix().apply(s.span())).real();
}

}  // namespace weakmeter
