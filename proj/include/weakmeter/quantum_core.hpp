#pragma once

// Dense complex linear algebra for Hilbert spaces of dimension 2..8.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace weakmeter {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr std::size_t kMinDim = 2;
inline constexpr std::size_t kMaxDim = 8;

// Square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  CMatrix(std::size_t dim, std::initializer_list<cplx> row_major);

  static CMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  CMatrix adjoint() const;
  CVector apply(std::span<const cplx> v) const;
  double max_abs_diff(const CMatrix& other) const;
  bool is_hermitian(double tol) const;

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator+(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator*(cplx s, const CMatrix& a);

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

cplx inner(std::span<const cplx> bra, std::span<const cplx> ket);  // <bra|ket>
double norm(std::span<const cplx> v);

// Pure state of the measured system; unit norm within 1e-12, 2 <= d <= 8.
class SystemState {
 public:
  explicit SystemState(CVector amplitudes);
  // Rescales to unit norm before validating.
  static SystemState normalized(CVector amplitudes);

  std::size_t dim() const { return amps_.size(); }
  const CVector& amplitudes() const { return amps_; }
  std::span<const cplx> span() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

 private:
  CVector amps_;
};

struct Eigensystem {
  std::vector<double> values;  // ascending
  CMatrix vectors;             // column k is the eigenvector of values[k]
};

// Cyclic Jacobi diagonalization of a Hermitian matrix. Each eigenvector is
// phase-fixed so its first nonzero component is real and nonnegative.
Eigensystem eigh(const CMatrix& hermitian);

// Hermitian observable together with its spectral decomposition.
class ObservableOp {
 public:
  explicit ObservableOp(CMatrix matrix);

  std::size_t dim() const { return matrix_.dim(); }
  const CMatrix& matrix() const { return matrix_; }
  const std::vector<double>& eigenvalues() const { return eig_.values; }
  const CMatrix& eigenvectors() const { return eig_.vectors; }
  CVector eigenvector(std::size_t k) const;
  double max_abs_eigenvalue() const;

 private:
  CMatrix matrix_;
  Eigensystem eig_;
};

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b);
Vec3 cross(const Vec3& a, const Vec3& b);

// Unit vector on the Bloch sphere.
class Direction {
 public:
  explicit Direction(const Vec3& v);
  // polar angle from +z, azimuth from +x in the xy plane
  static Direction from_angles(double polar, double azimuth);

  const Vec3& vec() const { return v_; }
  double x() const { return v_[0]; }
  double y() const { return v_[1]; }
  double z() const { return v_[2]; }

 private:
  Vec3 v_;
};

const CMatrix& pauli_x();
const CMatrix& pauli_y();
const CMatrix& pauli_z();

// n . sigma
ObservableOp spin_observable(const Direction& n);

// Spin-up eigenstate of n . sigma.
SystemState bloch_to_spinor(const Direction& n);

// exp(-i H tau) |s>, with tau = duration / hbar.
SystemState evolve_state(const SystemState& s, const ObservableOp& hamiltonian, double tau);

// <s|A|s>, real part.
double expectation(const SystemState& s, const ObservableOp& obs);

}  // namespace weakmeter
