#pragma once

// Dense complex linear algebra shared by every engine: observables with their
// spectral decomposition, unitary evolution and tensor products.

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace seqmeas::hilbert {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using COperator = Eigen::MatrixXcd;

// Relative gap below which two eigenvalues are treated as one.
inline constexpr double kDegeneracyTol = 1e-9;
// Relative bound on ||H - H^dagger||.
inline constexpr double kHermitianTol = 1e-12;

inline constexpr Complex kI{0.0, 1.0};

/// A Hermitian operator together with its grouping into distinct eigenvalues.
///
/// Blocks are stored in ascending eigenvalue order. Each block carries its
/// projector, its multiplicity and an orthonormal basis of the eigen-subspace.
/// Only the projectors are physically meaningful; the basis inside a
/// degenerate block is one arbitrary choice (phase-fixed so that the first
/// non-negligible component of every vector is real and positive).
class Observable {
 public:
  static Observable from_matrix(const COperator& matrix, double degeneracy_tol = kDegeneracyTol);

  /// Builds an observable from eigenvalues and orthonormal eigenvector columns.
  /// Equal eigenvalues (within tolerance) are merged into one block.
  static Observable from_eigenbasis(std::span<const double> eigenvalues, const COperator& basis,
                                    double degeneracy_tol = kDegeneracyTol);

  /// Builds an observable from distinct eigenvalues and their projectors.
  /// Throws ValidationError unless the projectors form a complete orthogonal set.
  static Observable from_projectors(std::span<const double> eigenvalues,
                                    std::span<const COperator> projectors);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  int block_count() const { return static_cast<int>(eigenvalues_.size()); }

  double eigenvalue(int block) const { return eigenvalues_.at(block); }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const COperator& projector(int block) const { return projectors_.at(block); }
  int multiplicity(int block) const { return multiplicities_.at(block); }

  const COperator& matrix() const { return matrix_; }

  /// Orthonormal eigenvectors as columns, grouped by block in ascending order.
  const COperator& basis() const { return basis_; }
  CVector basis_vector(int n) const { return basis_.col(n); }
  /// Block that basis vector `n` belongs to.
  int block_of(int n) const { return block_of_.at(n); }
  /// Basis-vector indices spanning `block`.
  std::vector<int> block_members(int block) const;

  bool non_degenerate() const { return block_count() == dim(); }

  /// Same projectors, eigenvalues replaced by `relabel(old)`. The map must be
  /// strictly increasing so that block order is kept.
  template <typename F>
  Observable relabeled(F&& relabel) const {
    std::vector<double> values;
    values.reserve(eigenvalues_.size());
    for (double q : eigenvalues_) values.push_back(relabel(q));
    Observable out = *this;
    out.set_eigenvalues(values);
    return out;
  }

 private:
  void set_eigenvalues(const std::vector<double>& values);
  void rebuild_matrix();

  COperator matrix_;
  std::vector<double> eigenvalues_;
  std::vector<COperator> projectors_;
  std::vector<int> multiplicities_;
  COperator basis_;
  std::vector<int> block_of_;
};

Observable spectral_decompose(const COperator& h, double degeneracy_tol = kDegeneracyTol);

/// Time-independent generator of the system's unitary evolution, or an explicit
/// list of unitaries between fixed breakpoints.
class Evolution {
 public:
  static Evolution from_hamiltonian(const COperator& h);
  static Evolution null(int dim);
  /// `unitaries[k]` maps breakpoints[k] to breakpoints[k+1].
  static Evolution from_unitaries(std::vector<double> breakpoints, std::vector<COperator> unitaries);

  int dim() const { return dim_; }
  bool has_hamiltonian() const { return has_hamiltonian_; }
  const COperator& hamiltonian() const { return hamiltonian_; }
  bool is_null() const;

  /// U(t_b, t_a). Throws BadInterval when t_b < t_a, or when an explicit
  /// evolution is asked for times other than its breakpoints.
  COperator evolve(double t_a, double t_b) const;

 private:
  int dim_ = 0;
  bool has_hamiltonian_ = true;
  COperator hamiltonian_;
  Eigen::VectorXd energies_;
  COperator eigenvectors_;
  std::vector<double> breakpoints_;
  std::vector<COperator> unitaries_;
};

COperator evolve(const Evolution& evolution, double t_a, double t_b);

/// Kronecker product, index = i_A * dim_B + i_B.
COperator tensor(const COperator& a, const COperator& b);
CVector tensor_vec(const CVector& u, const CVector& v);

bool is_hermitian(const COperator& h, double rel_tol = kHermitianTol);
bool is_unitary(const COperator& u, double tol);

COperator identity(int dim);
COperator pauli_x();
COperator pauli_y();
COperator pauli_z();
/// Pauli matrix along axis 'x', 'y' or 'z'.
COperator pauli(char axis);
/// Spin-1/2 eigenstate of sigma_axis with eigenvalue +1 (up) or -1 (down),
/// in the phase convention used throughout: |up_y> = (|0> + i|1>)/sqrt(2).
CVector spin_up(char axis);
CVector spin_down(char axis);
/// cos(theta) sigma_x + sin(theta) sigma_y.
COperator in_plane_spin(double theta);

/// Rotates the global phase so that the first component with modulus above
/// 1e-8 is real and positive.
CVector fix_phase(const CVector& v);

/// Uniformly distributed Hermitian matrix with entries of order one.
COperator random_hermitian(int dim, std::mt19937_64& rng);
/// Haar-random unitary via QR of a complex Ginibre matrix.
COperator random_unitary(int dim, std::mt19937_64& rng);

}  // namespace seqmeas::hilbert
