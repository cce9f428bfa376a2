#include "seqmeas/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqmeas/errors.hpp"

namespace seqmeas::hilbert {

namespace {

// Groups ascending values into runs whose consecutive gaps stay below `gap`.
std::vector<std::pair<int, int>> group_runs(const std::vector<double>& sorted, double gap) {
  std::vector<std::pair<int, int>> runs;
  int start = 0;
  for (int k = 1; k <= static_cast<int>(sorted.size()); ++k) {
    if (k == static_cast<int>(sorted.size()) || sorted[k] - sorted[k - 1] >= gap) {
      runs.emplace_back(start, k);
      start = k;
    }
  }
  return runs;
}

}  // namespace

CVector fix_phase(const CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > 1e-8) return v * (std::conj(v[i]) / mag);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Observable

Observable Observable::from_matrix(const COperator& matrix, double degeneracy_tol) {
  if (matrix.rows() < 1 || matrix.rows() != matrix.cols())
    throw ValidationError("observable matrix must be square with dim >= 1");
  if (!(degeneracy_tol > 0.0)) throw ValidationError("degeneracy tolerance must be positive");
  if (!is_hermitian(matrix)) throw NotHermitian("observable matrix is not Hermitian");

  const COperator herm = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<COperator> solver(herm);
  if (solver.info() != Eigen::Success) throw ValidationError("eigendecomposition failed");

  const Eigen::VectorXd values = solver.eigenvalues();
  std::vector<double> sorted(values.data(), values.data() + values.size());
  Observable out = from_eigenbasis(sorted, solver.eigenvectors(), degeneracy_tol);
  out.matrix_ = herm;
  return out;
}

Observable Observable::from_eigenbasis(std::span<const double> eigenvalues, const COperator& basis,
                                       double degeneracy_tol) {
  const int n = static_cast<int>(basis.rows());
  if (n < 1 || basis.cols() != n || static_cast<int>(eigenvalues.size()) != n)
    throw ValidationError("eigenbasis must be square and match the number of eigenvalues");
  if ((basis.adjoint() * basis - COperator::Identity(n, n)).norm() > 1e-10)
    throw ValidationError("eigenbasis is not orthonormal");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return eigenvalues[a] < eigenvalues[b]; });
  std::vector<double> sorted;
  for (int k : order) sorted.push_back(eigenvalues[k]);

  double radius = 0.0;
  for (double q : sorted) radius = std::max(radius, std::abs(q));

  Observable out;
  out.basis_.resize(n, n);
  out.block_of_.assign(n, 0);
  int column = 0;
  for (auto [lo, hi] : group_runs(sorted, degeneracy_tol * std::max(1.0, radius))) {
    const int block = static_cast<int>(out.eigenvalues_.size());
    double mean = 0.0;
    COperator proj = COperator::Zero(n, n);
    for (int k = lo; k < hi; ++k) {
      const CVector v = fix_phase(basis.col(order[k]));
      out.basis_.col(column) = v;
      out.block_of_[column] = block;
      ++column;
      proj += v * v.adjoint();
      mean += sorted[k];
    }
    out.eigenvalues_.push_back(mean / (hi - lo));
    out.projectors_.push_back(proj);
    out.multiplicities_.push_back(hi - lo);
  }
  out.rebuild_matrix();
  return out;
}

Observable Observable::from_projectors(std::span<const double> eigenvalues,
                                       std::span<const COperator> projectors) {
  if (eigenvalues.empty() || eigenvalues.size() != projectors.size())
    throw ValidationError("need one projector per eigenvalue");
  const int n = static_cast<int>(projectors.front().rows());
  const COperator id = COperator::Identity(n, n);
  COperator sum = COperator::Zero(n, n);

  std::vector<int> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return eigenvalues[a] < eigenvalues[b]; });

  Observable out;
  out.basis_.resize(n, n);
  out.block_of_.assign(n, 0);
  int column = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const COperator& p = projectors[order[k]];
    if (p.rows() != n || p.cols() != n) throw ValidationError("projector dimensions differ");
    if ((p * p - p).norm() > 1e-10 || (p - p.adjoint()).norm() > 1e-10)
      throw ValidationError("operator is not an orthogonal projector");
    if (k > 0 && !(eigenvalues[order[k]] > eigenvalues[order[k - 1]]))
      throw ValidationError("eigenvalues must be distinct");
    sum += p;

    Eigen::SelfAdjointEigenSolver<COperator> solver(0.5 * (p + p.adjoint()));
    const int block = static_cast<int>(k);
    int rank = 0;
    for (int j = n - 1; j >= 0; --j) {
      if (solver.eigenvalues()[j] < 0.5) break;
      if (column >= n) throw ValidationError("projectors are not orthogonal");
      out.basis_.col(column) = fix_phase(solver.eigenvectors().col(j));
      out.block_of_[column] = block;
      ++column;
      ++rank;
    }
    if (rank == 0) throw ValidationError("zero projector");
    out.eigenvalues_.push_back(eigenvalues[order[k]]);
    out.projectors_.push_back(p);
    out.multiplicities_.push_back(rank);
  }
  if ((sum - id).norm() > 1e-10 || column != n) throw ValidationError("projectors are not complete");
  for (std::size_t a = 0; a < out.projectors_.size(); ++a)
    for (std::size_t b = a + 1; b < out.projectors_.size(); ++b)
      if ((out.projectors_[a] * out.projectors_[b]).norm() > 1e-10)
        throw ValidationError("projectors are not orthogonal");
  out.rebuild_matrix();
  return out;
}

std::vector<int> Observable::block_members(int block) const {
  std::vector<int> members;
  for (int n = 0; n < dim(); ++n)
    if (block_of_[n] == block) members.push_back(n);
  return members;
}

void Observable::set_eigenvalues(const std::vector<double>& values) {
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] > values[k - 1])) throw ValidationError("relabeling must be strictly increasing");
  eigenvalues_ = values;
  rebuild_matrix();
}

void Observable::rebuild_matrix() {
  const int n = static_cast<int>(projectors_.front().rows());
  matrix_ = COperator::Zero(n, n);
  for (std::size_t k = 0; k < projectors_.size(); ++k) matrix_ += eigenvalues_[k] * projectors_[k];
}

Observable spectral_decompose(const COperator& h, double degeneracy_tol) {
  return Observable::from_matrix(h, degeneracy_tol);
}

// ---------------------------------------------------------------------------
// Evolution

Evolution Evolution::from_hamiltonian(const COperator& h) {
  if (h.rows() < 1 || h.rows() != h.cols()) throw ValidationError("Hamiltonian must be square");
  if (!is_hermitian(h)) throw NotHermitian("Hamiltonian is not Hermitian");
  Evolution out;
  out.dim_ = static_cast<int>(h.rows());
  out.hamiltonian_ = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<COperator> solver(out.hamiltonian_);
  out.energies_ = solver.eigenvalues();
  out.eigenvectors_ = solver.eigenvectors();
  return out;
}

Evolution Evolution::null(int dim) { return from_hamiltonian(COperator::Zero(dim, dim)); }

Evolution Evolution::from_unitaries(std::vector<double> breakpoints, std::vector<COperator> unitaries) {
  if (unitaries.empty() || breakpoints.size() != unitaries.size() + 1)
    throw ValidationError("need exactly one unitary per breakpoint interval");
  for (std::size_t k = 1; k < breakpoints.size(); ++k)
    if (!(breakpoints[k] > breakpoints[k - 1])) throw ValidationError("breakpoints must increase");
  const auto dim = unitaries.front().rows();
  for (const auto& u : unitaries) {
    if (u.rows() != dim || u.cols() != dim) throw ValidationError("unitaries must share one dimension");
    if (!is_unitary(u, 1e-10 * static_cast<double>(dim))) throw ValidationError("operator is not unitary");
  }
  Evolution out;
  out.dim_ = static_cast<int>(dim);
  out.has_hamiltonian_ = false;
  out.breakpoints_ = std::move(breakpoints);
  out.unitaries_ = std::move(unitaries);
  return out;
}

bool Evolution::is_null() const { return has_hamiltonian_ && hamiltonian_.isZero(0.0); }

COperator Evolution::evolve(double t_a, double t_b) const {
  if (t_b < t_a) throw BadInterval("evolution requested backwards in time");
  const COperator id = COperator::Identity(dim_, dim_);
  if (has_hamiltonian_) {
    if (is_null() || t_b == t_a) return id;
    const double dt = t_b - t_a;
    Eigen::VectorXcd phases(energies_.size());
    for (Eigen::Index k = 0; k < energies_.size(); ++k) phases[k] = std::exp(-kI * (energies_[k] * dt));
    return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
  }

  auto locate = [&](double t) {
    for (std::size_t k = 0; k < breakpoints_.size(); ++k)
      if (std::abs(breakpoints_[k] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return static_cast<int>(k);
    throw BadInterval("explicit evolution is only defined between its breakpoints");
  };
  const int a = locate(t_a);
  const int b = locate(t_b);
  COperator u = id;
  for (int k = a; k < b; ++k) u = unitaries_[k] * u;
  return u;
}

COperator evolve(const Evolution& evolution, double t_a, double t_b) { return evolution.evolve(t_a, t_b); }

// ---------------------------------------------------------------------------
// Tensor products and helpers

COperator tensor(const COperator& a, const COperator& b) {
  COperator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector tensor_vec(const CVector& u, const CVector& v) {
  CVector out(u.size() * v.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out.segment(i * v.size(), v.size()) = u[i] * v;
  return out;
}

bool is_hermitian(const COperator& h, double rel_tol) {
  if (h.rows() != h.cols()) return false;
  const double diff = (h - h.adjoint()).norm();
  return diff == 0.0 || diff <= rel_tol * h.norm();
}

bool is_unitary(const COperator& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - COperator::Identity(u.rows(), u.cols())).norm() <= tol;
}

COperator identity(int dim) { return COperator::Identity(dim, dim); }

COperator pauli_x() {
  COperator m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

COperator pauli_y() {
  COperator m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

COperator pauli_z() {
  COperator m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

COperator pauli(char axis) {
  switch (axis) {
    case 'x': return pauli_x();
    case 'y': return pauli_y();
    case 'z': return pauli_z();
    default: throw ValidationError(std::string("unknown spin axis '") + axis + "'");
  }
}

CVector spin_up(char axis) {
  const double r = 1.0 / std::sqrt(2.0);
  CVector v(2);
  switch (axis) {
    case 'x': v << r, r; break;
    case 'y': v << r, kI * r; break;
    case 'z': v << 1.0, 0.0; break;
    default: throw ValidationError(std::string("unknown spin axis '") + axis + "'");
  }
  return v;
}

CVector spin_down(char axis) {
  const double r = 1.0 / std::sqrt(2.0);
  CVector v(2);
  switch (axis) {
    case 'x': v << r, -r; break;
    case 'y': v << r, -kI * r; break;
    case 'z': v << 0.0, 1.0; break;
    default: throw ValidationError(std::string("unknown spin axis '") + axis + "'");
  }
  return v;
}

COperator in_plane_spin(double theta) { return std::cos(theta) * pauli_x() + std::sin(theta) * pauli_y(); }

COperator random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  COperator a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return 0.5 * (a + a.adjoint());
}

COperator random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  COperator a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<COperator> qr(a);
  COperator q = qr.householderQ();
  const COperator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

}  // namespace seqmeas::hilbert
