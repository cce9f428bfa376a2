#include <cmath>
#include <vector>

#include "seqmeas/errors.hpp"
#include "seqmeas/joint.hpp"
#include "seqmeas/pointer.hpp"

namespace seqmeas::joint {

namespace {

void check_unit_spectrum(const Observable& obs, const char* name) {
  for (double q : obs.eigenvalues())
    if (std::abs(std::abs(q) - 1.0) > 1e-9)
      throw ValidationError(std::string(name) + " must have eigenvalues in {-1, +1} for the walk");
}

COperator plus_projector(const Observable& obs) {
  for (int m = 0; m < obs.block_count(); ++m)
    if (obs.eigenvalue(m) > 0.0) return obs.projector(m);
  return COperator::Zero(obs.dim(), obs.dim());
}

// Amplitudes on the growing lattice of two pointers. Pointer' has taken sb
// steps and sits at j in [0, sb] (displacement 2j - sb in units of 1/K);
// likewise pointer'' at k in [0, sc]. The system part is stored in the
// eigenbasis of B so that a B-step is a pure index shift.
class Walker {
 public:
  Walker(const JointPointerSetup& setup)
      : k_(setup.steps), n_(setup.b.dim()), data_(static_cast<std::size_t>(k_ + 1) * (k_ + 1) * n_, 0.0) {
    const COperator& v = setup.b.basis();
    for (int n = 0; n < n_; ++n) plus_.push_back(setup.b.eigenvalue(setup.b.block_of(n)) > 0.0);
    const COperator pc = v.adjoint() * plus_projector(setup.c) * v;
    pc_.resize(static_cast<std::size_t>(n_) * n_);
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) pc_[r * n_ + c] = pc(r, c);
    const CVector start = v.adjoint() * setup.b1;
    for (int n = 0; n < n_; ++n) at(0, 0)[n] = start[n];
    post_ = v.adjoint() * setup.c1;
  }

  void step_b() {
    for (int k = 0; k <= sc_; ++k) {
      for (int j = sb_ + 1; j >= 1; --j) {
        Complex* dst = at(j, k);
        const Complex* src = at(j - 1, k);
        for (int n = 0; n < n_; ++n)
          if (plus_[n]) dst[n] = src[n];
      }
      Complex* first = at(0, k);
      for (int n = 0; n < n_; ++n)
        if (plus_[n]) first[n] = 0.0;
    }
    ++sb_;
  }

  void step_c() {
    std::vector<Complex> upper(n_), lower(n_);
    for (int j = 0; j <= sb_; ++j) {
      // Walk downwards so that the k-1 entry is still the old one when read.
      for (int k = sc_ + 1; k >= 0; --k) {
        Complex* cell = at(j, k);
        // upper = P old(k), lower = P old(k-1)
        std::swap(upper, lower);
        if (k == sc_ + 1) std::fill(upper.begin(), upper.end(), Complex(0.0));
        if (k >= 1) project(at(j, k - 1), lower.data());
        else std::fill(lower.begin(), lower.end(), Complex(0.0));
        for (int n = 0; n < n_; ++n) cell[n] += lower[n] - upper[n];
      }
    }
    ++sc_;
  }

  WalkAmplitude finish() const {
    WalkAmplitude out;
    out.steps = k_;
    out.phi = Eigen::MatrixXcd::Zero(k_ + 1, k_ + 1);
    for (int j = 0; j <= k_; ++j)
      for (int k = 0; k <= k_; ++k) {
        const Complex* cell = at(j, k);
        Complex sum = 0.0;
        for (int n = 0; n < n_; ++n) sum += std::conj(post_[n]) * cell[n];
        out.phi(j, k) = sum;
      }
    return out;
  }

 private:
  Complex* at(int j, int k) { return data_.data() + (static_cast<std::size_t>(j) * (k_ + 1) + k) * n_; }
  const Complex* at(int j, int k) const {
    return data_.data() + (static_cast<std::size_t>(j) * (k_ + 1) + k) * n_;
  }

  void project(const Complex* in, Complex* out) const {
    for (int r = 0; r < n_; ++r) {
      Complex sum = 0.0;
      for (int c = 0; c < n_; ++c) sum += pc_[r * n_ + c] * in[c];
      out[r] = sum;
    }
  }

  int k_;
  int n_;
  int sb_ = 0;
  int sc_ = 0;
  std::vector<Complex> data_;
  std::vector<bool> plus_;
  std::vector<Complex> pc_;
  CVector post_;
};

Eigen::MatrixXd gaussian_matrix(const ReadingGrid& grid, const WalkAmplitude& walk, double width) {
  Eigen::MatrixXd g(grid.points, walk.steps + 1);
  for (int p = 0; p < grid.points; ++p)
    for (int j = 0; j <= walk.steps; ++j) g(p, j) = probes::gaussian(grid.at(p) - walk.position(j), width);
  return g;
}

}  // namespace

void JointPointerSetup::validate() const {
  const int n = static_cast<int>(b1.size());
  if (n < 1 || c1.size() != n || b.dim() != n || c.dim() != n)
    throw ValidationError("b1, c1, B and C must share one dimension");
  if (std::abs(b1.norm() - 1.0) > 1e-10 || std::abs(c1.norm() - 1.0) > 1e-10)
    throw ValidationError("b1 and c1 must be normalized");
  check_unit_spectrum(b, "B");
  check_unit_spectrum(c, "C");
  if (!(std::abs(beta) <= 1.0)) throw ValidationError("beta must lie in [-1, 1]");
  if (!(width > 0.0)) throw ValidationError("pointer width must be positive");
  if (steps < 2 || steps % 2 != 0) throw ValidationError("walk steps must be a positive even number");
}

int solo_steps(double beta, int steps) {
  return static_cast<int>(std::floor(std::abs(beta) * steps + 1e-9));
}

WalkAmplitude pointer_walk(const JointPointerSetup& setup) {
  setup.validate();
  Walker walker(setup);
  const int solo = solo_steps(setup.beta, setup.steps);
  const bool b_first = setup.beta >= 0.0;
  for (int s = 0; s < solo; ++s) b_first ? walker.step_b() : walker.step_c();
  // Each joint step is one Trotter factor: the C displacement acts first.
  for (int s = solo; s < setup.steps; ++s) {
    walker.step_c();
    walker.step_b();
  }
  for (int s = 0; s < solo; ++s) b_first ? walker.step_c() : walker.step_b();
  return walker.finish();
}

double walk_post_selection(const WalkAmplitude& walk, double width) {
  const int n = walk.steps + 1;
  Eigen::MatrixXd overlap(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) overlap(a, b) = probes::gaussian_overlap(walk.position(a), walk.position(b), width);
  const Eigen::MatrixXcd x = overlap.cast<Complex>() * walk.phi * overlap.cast<Complex>();
  return (walk.phi.conjugate().cwiseProduct(x)).sum().real();
}

JointPointerMap pointer_joint_distribution(const JointPointerSetup& setup, const ReadingGrid& grid) {
  return pointer_joint_distribution(setup, pointer_walk(setup), grid);
}

JointPointerMap pointer_joint_distribution(const JointPointerSetup& setup, const WalkAmplitude& walk,
                                           const ReadingGrid& grid) {
  if (grid.points < 1 || !(grid.hi >= grid.lo)) throw ValidationError("reading grid is empty");
  const Eigen::MatrixXcd g = gaussian_matrix(grid, walk, setup.width).cast<Complex>();
  const Eigen::MatrixXcd psi = g * walk.phi * g.transpose();
  JointPointerMap out;
  out.grid = grid;
  out.probability = psi.cwiseAbs2();
  out.post_selection = walk_post_selection(walk, setup.width);
  return out;
}

}  // namespace seqmeas::joint
