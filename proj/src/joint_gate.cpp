#include <cmath>
#include <numbers>

#include "seqmeas/errors.hpp"
#include "seqmeas/joint.hpp"

namespace seqmeas::joint {

namespace {

constexpr double kStateTol = 1e-10;

bool is_projector(const COperator& p) {
  return p.rows() == p.cols() && (p * p - p).norm() <= 1e-10 && hilbert::is_hermitian(p, 1e-10);
}

void check_pair(const ProjectorPair& pair, int dim, const char* name) {
  if (pair.first.rows() != dim || pair.second.rows() != dim)
    throw ValidationError(std::string(name) + " projectors do not match the system dimension");
  if (!is_projector(pair.first) || !is_projector(pair.second))
    throw ValidationError(std::string(name) + " pair contains a non-projector");
  if ((pair.first * pair.second).norm() > 1e-10)
    throw ValidationError(std::string(name) + " projectors are not orthogonal");
  if ((pair.first + pair.second - COperator::Identity(dim, dim)).norm() > 1e-10)
    throw ValidationError(std::string(name) + " projectors are not complete");
}

// exp(i phase pi) for a projector pi.
COperator phase_on(const COperator& pi, double phase) {
  return COperator::Identity(pi.rows(), pi.cols()) + (std::exp(Complex(0.0, phase)) - 1.0) * pi;
}

}  // namespace

ProjectorPair projector_pair(const Observable& obs) {
  if (obs.block_count() != 2) throw ValidationError("joint measurement needs two-outcome observables");
  return {obs.projector(1), obs.projector(0)};
}

void JointGateSetup::validate() const {
  const int n = static_cast<int>(b1.size());
  if (n < 1 || c1.size() != n) throw ValidationError("b1 and c1 must share one dimension");
  if (std::abs(b1.norm() - 1.0) > kStateTol || std::abs(c1.norm() - 1.0) > kStateTol)
    throw ValidationError("b1 and c1 must be normalized");
  check_pair(b, n, "B");
  check_pair(c, n, "C");
  if (!(std::abs(beta) <= 1.0)) throw ValidationError("beta must lie in [-1, 1]");
}

JointGateSetup make_gate_setup(const Observable& b, const Observable& c, const CVector& b1, const CVector& c1,
                               double beta) {
  JointGateSetup setup{b1, c1, projector_pair(b), projector_pair(c), beta};
  setup.validate();
  return setup;
}

JointGateResult gate_joint_probabilities(const JointGateSetup& setup) {
  setup.validate();
  const double a = std::abs(setup.beta);
  const double half_pi = std::numbers::pi / 2.0;
  const COperator& pb = setup.b.second;
  const COperator& pc = setup.c.second;

  // U[l1][l2] for probe eigenvalues lambda = +1 (index 0) and -1 (index 1).
  Complex u[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double l1 = i == 0 ? 1.0 : -1.0;
      const double l2 = j == 0 ? 1.0 : -1.0;
      // exp(i pi (1 - |beta|) (l1 pb + l2 pc) / 2); the generator is Hermitian.
      const COperator gen = l1 * pb + l2 * pc;
      const COperator overlap = (1.0 - a) == 0.0
                                    ? COperator::Identity(pb.rows(), pb.cols())
                                    : hilbert::Evolution::from_hamiltonian(-gen).evolve(0.0, half_pi * (1.0 - a));
      const COperator solo_b = phase_on(pb, half_pi * l1 * a);
      const COperator solo_c = phase_on(pc, half_pi * l2 * a);
      const COperator total = setup.beta >= 0.0 ? COperator(solo_c * overlap * solo_b)
                                                : COperator(solo_b * overlap * solo_c);
      u[i][j] = setup.c1.dot(total * setup.b1);
    }
  }

  // <1|D(l)> = 1/sqrt2, <2|D(l)> = l/sqrt2, with the 1/2 of the initial expansion.
  JointGateResult out;
  for (int jp = 0; jp < 2; ++jp) {
    for (int jpp = 0; jpp < 2; ++jpp) {
      Complex sum = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double s1 = (jp == 1 && i == 1) ? -1.0 : 1.0;
          const double s2 = (jpp == 1 && j == 1) ? -1.0 : 1.0;
          sum += u[i][j] * s1 * s2;
        }
      out.amplitudes[2 * jp + jpp] = sum / 4.0;
    }
  }
  for (const Complex& amp : out.amplitudes) out.post_selection += std::norm(amp);
  if (!(out.post_selection > 1e-28)) throw PostSelectionImpossible("post-selection in c1 has zero probability");
  for (int k = 0; k < 4; ++k) out.p[k] = std::norm(out.amplitudes[k]) / out.post_selection;
  return out;
}

}  // namespace seqmeas::joint
