#pragma once

// Two measurements of non-commuting observables B and C whose coupling
// intervals overlap. beta = 1 puts B strictly before C, beta = -1 puts C
// first, beta = 0 makes them simultaneous. Both probes start unflipped
// (gates) or at the origin (pointers); the system is prepared in b1 and
// post-selected in c1.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "seqmeas/hilbert.hpp"

namespace seqmeas::joint {

using hilbert::Complex;
using hilbert::COperator;
using hilbert::CVector;
using hilbert::Observable;

/// Projector pair of a two-outcome observable. `first` belongs to the outcome
/// that leaves the probe alone (the larger eigenvalue), `second` flips it.
struct ProjectorPair {
  COperator first;
  COperator second;
};

/// Splits a two-block observable into (upper block, lower block).
ProjectorPair projector_pair(const Observable& obs);

struct JointGateSetup {
  CVector b1;
  CVector c1;
  ProjectorPair b;
  ProjectorPair c;
  double beta = 0.0;

  /// Throws ValidationError unless the states are normalized, the pairs are
  /// complete orthogonal projectors of one dimension, and |beta| <= 1.
  void validate() const;
};

/// Setup from two-block observables B and C; b1 and c1 are the states given.
JointGateSetup make_gate_setup(const Observable& b, const Observable& c, const CVector& b1, const CVector& c1,
                               double beta);

struct JointGateResult {
  /// P(1',1''), P(1',2''), P(2',1''), P(2',2''), normalized.
  std::array<double, 4> p{};
  /// <j'|<j''| Phi_probes> before normalization, same order.
  std::array<Complex, 4> amplitudes{};
  /// Sum of |amplitude|^2: probability of the post-selection.
  double post_selection = 0.0;
};

/// Exact probe statistics, computed in the sigma_x eigenbasis of each probe.
/// Throws PostSelectionImpossible when every amplitude vanishes.
JointGateResult gate_joint_probabilities(const JointGateSetup& setup);

// ---------------------------------------------------------------------------
// Von Neumann pointers

struct JointPointerSetup {
  CVector b1;
  CVector c1;
  /// Both observables must have spectrum inside {-1, +1}.
  Observable b;
  Observable c;
  double beta = 0.0;
  double width = 0.05;
  int steps = 64;

  void validate() const;
};

/// Number of single-pointer steps before and after the joint segment.
int solo_steps(double beta, int steps);

/// Post-selected walk amplitude on the lattice y = -1 + 2 j / K of each
/// pointer: phi(j', j'') before convolution with the pointer Gaussians.
struct WalkAmplitude {
  int steps = 0;
  Eigen::MatrixXcd phi;  ///< (K+1) x (K+1), rows f', columns f''
  double position(int j) const { return -1.0 + 2.0 * j / steps; }
};

WalkAmplitude pointer_walk(const JointPointerSetup& setup);

struct ReadingGrid {
  double lo = -1.5;
  double hi = 1.5;
  int points = 81;
  double at(int k) const { return points == 1 ? lo : lo + (hi - lo) * k / (points - 1); }
  double spacing() const { return points == 1 ? 0.0 : (hi - lo) / (points - 1); }
};

struct JointPointerMap {
  ReadingGrid grid;
  /// |Psi(f', f'')|^2 on the grid; rows f', columns f''.
  Eigen::MatrixXd probability;
  /// Integral of |Psi|^2 over the whole plane, from exact Gaussian overlaps.
  double post_selection = 0.0;
};

/// Walk amplitude convolved with the pointer Gaussians and squared.
JointPointerMap pointer_joint_distribution(const JointPointerSetup& setup, const ReadingGrid& grid);
JointPointerMap pointer_joint_distribution(const JointPointerSetup& setup, const WalkAmplitude& walk,
                                           const ReadingGrid& grid);

/// Integral of |Psi|^2 over the plane for a given walk amplitude.
double walk_post_selection(const WalkAmplitude& walk, double width);

struct QuadratureOptions {
  double rel_tol = 1e-8;
  /// Upper limit of the lambda integral is cutoff / width.
  double cutoff = 12.0;
  int max_depth = 30;
};

/// Psi(f', f'') for simultaneous measurement (beta = 0), written as a single
/// integral over the radial pointer momentum. Requires B^2 = C^2 = 1 and
/// BC + CB = 0. Throws QuadratureNotConverged when adaptive refinement cannot
/// reach the requested tolerance.
Complex bessel_amplitude(const JointPointerSetup& setup, double f1, double f2, const QuadratureOptions& quad = {});

JointPointerMap bessel_distribution(const JointPointerSetup& setup, const ReadingGrid& grid,
                                    const QuadratureOptions& quad = {});

}  // namespace seqmeas::joint
