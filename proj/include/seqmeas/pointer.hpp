#pragma once

// Von Neumann pointers. An impulsive coupling shifts a Gaussian pointer by the
// eigenvalue of the block the system is in, so the final pointer state is a
// finite superposition of shifted Gaussians and is kept symbolically as a list
// of (shift, amplitude) packets.

#include <span>
#include <vector>

#include "seqmeas/hilbert.hpp"
#include "seqmeas/paths.hpp"

namespace seqmeas::probes {

using hilbert::Complex;

/// G(f) = (2 / (pi w^2))^(1/4) exp(-f^2 / w^2).
double gaussian(double f, double width);

/// <G(. - a) | G(. - b)> = exp(-(a - b)^2 / (2 w^2)).
double gaussian_overlap(double a, double b, double width);

/// Integral of G(f - a) G(f - b) over [lo, hi]; infinite bounds allowed.
double gaussian_product_integral(double a, double b, double width, double lo, double hi);

/// Integral of f G(f - a) G(f - b) over the real line.
double gaussian_product_first_moment(double a, double b, double width);

struct Packet {
  double shift;
  Complex amplitude;
};

/// sum_k c_k G(f - shift_k) for a single pointer of fixed width.
class PointerState {
 public:
  /// Packets whose shifts differ by less than `merge_tol` are combined.
  explicit PointerState(double width, double merge_tol = hilbert::kDegeneracyTol);

  void add(double shift, Complex amplitude);

  double width() const { return width_; }
  const std::vector<Packet>& packets() const { return packets_; }

  Complex wavefunction(double f) const;
  double norm2() const;
  Complex overlap(const PointerState& other) const;
  /// Probability weight (unnormalised) of readings in [lo, hi].
  double weight_in(double lo, double hi) const;
  /// <f> = int f |psi|^2 / int |psi|^2.
  double mean_position() const;

 private:
  double width_;
  double merge_tol_;
  std::vector<Packet> packets_;
};

/// One term of the final composite state: the system in basis vector
/// `final_index` of the last observable, pointer l (1..L) centred at
/// shifts[l-1], with the elementary amplitude of that path as coefficient.
struct PointerBranch {
  int final_index;
  std::vector<double> shifts;
  Complex amplitude;
};

/// Packet decomposition of the final system + pointers state for impulsive
/// couplings; branches whose shift tuples coincide are merged. The preparing
/// pointer is taken as read (it fixes the initial state) and is not listed.
std::vector<PointerBranch> pointer_final_state(const paths::Schedule& s);

/// Reading boundaries for one pointer: midpoints between consecutive
/// eigenvalues, so that bin m collects readings closest to eigenvalue m.
std::vector<double> reading_bin_edges(const hilbert::Observable& obs);

/// Probability that every pointer reading falls into the bin of a given block,
/// reported as a table over outcome sequences. `widths` holds either one width
/// for all pointers or one per pointer 1..L.
paths::ProbabilityTable pointer_kick_decomposition(const paths::Schedule& s, std::span<const double> widths);

/// Distribution over the final observable's blocks of the system state left
/// behind, with all pointers traced out.
std::vector<double> pointer_final_state_marginal(const paths::Schedule& s, std::span<const double> widths);

}  // namespace seqmeas::probes
