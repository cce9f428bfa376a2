#pragma once

// Weakly coupled probes inserted between accurate measurements. A weak gate
// either flips (the value of Q' becomes known) or passes undetected; a weak
// pointer is shifted by gamma Q' and its mean reading, conditioned on the
// accurate outcomes, tends to the real part of an amplitude ratio.

#include <span>
#include <vector>

#include "seqmeas/hilbert.hpp"
#include "seqmeas/paths.hpp"

namespace seqmeas::weak {

using hilbert::Complex;
using hilbert::Observable;

struct WeakGateConfig {
  double gamma;
  Observable observable;
  double t_prime;
};

struct WeakGateResult {
  /// Statistics of the accurate measurements with no weak probe at all.
  paths::ProbabilityTable unknown;
  /// One table per weak gate: that gate alone at full strength, its outcome
  /// summed out.
  std::vector<paths::ProbabilityTable> known;
  /// Runs where at least one weak probe flipped.
  paths::ProbabilityTable detected;
  /// Runs where every weak probe stayed in its initial state.
  paths::ProbabilityTable undetected;
  /// detected + undetected.
  paths::ProbabilityTable combined;
};

/// Exact statistics of the accurate measurements of `s` with weak gates of
/// strength gamma coupled at the given times; accurate gates are at full
/// strength. Keys are outcome sequences of the original schedule.
WeakGateResult weak_gate_distribution(const paths::Schedule& s, std::span<const WeakGateConfig> gates);
WeakGateResult weak_gate_distribution(const paths::Schedule& s, const WeakGateConfig& gate);

/// (1 - sum gamma^2) P_unknown + sum gamma^2 P_known, the small-gamma form.
paths::ProbabilityTable weak_gate_mixture(const WeakGateResult& result, std::span<const WeakGateConfig> gates);

struct WeakPointerConfig {
  double gamma;
  double width;
  Observable observable;
  double t_prime;
};

struct WeakValueReport {
  paths::OutcomeSequence conditioning;
  /// sum_m' Q'_m' A(... <- pi'_m' <- ...)
  Complex numerator;
  /// sum_m' A(... <- pi'_m' <- ...)
  Complex denominator;
  /// Re(numerator / denominator).
  double mean_reading;
  /// Im(numerator / denominator); diagnostic only.
  double imaginary_part;
  /// <f'> / gamma for the Gaussian pointer at the configured gamma and width,
  /// accurate outcomes read exactly.
  double exact_mean;
};

/// `conditioning` lists the accurate outcomes m_0..m_L of `s`. The final
/// observable must be non-degenerate. Throws ZeroDenominator when the
/// denominator vanishes.
WeakValueReport weak_pointer_mean(const paths::Schedule& s, const WeakPointerConfig& cfg,
                                  const paths::OutcomeSequence& conditioning);

}  // namespace seqmeas::weak
