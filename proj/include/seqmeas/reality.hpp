#pragma once

// Quantities that can be measured between two scheduled measurements without
// changing any existing probability: the earlier observable carried forward
// in time (Q-minus) and the later one carried backward (Q-plus).

#include <vector>

#include "seqmeas/hilbert.hpp"
#include "seqmeas/paths.hpp"

namespace seqmeas::reality {

using hilbert::Observable;

struct RealityPair {
  Observable minus;
  Observable plus;
  double t_prime;
  /// Frobenius norm of [Q-minus, Q-plus].
  double bracket_norm;
};

/// Q-minus = U(t', t_l) Q_l U^-1(t', t_l) and Q-plus = U^-1(t_{l+1}, t') Q_{l+1} U(t_{l+1}, t'),
/// both re-decomposed spectrally. Throws BadInterval unless t_l < t' < t_{l+1}.
RealityPair make_reality_pair(const paths::Schedule& s, int level, double t_prime);

enum class Which { Minus, Plus };

struct InsertionSpec {
  double t_prime;
  Which which;
};

struct InsertedCertainty {
  int position;  ///< index of the inserted measurement in the augmented schedule
  Which which;
  /// Smallest conditional probability that the inserted outcome repeats the
  /// neighbouring scheduled outcome, over branches with non-zero probability.
  double min_conditional;
  /// Branches skipped because their probability was (numerically) zero.
  int skipped_branches;
};

struct InsertionReport {
  paths::ProbabilityTable original;
  paths::ProbabilityTable augmented;
  /// Augmented table with every inserted index summed out.
  paths::ProbabilityTable marginal;
  double max_deviation;
  std::vector<InsertedCertainty> certainty;
  /// True when the marginal matches within `tolerance` and every inserted
  /// outcome is certain within it.
  bool holds(double tolerance) const;
};

/// Inserts the chosen element of reality at t' and compares statistics.
InsertionReport verify_cr_insertion(const paths::Schedule& s, int level, double t_prime, Which which);

/// Several insertions inside the same interval (t_l, t_{l+1}), each built from
/// the original schedule's Q_l or Q_{l+1}, applied in time order.
InsertionReport verify_insertions(const paths::Schedule& s, int level, const std::vector<InsertionSpec>& inserts);

}  // namespace seqmeas::reality
