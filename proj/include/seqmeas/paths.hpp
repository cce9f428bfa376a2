#pragma once

// Statistics of consecutive projective measurements from Feynman path
// amplitudes: the system evolves unitarily between measurements and each
// measurement inserts the projector of the observed eigenvalue.

#include <cstdint>
#include <map>
#include <random>
#include <string_view>
#include <vector>

#include "seqmeas/hilbert.hpp"

namespace seqmeas::paths {

using hilbert::Complex;
using hilbert::COperator;
using hilbert::CVector;
using hilbert::Evolution;
using hilbert::Observable;

/// Eigenvector indices n_0..n_L, one per measurement time.
using VirtualPath = std::vector<int>;
/// Block (distinct-eigenvalue) indices m_0..m_L in ascending eigenvalue order.
/// Position 0 always holds the preparation index.
using OutcomeSequence = std::vector<int>;

/// Largest number of intermediate virtual paths (N^(L-1)) the enumerating
/// route accepts.
inline constexpr std::int64_t kMaxEnumeratedPaths = 1'000'000;

struct Schedule {
  std::vector<double> times;
  std::vector<Observable> observables;
  Evolution evolution;
  int prep_index = 0;

  int dim() const { return evolution.dim(); }
  /// Index of the last measurement (L).
  int last() const { return static_cast<int>(observables.size()) - 1; }

  /// Throws ValidationError naming the first violated invariant.
  void validate() const;
};

/// U(t_{l+1}, t_l) for every interval of a schedule, computed once.
std::vector<COperator> interval_propagators(const Schedule& s);

enum class Source { PathAmplitude, ChainState, CompositeGate, CompositePointer };

std::string_view to_string(Source source);

struct ProbabilityTable {
  Source source = Source::PathAmplitude;
  std::map<OutcomeSequence, double> entries;

  double total() const;
  /// Probability of `o`, zero for sequences not in the table.
  double at(const OutcomeSequence& o) const;
};

/// Largest absolute entry-wise difference, over the union of keys.
double max_deviation(const ProbabilityTable& a, const ProbabilityTable& b);
/// Half the L1 distance over the union of keys.
double total_variation(const ProbabilityTable& a, const ProbabilityTable& b);
/// Sums out position `index` of every key.
ProbabilityTable marginalize(const ProbabilityTable& table, int index);

/// Product of single-interval transition amplitudes along fixed eigenvectors.
Complex virtual_amplitude(const Schedule& s, const VirtualPath& path);

/// Amplitude for reaching basis vector `final_n` of the last observable through
/// the intermediate blocks of `o`, built with projectors only.
Complex elementary_amplitude(const Schedule& s, const OutcomeSequence& o, int final_n);

/// Same amplitude, as an explicit sum over every virtual path whose
/// intermediate eigenvectors lie in the blocks of `o`. Throws
/// DimensionOverflow beyond kMaxEnumeratedPaths.
Complex elementary_amplitude_enumerated(const Schedule& s, const OutcomeSequence& o, int final_n);

/// Real-path probabilities: squared elementary amplitudes summed over the final
/// block's basis vectors.
ProbabilityTable probability_table(const Schedule& s);

/// Real-path probabilities from the norm of the interrupted-evolution state
/// prod_l pi_l(t_l, t_0) |q_0>, with Heisenberg-picture projectors.
ProbabilityTable probability_table_chain(const Schedule& s);

/// Empirical frequencies of `trials` sequences drawn by inverse CDF over the
/// lexicographic order of the table. Deterministic for a given seed.
std::map<OutcomeSequence, double> sample_outcomes(const Schedule& s, std::int64_t trials, std::uint64_t seed);

/// Copy of `s` with `observable` measured at `t`. Returns the position the new
/// measurement occupies. Throws BadInterval unless t lies strictly between two
/// scheduled times, ValidationError if the evolution cannot be split there.
struct Insertion {
  Schedule schedule;
  int position;
};
Insertion insert_measurement(const Schedule& s, double t, const Observable& observable);

struct RandomScheduleOptions {
  int min_dim = 2;
  int max_dim = 4;
  int min_last = 1;
  int max_last = 4;
  /// Probability that an intermediate observable gets a forced degenerate pair.
  double degenerate_probability = 0.5;
};

/// Random schedule with random Hermitian observables (the first one
/// non-degenerate), random Hamiltonian and random increasing times.
Schedule random_schedule(std::mt19937_64& rng, const RandomScheduleOptions& options = {});

}  // namespace seqmeas::paths
