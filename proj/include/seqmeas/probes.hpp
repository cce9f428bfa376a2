#pragma once

// Discrete-gate probes: each measurement is recorded by a register of
// two-level subsystems, one per eigenvalue block, and the composite
// system + probes evolves unitarily until the records are read.

#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "seqmeas/hilbert.hpp"
#include "seqmeas/paths.hpp"

namespace seqmeas::probes {

using hilbert::Complex;
using hilbert::COperator;
using hilbert::Observable;

/// Coupling angle that flips exactly one subsystem with certainty.
inline constexpr double kFullStrength = std::numbers::pi / 2.0;

/// Largest system x probes dimension the composite simulation accepts.
inline constexpr std::int64_t kMaxCompositeDim = std::int64_t{1} << 20;

/// Record value of a probe none of whose subsystems flipped.
inline constexpr int kUnflipped = -1;

enum class ProbeEncoding {
  /// M two-level subsystems, 2^M states; subsystem 0 is the most significant
  /// factor and |1> (unflipped) is the first basis state of each.
  Register,
  /// The M+1 states {nothing flipped, block m flipped} spanned by one
  /// coupling of an unflipped register. Index 0 is unflipped, m+1 is "m flipped".
  Compressed,
};

int probe_dimension(int blocks, ProbeEncoding encoding);

/// Probe basis index holding `record` (a block index or kUnflipped).
int record_state_index(int blocks, int record, ProbeEncoding encoding);

/// exp(i * strength * sum_m pi_m (x) X_m) on system (x) probe, where X_m flips
/// subsystem m. At full strength this equals i * sum_m pi_m (x) X_m.
COperator gate_coupling_unitary(const Observable& obs, ProbeEncoding encoding = ProbeEncoding::Register,
                                double strength = kFullStrength);

/// Joint record probabilities of the composite evolution with one compressed
/// gate probe per scheduled measurement (the preparing one included), coupled
/// with the given strengths. Keys list one record per probe; kUnflipped marks
/// a probe left in its initial state. Throws DimensionOverflow above
/// kMaxCompositeDim.
std::map<std::vector<int>, double> composite_gate_records(const paths::Schedule& s,
                                                          std::span<const double> strengths);

/// Full-strength composite simulation, reported as a probability table over
/// the recorded outcome sequences.
paths::ProbabilityTable run_composite_gates(const paths::Schedule& s);

}  // namespace seqmeas::probes
