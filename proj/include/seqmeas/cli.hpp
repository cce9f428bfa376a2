#pragma once

// Batch front-end: a JSON run description in, a CSV table out. The document
// layout is described in README.md.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqmeas/hilbert.hpp"
#include "seqmeas/joint.hpp"
#include "seqmeas/paths.hpp"
#include "seqmeas/reality.hpp"
#include "seqmeas/weak.hpp"

namespace seqmeas::cli {

enum class Mode { Probs, VerifyEquivalence, Reality, JointGateScan, JointPointerMap, BesselMap, WeakGate, WeakMean };

std::string_view to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view name);
const std::vector<Mode>& all_modes();

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitRuntimeError = 3;

struct BetaGrid {
  double start = -1.0;
  double stop = 1.0;
  double step = 0.01;
  /// start, start + step, ..., stop (inclusive when it lands on the grid).
  std::vector<double> values() const;
};

struct JointSpec {
  hilbert::Observable b;
  hilbert::Observable c;
  hilbert::CVector prep;
  hilbert::CVector post;
  double beta = 0.0;
  BetaGrid betas;
  double width = 0.05;
  int steps = 64;
  joint::ReadingGrid grid;
};

struct WeakPointerSpec {
  hilbert::Observable observable;
  double t_prime = 0.0;
  double width = 1.0;
  std::vector<double> gammas;
  paths::OutcomeSequence conditioning;
};

struct RandomSpec {
  int count = 0;
  std::uint64_t seed = 42;
  paths::RandomScheduleOptions options;
};

struct RunSpec {
  Mode mode = Mode::Probs;
  std::string input_path;
  std::string output_path;  ///< empty or "-" writes to stdout

  std::optional<paths::Schedule> schedule;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;

  // probs
  std::int64_t trials = 0;
  // verify-equivalence
  std::vector<double> pointer_widths;
  std::optional<RandomSpec> random;
  // reality
  int level = 0;
  std::vector<reality::InsertionSpec> insertions;
  bool expect_invariant = true;
  // joint modes
  std::optional<JointSpec> joint;
  // weak modes
  std::vector<weak::WeakGateConfig> weak_gates;
  std::optional<WeakPointerSpec> weak_pointer;
};

/// Parses a JSON document for `mode`. Throws ParseError for malformed text or
/// wrongly typed fields, ValidationError (or NotHermitian, BadInterval) when a
/// value violates an invariant, including a missing mode-required section.
RunSpec parse_spec(std::string_view text, Mode mode);

/// Reads and parses a file.
RunSpec load_spec(const std::string& path, Mode mode);

/// Runs a parsed spec: writes CSV to the output path and a short summary to
/// `log`. Returns kExitOk, or kExitCheckFailed when a verification fails.
/// Library errors propagate.
int run(const RunSpec& spec, std::ostream& log);

/// Same, but returns the CSV text instead of writing it.
int run_to_string(const RunSpec& spec, std::ostream& log, std::string& csv);

/// Maps an exception thrown by parse or run onto an exit code.
int exit_code_for(const std::exception& e);

/// %.12g
std::string format_number(double x);

}  // namespace seqmeas::cli
