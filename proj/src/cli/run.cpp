#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "seqmeas/cli.hpp"
#include "seqmeas/errors.hpp"
#include "seqmeas/pointer.hpp"
#include "seqmeas/probes.hpp"

namespace seqmeas::cli {

namespace {

constexpr std::pair<Mode, std::string_view> kModeNames[] = {
    {Mode::Probs, "probs"},
    {Mode::VerifyEquivalence, "verify-equivalence"},
    {Mode::Reality, "reality"},
    {Mode::JointGateScan, "joint-gate-scan"},
    {Mode::JointPointerMap, "joint-pointer-map"},
    {Mode::BesselMap, "bessel-map"},
    {Mode::WeakGate, "weak-gate"},
    {Mode::WeakMean, "weak-mean"},
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out_ << ',';
      out_ << cells[k];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::vector<std::string> sequence_header(int last) {
  std::vector<std::string> h;
  for (int l = 0; l <= last; ++l) h.push_back("m" + std::to_string(l));
  return h;
}

std::vector<std::string> sequence_cells(const paths::OutcomeSequence& o) {
  std::vector<std::string> cells;
  for (int m : o) cells.push_back(std::to_string(m));
  return cells;
}

// One line of a verification report.
struct Check {
  std::string name;
  double value;
  double tolerance;
  std::string status;
};

class Report {
 public:
  explicit Report(std::ostream& log) : log_(log) {}

  // PASS when value < tolerance (or > tolerance with `above`).
  void bound(const std::string& name, double value, double tolerance, bool above = false) {
    const bool ok = above ? value > tolerance : value < tolerance;
    add({name, value, tolerance, ok ? "PASS" : "FAIL"}, above ? " > " : " < ");
  }

  void info(const std::string& name, double value) { add({name, value, NAN, "INFO"}, ""); }

  void verdict(const std::string& name, bool ok) { add({name, ok ? 1.0 : 0.0, NAN, ok ? "PASS" : "FAIL"}, ""); }

  bool passed() const {
    return std::none_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.status == "FAIL"; });
  }

  std::string csv() const {
    Csv out({"check", "max_deviation", "tolerance", "status"});
    for (const auto& c : checks_)
      out.row({c.name, format_number(c.value), std::isnan(c.tolerance) ? "" : format_number(c.tolerance), c.status});
    return out.str();
  }

 private:
  void add(Check c, const char* relation) {
    if (std::isnan(c.tolerance))
      log_ << c.name << ": " << format_number(c.value) << ": " << c.status << '\n';
    else
      log_ << c.name << ": max_deviation" << relation << format_number(c.tolerance) << ": " << c.status << " ("
           << format_number(c.value) << ")\n";
    checks_.push_back(std::move(c));
  }

  std::ostream& log_;
  std::vector<Check> checks_;
};

std::string run_probs(const RunSpec& spec, std::ostream& log) {
  const paths::Schedule& s = *spec.schedule;
  const auto table = paths::probability_table(s);
  std::map<paths::OutcomeSequence, double> sampled;
  if (spec.trials > 0) sampled = paths::sample_outcomes(s, spec.trials, spec.seed);

  auto header = sequence_header(s.last());
  header.push_back("probability");
  if (spec.trials > 0) header.push_back("sampled");
  Csv csv(header);
  for (const auto& [key, p] : table.entries) {
    auto cells = sequence_cells(key);
    cells.push_back(format_number(p));
    if (spec.trials > 0) cells.push_back(format_number(sampled[key]));
    csv.row(cells);
  }
  log << "sequences: " << table.entries.size() << ", total probability " << format_number(table.total()) << '\n';
  return csv.str();
}

void equivalence_checks(const paths::Schedule& s, double& norm, double& chain, double& gates) {
  const auto path = paths::probability_table(s);
  norm = std::max(norm, std::abs(path.total() - 1.0));
  chain = std::max(chain, paths::max_deviation(path, paths::probability_table_chain(s)));
  gates = std::max(gates, paths::max_deviation(path, probes::run_composite_gates(s)));
}

std::string run_verify(const RunSpec& spec, std::ostream& log, bool& ok) {
  Report report(log);
  if (spec.schedule) {
    double norm = 0.0, chain = 0.0, gates = 0.0;
    equivalence_checks(*spec.schedule, norm, chain, gates);
    report.bound("normalization", norm, spec.tolerance);
    report.bound("path-vs-chain", chain, spec.tolerance);
    report.bound("path-vs-composite-gate", gates, spec.tolerance);

    if (!spec.pointer_widths.empty()) {
      const auto path = paths::probability_table(*spec.schedule);
      std::vector<double> widths = spec.pointer_widths;
      std::sort(widths.rbegin(), widths.rend());
      std::vector<double> tv;
      for (double w : widths) {
        const double width[] = {w};
        tv.push_back(paths::total_variation(path, probes::pointer_kick_decomposition(*spec.schedule, width)));
        report.info("pointer-tv(width=" + format_number(w) + ")", tv.back());
      }
      if (tv.size() > 1) {
        bool monotone = true;
        // Once the distance reaches rounding level it can only stay there.
        for (std::size_t k = 1; k < tv.size(); ++k)
          monotone = monotone && (tv[k - 1] > 1e-15 ? tv[k] < tv[k - 1] : tv[k] <= 1e-15);
        report.verdict("pointer-tv-decreases", monotone);
      }
    }
  }
  if (spec.random) {
    std::mt19937_64 rng(spec.seed);
    double norm = 0.0, chain = 0.0, gates = 0.0;
    for (int k = 0; k < spec.random->count; ++k)
      equivalence_checks(paths::random_schedule(rng, spec.random->options), norm, chain, gates);
    const std::string tag = "random[" + std::to_string(spec.random->count) + "] ";
    report.bound(tag + "normalization", norm, spec.tolerance);
    report.bound(tag + "path-vs-chain", chain, spec.tolerance);
    report.bound(tag + "path-vs-composite-gate", gates, spec.tolerance);
  }
  ok = report.passed();
  return report.csv();
}

std::string run_reality(const RunSpec& spec, std::ostream& log, bool& ok) {
  const auto result = reality::verify_insertions(*spec.schedule, spec.level, spec.insertions);
  for (const auto& [key, p] : result.original.entries) {
    log << "P(";
    for (std::size_t k = 0; k < key.size(); ++k) log << (k ? "," : "") << key[k];
    log << ") original " << format_number(p) << ", with insertions " << format_number(result.marginal.at(key)) << '\n';
  }
  Report report(log);
  report.bound("marginal", result.max_deviation, spec.tolerance, !spec.expect_invariant);
  for (const auto& c : result.certainty) {
    const std::string name = "certainty[position " + std::to_string(c.position) + ", " +
                             (c.which == reality::Which::Minus ? "minus" : "plus") + "]";
    if (spec.expect_invariant)
      report.bound(name, 1.0 - c.min_conditional, spec.tolerance);
    else
      report.info(name, 1.0 - c.min_conditional);
  }
  ok = report.passed();
  return report.csv();
}

std::string run_joint_gate_scan(const RunSpec& spec, std::ostream& log) {
  const JointSpec& j = *spec.joint;
  Csv csv({"beta", "P11", "P12", "P21", "P22"});
  const auto betas = j.betas.values();
  for (double beta : betas) {
    const auto r = joint::gate_joint_probabilities(joint::make_gate_setup(j.b, j.c, j.prep, j.post, beta));
    csv.row({format_number(beta), format_number(r.p[0]), format_number(r.p[1]), format_number(r.p[2]),
             format_number(r.p[3])});
  }
  log << "beta values: " << betas.size() << '\n';
  return csv.str();
}

joint::JointPointerSetup pointer_setup(const JointSpec& j) {
  return {j.prep, j.post, j.b, j.c, j.beta, j.width, j.steps};
}

std::string map_csv(const joint::JointPointerMap& map) {
  Csv csv({"f1", "f2", "P"});
  for (int p = 0; p < map.grid.points; ++p)
    for (int q = 0; q < map.grid.points; ++q)
      csv.row({format_number(map.grid.at(p)), format_number(map.grid.at(q)), format_number(map.probability(p, q))});
  return csv.str();
}

std::string run_pointer_map(const RunSpec& spec, std::ostream& log) {
  const auto map = joint::pointer_joint_distribution(pointer_setup(*spec.joint), spec.joint->grid);
  log << "post-selection probability " << format_number(map.post_selection) << '\n';
  return map_csv(map);
}

std::string run_bessel_map(const RunSpec& spec, std::ostream& log) {
  const auto map = joint::bessel_distribution(pointer_setup(*spec.joint), spec.joint->grid);
  log << "post-selection probability (grid sum) " << format_number(map.post_selection) << '\n';
  return map_csv(map);
}

std::string run_weak_gate(const RunSpec& spec, std::ostream& log) {
  const paths::Schedule& s = *spec.schedule;
  const auto result = weak::weak_gate_distribution(s, spec.weak_gates);
  const auto mixture = weak::weak_gate_mixture(result, spec.weak_gates);
  auto header = sequence_header(s.last());
  header.push_back("unknown");
  if (result.known.size() == 1) header.push_back("known");
  else
    for (std::size_t k = 0; k < result.known.size(); ++k) header.push_back("known_" + std::to_string(k + 1));
  for (const char* h : {"undetected", "detected", "combined", "mixture"}) header.push_back(h);

  Csv csv(header);
  double residual = 0.0;
  for (const auto& [key, p] : result.unknown.entries) {
    auto cells = sequence_cells(key);
    cells.push_back(format_number(p));
    for (const auto& known : result.known) cells.push_back(format_number(known.at(key)));
    cells.push_back(format_number(result.undetected.at(key)));
    cells.push_back(format_number(result.detected.at(key)));
    cells.push_back(format_number(result.combined.at(key)));
    cells.push_back(format_number(mixture.at(key)));
    csv.row(cells);
    residual = std::max(residual, std::abs(result.combined.at(key) - mixture.at(key)));
  }
  log << "largest |combined - mixture| " << format_number(residual) << '\n';
  return csv.str();
}

std::string run_weak_mean(const RunSpec& spec, std::ostream& log) {
  const WeakPointerSpec& w = *spec.weak_pointer;
  Csv csv({"gamma", "width", "weak_value", "imaginary_part", "exact_mean", "numerator_re", "numerator_im",
           "denominator_re", "denominator_im"});
  for (double gamma : w.gammas) {
    const auto r = weak::weak_pointer_mean(*spec.schedule, {gamma, w.width, w.observable, w.t_prime}, w.conditioning);
    csv.row({format_number(gamma), format_number(w.width), format_number(r.mean_reading),
             format_number(r.imaginary_part), format_number(r.exact_mean), format_number(r.numerator.real()),
             format_number(r.numerator.imag()), format_number(r.denominator.real()),
             format_number(r.denominator.imag())});
    log << "gamma " << format_number(gamma) << ": exact mean " << format_number(r.exact_mean) << ", weak value "
        << format_number(r.mean_reading) << '\n';
  }
  return csv.str();
}

}  // namespace

std::string_view to_string(Mode mode) {
  for (const auto& [m, name] : kModeNames)
    if (m == mode) return name;
  return "unknown";
}

std::optional<Mode> mode_from_string(std::string_view name) {
  for (const auto& [m, n] : kModeNames)
    if (n == name) return m;
  return std::nullopt;
}

const std::vector<Mode>& all_modes() {
  static const std::vector<Mode> modes = [] {
    std::vector<Mode> out;
    for (const auto& [m, name] : kModeNames) out.push_back(m);
    return out;
  }();
  return modes;
}

std::vector<double> BetaGrid::values() const {
  std::vector<double> out;
  const long count = std::lround(std::floor((stop - start) / step + 1e-9));
  for (long k = 0; k <= count; ++k) {
    // Snap to the decimal grid so that printed values are exact.
    const double beta = std::round((start + k * step) * 1e12) / 1e12;
    out.push_back(std::clamp(beta, -1.0, 1.0));
  }
  return out;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

int run_to_string(const RunSpec& spec, std::ostream& log, std::string& csv) {
  bool ok = true;
  switch (spec.mode) {
    case Mode::Probs: csv = run_probs(spec, log); break;
    case Mode::VerifyEquivalence: csv = run_verify(spec, log, ok); break;
    case Mode::Reality: csv = run_reality(spec, log, ok); break;
    case Mode::JointGateScan: csv = run_joint_gate_scan(spec, log); break;
    case Mode::JointPointerMap: csv = run_pointer_map(spec, log); break;
    case Mode::BesselMap: csv = run_bessel_map(spec, log); break;
    case Mode::WeakGate: csv = run_weak_gate(spec, log); break;
    case Mode::WeakMean: csv = run_weak_mean(spec, log); break;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int run(const RunSpec& spec, std::ostream& log) {
  std::string csv;
  const int code = run_to_string(spec, log, csv);
  if (spec.output_path.empty() || spec.output_path == "-") {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
  } else {
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + spec.output_path + "'");
    out << csv;
  }
  return code;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const NotHermitian*>(&e) || dynamic_cast<const BadInterval*>(&e))
    return kExitInvalidInput;
  return kExitRuntimeError;
}

}  // namespace seqmeas::cli
