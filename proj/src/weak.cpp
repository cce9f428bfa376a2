#include "seqmeas/weak.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "seqmeas/errors.hpp"
#include "seqmeas/pointer.hpp"
#include "seqmeas/probes.hpp"

namespace seqmeas::weak {

namespace {

struct Augmented {
  paths::Schedule schedule;
  std::vector<int> positions;  // in the order of the configs passed in
};

template <typename Config>
Augmented insert_all(const paths::Schedule& s, std::span<const Config> configs) {
  std::vector<int> order(configs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return configs[a].t_prime < configs[b].t_prime; });

  Augmented out{s, std::vector<int>(configs.size())};
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r > 0 && !(configs[order[r]].t_prime > configs[order[r - 1]].t_prime))
      throw BadInterval("weak probes need distinct times");
    auto inserted = paths::insert_measurement(out.schedule, configs[order[r]].t_prime, configs[order[r]].observable);
    out.schedule = std::move(inserted.schedule);
    out.positions[order[r]] = inserted.position;
  }
  return out;
}

paths::OutcomeSequence strip(const paths::OutcomeSequence& key, std::vector<int> positions) {
  std::sort(positions.rbegin(), positions.rend());
  paths::OutcomeSequence out = key;
  for (int p : positions) out.erase(out.begin() + p);
  return out;
}

paths::ProbabilityTable zero_like(const paths::ProbabilityTable& shape, paths::Source source) {
  paths::ProbabilityTable out;
  out.source = source;
  for (const auto& [key, p] : shape.entries) out.entries[key] = 0.0;
  return out;
}

}  // namespace

WeakGateResult weak_gate_distribution(const paths::Schedule& s, const WeakGateConfig& gate) {
  return weak_gate_distribution(s, std::span<const WeakGateConfig>(&gate, 1));
}

WeakGateResult weak_gate_distribution(const paths::Schedule& s, std::span<const WeakGateConfig> gates) {
  if (gates.empty()) throw ValidationError("no weak gate given");
  for (const auto& g : gates)
    if (!(g.gamma > 0.0 && g.gamma <= probes::kFullStrength))
      throw ValidationError("weak gate strength must lie in (0, pi/2]");

  WeakGateResult out;
  out.unknown = paths::probability_table(s);
  for (const auto& g : gates) {
    auto single = paths::insert_measurement(s, g.t_prime, g.observable);
    out.known.push_back(paths::marginalize(paths::probability_table(single.schedule), single.position));
  }

  const Augmented aug = insert_all(s, gates);
  std::vector<double> strengths(aug.schedule.observables.size(), probes::kFullStrength);
  for (std::size_t k = 0; k < gates.size(); ++k) strengths[aug.positions[k]] = gates[k].gamma;

  out.detected = zero_like(out.unknown, paths::Source::CompositeGate);
  out.undetected = zero_like(out.unknown, paths::Source::CompositeGate);
  for (const auto& [record, p] : probes::composite_gate_records(aug.schedule, strengths)) {
    bool flipped = false;
    for (int pos : aug.positions) flipped = flipped || record[pos] != probes::kUnflipped;
    const auto key = strip(record, aug.positions);
    for (int r : key)
      if (r == probes::kUnflipped) throw Error("accurate gate left unflipped");
    (flipped ? out.detected : out.undetected).entries[key] += p;
  }
  out.combined = zero_like(out.unknown, paths::Source::CompositeGate);
  for (auto& [key, p] : out.combined.entries) p = out.detected.at(key) + out.undetected.at(key);
  return out;
}

paths::ProbabilityTable weak_gate_mixture(const WeakGateResult& result, std::span<const WeakGateConfig> gates) {
  if (gates.size() != result.known.size()) throw ValidationError("one known table per gate expected");
  double total = 0.0;
  for (const auto& g : gates) total += g.gamma * g.gamma;
  paths::ProbabilityTable out = zero_like(result.unknown, paths::Source::PathAmplitude);
  for (auto& [key, p] : out.entries) {
    p = (1.0 - total) * result.unknown.at(key);
    for (std::size_t k = 0; k < gates.size(); ++k) p += gates[k].gamma * gates[k].gamma * result.known[k].at(key);
  }
  return out;
}

WeakValueReport weak_pointer_mean(const paths::Schedule& s, const WeakPointerConfig& cfg,
                                  const paths::OutcomeSequence& conditioning) {
  s.validate();
  if (!(cfg.gamma > 0.0)) throw ValidationError("weak coupling gamma must be positive");
  if (!(cfg.width > 0.0)) throw ValidationError("pointer width must be positive");
  const int last = s.last();
  if (static_cast<int>(conditioning.size()) != last + 1)
    throw ValidationError("conditioning must list one outcome per accurate measurement");
  if (conditioning[0] != s.prep_index) throw ValidationError("conditioning must start with the preparation index");
  for (int l = 0; l <= last; ++l)
    if (conditioning[l] < 0 || conditioning[l] >= s.observables[l].block_count())
      throw ValidationError("conditioning outcome out of range");
  if (!s.observables[last].non_degenerate()) throw ValidationError("final observable must be non-degenerate");

  const WeakPointerConfig* one = &cfg;
  const Augmented aug = insert_all(s, std::span<const WeakPointerConfig>(one, 1));
  const int pos = aug.positions[0];
  const int final_n = s.observables[last].block_members(conditioning[last]).front();

  WeakValueReport report;
  report.conditioning = conditioning;
  report.numerator = 0.0;
  report.denominator = 0.0;
  probes::PointerState pointer(cfg.width, 0.0);
  for (int m = 0; m < cfg.observable.block_count(); ++m) {
    paths::OutcomeSequence o = conditioning;
    o.insert(o.begin() + pos, m);
    const Complex a = paths::elementary_amplitude(aug.schedule, o, final_n);
    report.numerator += cfg.observable.eigenvalue(m) * a;
    report.denominator += a;
    pointer.add(cfg.gamma * cfg.observable.eigenvalue(m), a);
  }
  if (std::abs(report.denominator) < 1e-14) throw ZeroDenominator("amplitude sum vanishes for this conditioning");
  const Complex ratio = report.numerator / report.denominator;
  report.mean_reading = ratio.real();
  report.imaginary_part = ratio.imag();
  report.exact_mean = pointer.mean_position() / cfg.gamma;
  return report;
}

}  // namespace seqmeas::weak
