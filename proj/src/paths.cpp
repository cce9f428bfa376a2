#include "seqmeas/paths.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "seqmeas/errors.hpp"

namespace seqmeas::paths {

void Schedule::validate() const {
  if (observables.size() < 2)
    throw ValidationError("schedule needs a preparing and at least one further observable");
  if (times.size() != observables.size()) throw ValidationError("need one time per observable");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw ValidationError("measurement times must strictly increase");
  const int n = evolution.dim();
  if (n < 1) throw ValidationError("schedule has no evolution");
  for (std::size_t k = 0; k < observables.size(); ++k)
    if (observables[k].dim() != n)
      throw ValidationError("observable " + std::to_string(k) + " does not match the system dimension");
  if (!observables.front().non_degenerate())
    throw ValidationError("the preparing observable must be non-degenerate");
  if (prep_index < 0 || prep_index >= n) throw ValidationError("preparation index out of range");
}

std::vector<COperator> interval_propagators(const Schedule& s) {
  std::vector<COperator> out;
  out.reserve(s.times.size() - 1);
  for (std::size_t k = 0; k + 1 < s.times.size(); ++k) out.push_back(s.evolution.evolve(s.times[k], s.times[k + 1]));
  return out;
}

std::string_view to_string(Source source) {
  switch (source) {
    case Source::PathAmplitude: return "path-amplitude";
    case Source::ChainState: return "chain-state";
    case Source::CompositeGate: return "composite-gate";
    case Source::CompositePointer: return "composite-pointer";
  }
  return "unknown";
}

double ProbabilityTable::total() const {
  double sum = 0.0;
  for (const auto& [key, p] : entries) sum += p;
  return sum;
}

double ProbabilityTable::at(const OutcomeSequence& o) const {
  auto it = entries.find(o);
  return it == entries.end() ? 0.0 : it->second;
}

namespace {

std::set<OutcomeSequence> key_union(const ProbabilityTable& a, const ProbabilityTable& b) {
  std::set<OutcomeSequence> keys;
  for (const auto& [k, p] : a.entries) keys.insert(k);
  for (const auto& [k, p] : b.entries) keys.insert(k);
  return keys;
}

void check_sequence(const Schedule& s, const OutcomeSequence& o) {
  if (static_cast<int>(o.size()) != s.last() + 1) throw ValidationError("outcome sequence has the wrong length");
  if (o[0] != s.prep_index) throw ValidationError("outcome sequence must start with the preparation index");
  for (int l = 1; l <= s.last(); ++l)
    if (o[l] < 0 || o[l] >= s.observables[l].block_count()) throw ValidationError("outcome index out of range");
}

Complex virtual_amplitude_with(const Schedule& s, const std::vector<COperator>& props, const VirtualPath& path) {
  Complex amp = 1.0;
  for (int l = 0; l < s.last(); ++l) {
    const CVector from = s.observables[l].basis_vector(path[l]);
    const CVector to = s.observables[l + 1].basis_vector(path[l + 1]);
    amp *= to.dot(props[l] * from);
  }
  return amp;
}

// Interrupted state pi_{L-1} U ... pi_1 U |q_0>, before the last propagator.
CVector projected_state(const Schedule& s, const std::vector<COperator>& props, const OutcomeSequence& o) {
  CVector v = s.observables[0].basis_vector(s.prep_index);
  for (int l = 1; l < s.last(); ++l) v = s.observables[l].projector(o[l]) * (props[l - 1] * v);
  return v;
}

}  // namespace

double max_deviation(const ProbabilityTable& a, const ProbabilityTable& b) {
  double worst = 0.0;
  for (const auto& k : key_union(a, b)) worst = std::max(worst, std::abs(a.at(k) - b.at(k)));
  return worst;
}

double total_variation(const ProbabilityTable& a, const ProbabilityTable& b) {
  double sum = 0.0;
  for (const auto& k : key_union(a, b)) sum += std::abs(a.at(k) - b.at(k));
  return 0.5 * sum;
}

ProbabilityTable marginalize(const ProbabilityTable& table, int index) {
  ProbabilityTable out;
  out.source = table.source;
  for (const auto& [key, p] : table.entries) {
    if (index < 0 || index >= static_cast<int>(key.size())) throw ValidationError("marginal index out of range");
    OutcomeSequence reduced = key;
    reduced.erase(reduced.begin() + index);
    out.entries[reduced] += p;
  }
  return out;
}

Complex virtual_amplitude(const Schedule& s, const VirtualPath& path) {
  if (static_cast<int>(path.size()) != s.last() + 1) throw ValidationError("virtual path has the wrong length");
  for (int n : path)
    if (n < 0 || n >= s.dim()) throw ValidationError("virtual path index out of range");
  return virtual_amplitude_with(s, interval_propagators(s), path);
}

Complex elementary_amplitude(const Schedule& s, const OutcomeSequence& o, int final_n) {
  check_sequence(s, o);
  if (final_n < 0 || final_n >= s.dim()) throw ValidationError("final index out of range");
  const auto props = interval_propagators(s);
  const CVector v = projected_state(s, props, o);
  return s.observables[s.last()].basis_vector(final_n).dot(props[s.last() - 1] * v);
}

Complex elementary_amplitude_enumerated(const Schedule& s, const OutcomeSequence& o, int final_n) {
  check_sequence(s, o);
  const int n = s.dim();
  const int last = s.last();
  double count = std::pow(static_cast<double>(n), last - 1);
  if (count > static_cast<double>(kMaxEnumeratedPaths))
    throw DimensionOverflow("too many virtual paths to enumerate; use the chain-state route");

  const auto props = interval_propagators(s);
  VirtualPath path(last + 1, 0);
  path[0] = s.prep_index;
  path[last] = final_n;
  Complex sum = 0.0;
  // Odometer over n_1..n_{L-1}; only paths whose eigenvectors sit in the
  // selected blocks contribute.
  std::vector<int> digits(std::max(0, last - 1), 0);
  while (true) {
    bool selected = true;
    for (int l = 1; l < last; ++l) {
      path[l] = digits[l - 1];
      if (s.observables[l].block_of(path[l]) != o[l]) selected = false;
    }
    if (selected) sum += virtual_amplitude_with(s, props, path);
    int d = 0;
    while (d < last - 1 && ++digits[d] == n) digits[d++] = 0;
    if (d == last - 1) break;
  }
  return sum;
}

ProbabilityTable probability_table(const Schedule& s) {
  s.validate();
  const auto props = interval_propagators(s);
  const int last = s.last();
  const Observable& final_obs = s.observables[last];

  ProbabilityTable table;
  table.source = Source::PathAmplitude;
  OutcomeSequence o(last + 1, 0);
  o[0] = s.prep_index;

  // Depth-first over intermediate blocks, sharing the projected prefix.
  auto descend = [&](auto&& self, int level, const CVector& v) -> void {
    if (level == last) {
      const CVector out = props[last - 1] * v;
      for (int m = 0; m < final_obs.block_count(); ++m) {
        double p = 0.0;
        for (int n : final_obs.block_members(m)) p += std::norm(final_obs.basis_vector(n).dot(out));
        o[last] = m;
        table.entries[o] = p;
      }
      return;
    }
    const CVector u = props[level - 1] * v;
    for (int m = 0; m < s.observables[level].block_count(); ++m) {
      o[level] = m;
      self(self, level + 1, CVector(s.observables[level].projector(m) * u));
    }
  };
  descend(descend, 1, s.observables[0].basis_vector(s.prep_index));
  return table;
}

ProbabilityTable probability_table_chain(const Schedule& s) {
  s.validate();
  const int last = s.last();
  std::vector<std::vector<COperator>> heisenberg(last + 1);
  for (int l = 1; l <= last; ++l) {
    const COperator w = s.evolution.evolve(s.times[0], s.times[l]);
    for (int m = 0; m < s.observables[l].block_count(); ++m)
      heisenberg[l].push_back(w.adjoint() * s.observables[l].projector(m) * w);
  }

  ProbabilityTable table;
  table.source = Source::ChainState;
  OutcomeSequence o(last + 1, 0);
  o[0] = s.prep_index;
  auto descend = [&](auto&& self, int level, const CVector& phi) -> void {
    for (int m = 0; m < static_cast<int>(heisenberg[level].size()); ++m) {
      o[level] = m;
      const CVector next = heisenberg[level][m] * phi;
      if (level == last)
        table.entries[o] = next.squaredNorm();
      else
        self(self, level + 1, next);
    }
  };
  descend(descend, 1, s.observables[0].basis_vector(s.prep_index));
  return table;
}

std::map<OutcomeSequence, double> sample_outcomes(const Schedule& s, std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw ValidationError("need at least one trial");
  const ProbabilityTable table = probability_table(s);

  std::vector<OutcomeSequence> keys;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& [key, p] : table.entries) {
    acc += p;
    keys.push_back(key);
    cumulative.push_back(acc);
  }
  // Draws beyond the accumulated total (rounding) land on the last
  // sequence with positive probability.
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < keys.size(); ++k)
    if (table.entries.at(keys[k]) > 0.0) last_positive = k;

  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> counts(keys.size(), 0);
  for (std::int64_t t = 0; t < trials; ++t) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
    if (k > last_positive) k = last_positive;
    ++counts[k];
  }

  std::map<OutcomeSequence, double> freq;
  for (std::size_t k = 0; k < keys.size(); ++k)
    freq[keys[k]] = static_cast<double>(counts[k]) / static_cast<double>(trials);
  return freq;
}

Insertion insert_measurement(const Schedule& s, double t, const Observable& observable) {
  if (observable.dim() != s.dim()) throw ValidationError("inserted observable has the wrong dimension");
  for (std::size_t k = 0; k + 1 < s.times.size(); ++k) {
    if (s.times[k] < t && t < s.times[k + 1]) {
      Insertion out{s, static_cast<int>(k) + 1};
      out.schedule.times.insert(out.schedule.times.begin() + out.position, t);
      out.schedule.observables.insert(out.schedule.observables.begin() + out.position, observable);
      return out;
    }
  }
  throw BadInterval("insertion time must lie strictly between two scheduled measurements");
}

Schedule random_schedule(std::mt19937_64& rng, const RandomScheduleOptions& options) {
  std::uniform_int_distribution<int> dim_dist(options.min_dim, options.max_dim);
  std::uniform_int_distribution<int> last_dist(options.min_last, options.max_last);
  std::uniform_real_distribution<double> step(0.1, 1.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  const int n = dim_dist(rng);
  const int last = last_dist(rng);

  Schedule s;
  s.evolution = Evolution::from_hamiltonian(hilbert::random_hermitian(n, rng));
  double t = 0.0;
  for (int l = 0; l <= last; ++l) {
    s.times.push_back(t);
    t += step(rng);

    std::vector<double> values(n);
    for (double& q : values) q = normal(rng);
    std::sort(values.begin(), values.end());
    if (l > 0 && unit(rng) < options.degenerate_probability) {
      std::uniform_int_distribution<int> pick(0, n - 2);
      const int k = pick(rng);
      values[k + 1] = values[k];
    } else {
      // Keep distinct eigenvalues well separated from the merge tolerance.
      for (int k = 1; k < n; ++k) values[k] = std::max(values[k], values[k - 1] + 0.05);
    }
    s.observables.push_back(Observable::from_eigenbasis(values, hilbert::random_unitary(n, rng)));
  }
  std::uniform_int_distribution<int> prep(0, n - 1);
  s.prep_index = prep(rng);
  return s;
}

}  // namespace seqmeas::paths
