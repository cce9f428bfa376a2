#include "seqmeas/reality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "seqmeas/errors.hpp"

namespace seqmeas::reality {

namespace {

// Conditioning on branches below this probability is meaningless.
constexpr double kNegligibleBranch = 1e-12;

Observable redecompose_like(const hilbert::COperator& matrix, const Observable& reference) {
  Observable out = hilbert::spectral_decompose(matrix);
  if (out.block_count() != reference.block_count())
    throw Error("conjugated observable changed its degeneracy structure");
  for (int m = 0; m < out.block_count(); ++m)
    if (std::abs(out.eigenvalue(m) - reference.eigenvalue(m)) > 1e-9 * std::max(1.0, std::abs(reference.eigenvalue(m))))
      throw Error("conjugation changed the spectrum");
  return out;
}

}  // namespace

RealityPair make_reality_pair(const paths::Schedule& s, int level, double t_prime) {
  s.validate();
  if (level < 0 || level >= s.last()) throw BadInterval("level must name an interval between two measurements");
  if (!(s.times[level] < t_prime && t_prime < s.times[level + 1]))
    throw BadInterval("t' must lie strictly inside (t_l, t_{l+1})");

  const Observable& before = s.observables[level];
  const Observable& after = s.observables[level + 1];
  if (s.evolution.is_null()) {
    const hilbert::COperator bracket = before.matrix() * after.matrix() - after.matrix() * before.matrix();
    return {before, after, t_prime, bracket.norm()};
  }

  const hilbert::COperator forward = s.evolution.evolve(s.times[level], t_prime);
  const hilbert::COperator backward = s.evolution.evolve(t_prime, s.times[level + 1]);
  Observable minus = redecompose_like(forward * before.matrix() * forward.adjoint(), before);
  Observable plus = redecompose_like(backward.adjoint() * after.matrix() * backward, after);
  const hilbert::COperator bracket = minus.matrix() * plus.matrix() - plus.matrix() * minus.matrix();
  return {std::move(minus), std::move(plus), t_prime, bracket.norm()};
}

bool InsertionReport::holds(double tolerance) const {
  if (!(max_deviation <= tolerance)) return false;
  return std::all_of(certainty.begin(), certainty.end(),
                     [&](const InsertedCertainty& c) { return c.min_conditional >= 1.0 - tolerance; });
}

InsertionReport verify_cr_insertion(const paths::Schedule& s, int level, double t_prime, Which which) {
  return verify_insertions(s, level, {{t_prime, which}});
}

InsertionReport verify_insertions(const paths::Schedule& s, int level, const std::vector<InsertionSpec>& inserts) {
  if (inserts.empty()) throw ValidationError("nothing to insert");
  std::vector<InsertionSpec> ordered = inserts;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const InsertionSpec& a, const InsertionSpec& b) { return a.t_prime < b.t_prime; });
  for (std::size_t k = 1; k < ordered.size(); ++k)
    if (!(ordered[k].t_prime > ordered[k - 1].t_prime)) throw BadInterval("insertion times must differ");

  paths::Schedule augmented = s;
  std::vector<int> positions;
  for (const auto& ins : ordered) {
    const RealityPair pair = make_reality_pair(s, level, ins.t_prime);
    auto inserted = paths::insert_measurement(augmented, ins.t_prime, ins.which == Which::Minus ? pair.minus : pair.plus);
    augmented = std::move(inserted.schedule);
    positions.push_back(inserted.position);
  }

  InsertionReport report;
  report.original = paths::probability_table(s);
  report.augmented = paths::probability_table(augmented);
  report.marginal = report.augmented;
  for (auto it = positions.rbegin(); it != positions.rend(); ++it)
    report.marginal = paths::marginalize(report.marginal, *it);
  report.max_deviation = paths::max_deviation(report.original, report.marginal);

  auto strip = [&](const paths::OutcomeSequence& key) {
    paths::OutcomeSequence reduced = key;
    for (auto it = positions.rbegin(); it != positions.rend(); ++it) reduced.erase(reduced.begin() + *it);
    return reduced;
  };

  for (std::size_t j = 0; j < ordered.size(); ++j) {
    // Scheduled neighbour in the original numbering: l for Q-minus, l+1 for Q-plus.
    const int neighbour = ordered[j].which == Which::Minus ? level : level + 1;
    std::map<paths::OutcomeSequence, double> matching;
    for (const auto& [key, p] : report.augmented.entries) {
      const paths::OutcomeSequence orig = strip(key);
      if (key[positions[j]] == orig[neighbour]) matching[orig] += p;
    }
    InsertedCertainty c{positions[j], ordered[j].which, 1.0, 0};
    for (const auto& [orig, p] : report.marginal.entries) {
      if (p < kNegligibleBranch) {
        ++c.skipped_branches;
        continue;
      }
      c.min_conditional = std::min(c.min_conditional, matching[orig] / p);
    }
    report.certainty.push_back(c);
  }
  return report;
}

}  // namespace seqmeas::reality
