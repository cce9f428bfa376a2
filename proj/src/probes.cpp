#include "seqmeas/probes.hpp"

#include <cmath>
#include <string>

#include "seqmeas/errors.hpp"

namespace seqmeas::probes {

namespace {

// Exact trigonometric factors at full strength so that unflipped records
// vanish identically.
std::pair<double, double> cos_sin(double strength) {
  if (strength == kFullStrength) return {0.0, 1.0};
  if (strength == 0.0) return {1.0, 0.0};
  return {std::cos(strength), std::sin(strength)};
}

// Hermitian involution sum_m pi_m (x) X_m on system (x) probe.
COperator flip_generator(const Observable& obs, ProbeEncoding encoding) {
  const int blocks = obs.block_count();
  const int pd = probe_dimension(blocks, encoding);
  COperator w = COperator::Zero(obs.dim() * pd, obs.dim() * pd);
  for (int m = 0; m < blocks; ++m) {
    COperator x = COperator::Zero(pd, pd);
    if (encoding == ProbeEncoding::Register) {
      const int bit = 1 << (blocks - 1 - m);
      for (int j = 0; j < pd; ++j) x(j ^ bit, j) = 1.0;
    } else {
      for (int j = 0; j < pd; ++j) x(j, j) = 1.0;
      x(0, 0) = 0.0;
      x(m + 1, m + 1) = 0.0;
      x(0, m + 1) = 1.0;
      x(m + 1, 0) = 1.0;
    }
    w += hilbert::tensor(obs.projector(m), x);
  }
  return w;
}

}  // namespace

int probe_dimension(int blocks, ProbeEncoding encoding) {
  if (blocks < 1) throw ValidationError("probe needs at least one block");
  if (encoding == ProbeEncoding::Register) {
    if (blocks > 20) throw DimensionOverflow("register probe too large");
    return 1 << blocks;
  }
  return blocks + 1;
}

int record_state_index(int blocks, int record, ProbeEncoding encoding) {
  if (record != kUnflipped && (record < 0 || record >= blocks)) throw ValidationError("record out of range");
  if (record == kUnflipped) return 0;
  return encoding == ProbeEncoding::Register ? 1 << (blocks - 1 - record) : record + 1;
}

COperator gate_coupling_unitary(const Observable& obs, ProbeEncoding encoding, double strength) {
  const COperator w = flip_generator(obs, encoding);
  const auto [c, s] = cos_sin(strength);
  return c * COperator::Identity(w.rows(), w.cols()) + hilbert::kI * s * w;
}

std::map<std::vector<int>, double> composite_gate_records(const paths::Schedule& s,
                                                          std::span<const double> strengths) {
  s.validate();
  const int last = s.last();
  if (static_cast<int>(strengths.size()) != last + 1) throw ValidationError("need one strength per measurement");
  const int n = s.dim();

  std::vector<std::int64_t> dims(last + 1), strides(last + 1);
  std::int64_t probes_dim = 1;
  for (int l = last; l >= 0; --l) {
    dims[l] = s.observables[l].block_count() + 1;
    strides[l] = probes_dim;
    probes_dim *= dims[l];
    if (probes_dim * n > kMaxCompositeDim)
      throw DimensionOverflow("composite dimension exceeds " + std::to_string(kMaxCompositeDim));
  }

  // Columns index probe records, rows the system. Column j encodes probe l's
  // compressed state as digit (j / strides[l]) % dims[l].
  COperator psi = COperator::Zero(n, probes_dim);
  psi.col(0) = s.observables[0].basis_vector(s.prep_index);

  auto couple = [&](int l) {
    const Observable& obs = s.observables[l];
    const int blocks = obs.block_count();
    const auto [c, sn] = cos_sin(strengths[l]);
    std::vector<COperator> projected;
    projected.reserve(blocks);
    for (int m = 0; m < blocks; ++m) projected.push_back(obs.projector(m) * psi);

    COperator flipped = COperator::Zero(n, probes_dim);
    for (std::int64_t j = 0; j < probes_dim; ++j) {
      const std::int64_t r = (j / strides[l]) % dims[l];
      if (r == 0) {
        for (int m = 0; m < blocks; ++m) flipped.col(j) += projected[m].col(j + (m + 1) * strides[l]);
      } else {
        const int m = static_cast<int>(r) - 1;
        flipped.col(j) = projected[m].col(j - r * strides[l]) + psi.col(j) - projected[m].col(j);
      }
    }
    psi = c * psi + (hilbert::kI * sn) * flipped;
  };

  const auto props = paths::interval_propagators(s);
  couple(0);
  for (int l = 1; l <= last; ++l) {
    psi = props[l - 1] * psi;
    couple(l);
  }

  std::map<std::vector<int>, double> records;
  std::vector<int> key(last + 1);
  for (std::int64_t j = 0; j < probes_dim; ++j) {
    const double p = psi.col(j).squaredNorm();
    if (p == 0.0) continue;
    for (int l = 0; l <= last; ++l) key[l] = static_cast<int>((j / strides[l]) % dims[l]) - 1;
    records[key] += p;
  }
  return records;
}

paths::ProbabilityTable run_composite_gates(const paths::Schedule& s) {
  const std::vector<double> full(s.observables.size(), kFullStrength);
  paths::ProbabilityTable table;
  table.source = paths::Source::CompositeGate;
  for (const auto& [record, p] : composite_gate_records(s, full)) {
    for (int r : record)
      if (r == kUnflipped) throw Error("full-strength probe left unflipped");
    table.entries[record] = p;
  }
  return table;
}

}  // namespace seqmeas::probes
