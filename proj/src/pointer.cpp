#include "seqmeas/pointer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "seqmeas/errors.hpp"

namespace seqmeas::probes {

double gaussian(double f, double width) {
  const double norm = std::pow(2.0 / (std::numbers::pi * width * width), 0.25);
  return norm * std::exp(-f * f / (width * width));
}

double gaussian_overlap(double a, double b, double width) {
  const double d = a - b;
  return std::exp(-d * d / (2.0 * width * width));
}

double gaussian_product_integral(double a, double b, double width, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  // G(f-a) G(f-b) = overlap * sqrt(2/pi)/w * exp(-2 (f - mid)^2 / w^2).
  const double mid = 0.5 * (a + b);
  const double scale = std::sqrt(2.0) / width;
  const double u_lo = std::isinf(lo) ? lo : scale * (lo - mid);
  const double u_hi = std::isinf(hi) ? hi : scale * (hi - mid);
  double mass;
  if (u_lo >= 0.0)
    mass = 0.5 * (std::erfc(u_lo) - std::erfc(u_hi));
  else if (u_hi <= 0.0)
    mass = 0.5 * (std::erfc(-u_hi) - std::erfc(-u_lo));
  else
    mass = 1.0 - 0.5 * (std::erfc(u_hi) + std::erfc(-u_lo));
  return gaussian_overlap(a, b, width) * mass;
}

double gaussian_product_first_moment(double a, double b, double width) {
  return gaussian_overlap(a, b, width) * 0.5 * (a + b);
}

// ---------------------------------------------------------------------------

PointerState::PointerState(double width, double merge_tol) : width_(width), merge_tol_(merge_tol) {
  if (!(width > 0.0)) throw ValidationError("pointer width must be positive");
}

void PointerState::add(double shift, Complex amplitude) {
  for (auto& p : packets_) {
    if (std::abs(p.shift - shift) < merge_tol_ * std::max(1.0, std::abs(shift))) {
      p.amplitude += amplitude;
      return;
    }
  }
  packets_.push_back({shift, amplitude});
}

Complex PointerState::wavefunction(double f) const {
  Complex sum = 0.0;
  for (const auto& p : packets_) sum += p.amplitude * gaussian(f - p.shift, width_);
  return sum;
}

Complex PointerState::overlap(const PointerState& other) const {
  if (other.width_ != width_) throw ValidationError("pointer overlap needs equal widths");
  Complex sum = 0.0;
  for (const auto& a : packets_)
    for (const auto& b : other.packets_) sum += std::conj(a.amplitude) * b.amplitude * gaussian_overlap(a.shift, b.shift, width_);
  return sum;
}

double PointerState::norm2() const { return overlap(*this).real(); }

double PointerState::weight_in(double lo, double hi) const {
  double sum = 0.0;
  for (const auto& a : packets_)
    for (const auto& b : packets_)
      sum += (std::conj(a.amplitude) * b.amplitude).real() * gaussian_product_integral(a.shift, b.shift, width_, lo, hi);
  return sum;
}

double PointerState::mean_position() const {
  double moment = 0.0;
  for (const auto& a : packets_)
    for (const auto& b : packets_)
      moment += (std::conj(a.amplitude) * b.amplitude).real() * gaussian_product_first_moment(a.shift, b.shift, width_);
  const double n2 = norm2();
  if (!(n2 > 0.0)) throw ZeroDenominator("pointer state has zero norm");
  return moment / n2;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> resolve_widths(const paths::Schedule& s, std::span<const double> widths) {
  const int pointers = s.last();
  std::vector<double> out;
  if (widths.size() == 1)
    out.assign(pointers, widths[0]);
  else if (static_cast<int>(widths.size()) == pointers)
    out.assign(widths.begin(), widths.end());
  else
    throw ValidationError("need one pointer width, or one per pointer after the preparation");
  for (double w : out)
    if (!(w > 0.0)) throw ValidationError("pointer widths must be positive");
  return out;
}

bool same_shifts(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) >= hilbert::kDegeneracyTol * std::max(1.0, std::abs(a[k]))) return false;
  return true;
}

}  // namespace

std::vector<PointerBranch> pointer_final_state(const paths::Schedule& s) {
  s.validate();
  const auto props = paths::interval_propagators(s);
  const int last = s.last();
  const auto& final_obs = s.observables[last];

  std::vector<PointerBranch> branches;
  auto push = [&](int final_index, std::vector<double> shifts, Complex amp) {
    for (auto& b : branches) {
      if (b.final_index == final_index && same_shifts(b.shifts, shifts)) {
        b.amplitude += amp;
        return;
      }
    }
    branches.push_back({final_index, std::move(shifts), amp});
  };

  std::vector<double> shifts(last);
  auto descend = [&](auto&& self, int level, const hilbert::CVector& v) -> void {
    const hilbert::CVector u = props[level - 1] * v;
    if (level == last) {
      for (int n = 0; n < s.dim(); ++n) {
        shifts[last - 1] = final_obs.eigenvalue(final_obs.block_of(n));
        push(n, shifts, final_obs.basis_vector(n).dot(u));
      }
      return;
    }
    const auto& obs = s.observables[level];
    for (int m = 0; m < obs.block_count(); ++m) {
      shifts[level - 1] = obs.eigenvalue(m);
      self(self, level + 1, obs.projector(m) * u);
    }
  };
  descend(descend, 1, s.observables[0].basis_vector(s.prep_index));
  return branches;
}

std::vector<double> reading_bin_edges(const hilbert::Observable& obs) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> edges{-inf};
  for (int m = 1; m < obs.block_count(); ++m) edges.push_back(0.5 * (obs.eigenvalue(m - 1) + obs.eigenvalue(m)));
  edges.push_back(inf);
  return edges;
}

paths::ProbabilityTable pointer_kick_decomposition(const paths::Schedule& s, std::span<const double> widths) {
  const std::vector<double> w = resolve_widths(s, widths);
  const auto branches = pointer_final_state(s);
  const int last = s.last();

  std::vector<std::vector<double>> edges;
  for (int l = 1; l <= last; ++l) edges.push_back(reading_bin_edges(s.observables[l]));

  paths::ProbabilityTable table;
  table.source = paths::Source::CompositePointer;
  paths::OutcomeSequence key(last + 1, 0);
  key[0] = s.prep_index;
  std::vector<int> bins(last, 0);
  // Start every key at zero so that the table lists all sequences.
  auto for_each_bins = [&](auto&& body) {
    std::fill(bins.begin(), bins.end(), 0);
    while (true) {
      body();
      int d = last - 1;
      while (d >= 0 && ++bins[d] == static_cast<int>(edges[d].size()) - 1) bins[d--] = 0;
      if (d < 0) break;
    }
  };
  for_each_bins([&] {
    for (int l = 0; l < last; ++l) key[l + 1] = bins[l];
    table.entries[key] = 0.0;
  });

  std::vector<std::vector<double>> weight(last);
  for (const auto& a : branches) {
    for (const auto& b : branches) {
      // Orthogonal final system states never interfere.
      if (a.final_index != b.final_index) continue;
      const double coeff = (std::conj(a.amplitude) * b.amplitude).real();
      if (coeff == 0.0) continue;
      for (int l = 0; l < last; ++l) {
        weight[l].resize(edges[l].size() - 1);
        for (std::size_t k = 0; k + 1 < edges[l].size(); ++k)
          weight[l][k] = gaussian_product_integral(a.shifts[l], b.shifts[l], w[l], edges[l][k], edges[l][k + 1]);
      }
      for_each_bins([&] {
        double prod = coeff;
        for (int l = 0; l < last; ++l) prod *= weight[l][bins[l]];
        for (int l = 0; l < last; ++l) key[l + 1] = bins[l];
        table.entries[key] += prod;
      });
    }
  }
  return table;
}

std::vector<double> pointer_final_state_marginal(const paths::Schedule& s, std::span<const double> widths) {
  const std::vector<double> w = resolve_widths(s, widths);
  const auto branches = pointer_final_state(s);
  const auto& final_obs = s.observables[s.last()];
  std::vector<double> out(final_obs.block_count(), 0.0);
  for (const auto& a : branches) {
    for (const auto& b : branches) {
      if (a.final_index != b.final_index) continue;
      double overlap = 1.0;
      for (std::size_t l = 0; l < w.size(); ++l) overlap *= gaussian_overlap(a.shifts[l], b.shifts[l], w[l]);
      out[final_obs.block_of(a.final_index)] += (std::conj(a.amplitude) * b.amplitude).real() * overlap;
    }
  }
  return out;
}

}  // namespace seqmeas::probes
