// Acceptance suite: one PASS/FAIL line per criterion, indented notes below it.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "seqmeas/joint.hpp"
#include "seqmeas/pointer.hpp"
#include "seqmeas/probes.hpp"
#include "seqmeas/reality.hpp"
#include "seqmeas/weak.hpp"

using namespace seqmeas;
using fixtures::kUp;
using fixtures::pauli_obs;
using hilbert::Observable;
using hilbert::spin_up;

namespace {

// Pinned tolerances.
constexpr int kRandomSchedules = 200;
constexpr std::uint64_t kRandomSeed = 42;
constexpr double kNormTol = 1e-10;
constexpr double kNormSeconds = 30.0;
constexpr double kEquivTol = 1e-10;
constexpr double kEquivSeconds = 120.0;
constexpr double kPointerTvTol = 1e-5;
constexpr double kPointerFloor = 1e-15;
constexpr double kInsertTol = 1e-12;
constexpr double kBrokenMin = 1e-3;
constexpr double kOracleTol = 1e-12;
constexpr double kEndpointTol = 1e-10;
constexpr double kJumpMax = 0.05;
constexpr double kTrotterTol = 1e-6;
constexpr int kTrotterSteps = 1024;
constexpr double kRingMin = 0.8;
constexpr double kRingWidth = 0.05;
constexpr double kBesselL1 = 0.05;
constexpr int kBesselWalkSteps = 1024;
constexpr double kWeakValue = 0.5;
constexpr double kWeakTol = 0.01;
constexpr double kWeakOrder = 1.0;
constexpr double kErrorFloor = 1e-12;
constexpr double kMixtureRatio = 0.35;
constexpr double kResidualFloor = 1e-15;
constexpr std::int64_t kTrials = 100000;
constexpr std::uint64_t kSampleSeed = 7;
constexpr double kSampleTol = 0.01;

const double kTheta = std::numbers::pi / 3.0;

int failures = 0;

void verdict(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s: %s (%s)\n", id, title, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const std::string& text) { std::printf("    %s\n", text.c_str()); }

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<paths::Schedule> random_schedules() {
  std::mt19937_64 rng(kRandomSeed);
  paths::RandomScheduleOptions opts;
  opts.min_dim = 2;
  opts.max_dim = 4;
  opts.min_last = 1;
  opts.max_last = 4;
  std::vector<paths::Schedule> out;
  for (int k = 0; k < kRandomSchedules; ++k) out.push_back(paths::random_schedule(rng, opts));
  return out;
}

// ---------------------------------------------------------------------------

void criterion_1(const std::vector<paths::Schedule>& schedules) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int degenerate = 0;
  for (const auto& s : schedules) {
    worst = std::max(worst, std::abs(paths::probability_table(s).total() - 1.0));
    for (const auto& obs : s.observables) degenerate += obs.non_degenerate() ? 0 : 1;
  }
  const double elapsed = seconds_since(t0);
  verdict(1, "normalization", worst < kNormTol && elapsed < kNormSeconds,
          fmt("max |sum P - 1| = %.3g < %.0e over %d schedules, %.2f s < %.0f s", worst, kNormTol, kRandomSchedules,
              elapsed, kNormSeconds));
  note(fmt("%d observables with a degenerate eigenvalue", degenerate));
}

void criterion_2(const std::vector<paths::Schedule>& schedules) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& s : schedules)
    worst = std::max(worst, paths::max_deviation(probes::run_composite_gates(s), paths::probability_table(s)));
  const double elapsed = seconds_since(t0);
  verdict(2, "path amplitudes vs composite gates", worst < kEquivTol && elapsed < kEquivSeconds,
          fmt("max entry deviation %.3g < %.0e, %.2f s < %.0f s", worst, kEquivTol, elapsed, kEquivSeconds));
}

// TV over the width grid; ok when non-increasing, strictly while above the floor.
bool pointer_sweep(const paths::Schedule& s, std::string& detail) {
  const auto exact = paths::probability_table(s);
  const std::vector<double> grid{1.0, 0.3, 0.1, 0.03, 0.01};
  bool ok = true;
  double previous = INFINITY;
  for (double w : grid) {
    const std::vector<double> widths{w};
    const double tv = paths::total_variation(probes::pointer_kick_decomposition(s, widths), exact);
    ok = ok && (previous > kPointerFloor ? tv < previous : tv <= kPointerFloor);
    detail += fmt(" %g:%.3g", w, tv);
    previous = tv;
  }
  const std::vector<double> narrow{1e-3};
  const double tv = paths::total_variation(probes::pointer_kick_decomposition(s, narrow), exact);
  detail += fmt("; TV(1e-3) = %.3g", tv);
  return ok && tv < kPointerTvTol;
}

void criterion_3() {
  const auto qubit = fixtures::qubit_schedule();
  std::string lit;
  const bool ok_lit = pointer_sweep(qubit, lit);
  const auto chain = fixtures::make_schedule({0.0, 0.5, 1.0}, {pauli_obs('x'), pauli_obs('y'), pauli_obs('x')}, kUp);
  std::string gen;
  const bool ok_gen = pointer_sweep(chain, gen);

  // Packet bookkeeping against density-matrix updates at every width.
  double oracle_gap = 0.0;
  for (double w : {1.0, 0.3, 0.1, 0.03, 0.01, 1e-3}) {
    const std::vector<double> widths{w};
    for (const auto* s : {&qubit, &chain}) {
      const auto t = probes::pointer_kick_decomposition(*s, widths);
      for (const auto& [o, p] : oracle::pointer_instrument_table(*s, w)) oracle_gap = std::max(oracle_gap, std::abs(t.at(o) - p));
    }
  }
  verdict(3, "pointer limit", ok_lit && ok_gen && oracle_gap < kOracleTol,
          fmt("TV < %.0e at width 1e-3 and non-increasing over the width grid; density-matrix oracle gap %.2g",
              kPointerTvTol, oracle_gap));
  note("sigma_x -> sigma_y, prep up_x:" + lit);
  note("this schedule has TV = 0 at every width: the two outcomes are equally likely and the misbinned tails");
  note("are symmetric, so strict decrease cannot be observed; it is checked on a three-step chain:");
  note("sigma_x -> sigma_y -> sigma_x:" + gen);
}

void criterion_4() {
  using reality::Which;
  // B at t', C at t''.
  const auto mub = reality::verify_insertions(fixtures::qubit_schedule(), 0, {{0.3, Which::Minus}, {0.6, Which::Plus}});
  const auto tilted = reality::verify_insertions(fixtures::qubit_schedule(kTheta), 0,
                                                 {{0.3, Which::Minus}, {0.6, Which::Plus}});
  // C at t', B at t''.
  const auto reversed = reality::verify_insertions(fixtures::qubit_schedule(kTheta), 0,
                                                   {{0.3, Which::Plus}, {0.6, Which::Minus}});
  const auto c = fixtures::in_plane(kTheta);
  const double brute = oracle::four_path_marginal(spin_up('x'), {c.basis_vector(0), c.basis_vector(1)},
                                                  {hilbert::spin_down('x'), spin_up('x')}, c.basis_vector(1));
  const double gap = std::abs(reversed.marginal.at({kUp, kUp}) - brute);
  const double kept = std::max(mub.max_deviation, tilted.max_deviation);
  const bool ok = kept < kInsertTol && mub.holds(kInsertTol) && tilted.holds(kInsertTol) &&
                  reversed.max_deviation > kBrokenMin && gap < kOracleTol;
  verdict(4, "inserted B then C", ok,
          fmt("B,C deviation %.3g < %.0e; C,B deviation %.6f > %.0e; four-path oracle gap %.3g < %.0e", kept,
              kInsertTol, reversed.max_deviation, kBrokenMin, gap, kOracleTol));
  note(fmt("theta = pi/3: P(C1 <- B1) = %.6f, reordered marginal %.6f, oracle %.6f", reversed.original.at({kUp, kUp}),
           reversed.marginal.at({kUp, kUp}), brute));
}

void criterion_5() {
  auto setup = [](double beta) {
    return joint::make_gate_setup(pauli_obs('x'), pauli_obs('y'), spin_up('x'), spin_up('y'), beta);
  };
  const auto one = joint::gate_joint_probabilities(setup(1.0)).p;
  const auto minus_one = joint::gate_joint_probabilities(setup(-1.0)).p;
  double end_err = std::abs(one[0] - 1.0);
  for (int k = 1; k < 4; ++k) end_err = std::max(end_err, std::abs(one[k]));
  for (double p : minus_one) end_err = std::max(end_err, std::abs(p - 0.25));

  double jump = 0.0;
  auto prev = minus_one;
  for (int k = 1; k <= 200; ++k) {
    const auto cur = joint::gate_joint_probabilities(setup(-1.0 + 0.01 * k)).p;
    for (int j = 0; j < 4; ++j) jump = std::max(jump, std::abs(cur[j] - prev[j]));
    prev = cur;
  }

  double trotter = 0.0;
  std::string values;
  for (double beta : {-0.5, 0.0, 0.5}) {
    const auto s = setup(beta);
    const auto p = joint::gate_joint_probabilities(s).p;
    const auto o = oracle::joint_gate(s.b.second, s.c.second, s.b1, s.c1, beta, kTrotterSteps);
    for (int j = 0; j < 4; ++j) trotter = std::max(trotter, std::abs(p[j] - o[j]));
    values += fmt(" beta=%g:(%.6f, %.6f, %.6f, %.6f)", beta, p[0], p[1], p[2], p[3]);
  }
  verdict(5, "joint gate scan", end_err < kEndpointTol && jump < kJumpMax && trotter < kTrotterTol,
          fmt("endpoint error %.3g < %.0e; max jump %.4f < %.2f; Trotter K=%d gap %.3g < %.0e", end_err, kEndpointTol,
              jump, kJumpMax, kTrotterSteps, trotter, kTrotterTol));
  note("interior:" + values);
}

void criterion_6() {
  const joint::JointPointerSetup simultaneous{spin_up('x'), spin_up('y'), pauli_obs('x'), pauli_obs('y'), 0.0,
                                              kRingWidth, 64};
  const joint::ReadingGrid fine{-1.5, 1.5, 301};
  const auto map = joint::pointer_joint_distribution(simultaneous, fine);
  double ring = 0.0;
  for (int p = 0; p < fine.points; ++p)
    for (int q = 0; q < fine.points; ++q) {
      const double r = std::hypot(fine.at(p), fine.at(q));
      if (r >= 0.85 && r <= 1.15) ring += map.probability(p, q);
    }
  const double h = fine.spacing();
  const double fraction = ring * h * h / map.post_selection;

  const auto t0 = std::chrono::steady_clock::now();
  joint::JointPointerSetup oracle_setup = simultaneous;
  oracle_setup.steps = kBesselWalkSteps;
  const joint::ReadingGrid grid{-1.5, 1.5, 41};
  const auto walk = joint::pointer_joint_distribution(oracle_setup, grid);
  const auto bessel = joint::bessel_distribution(oracle_setup, grid);
  const double l1 =
      (walk.probability / walk.probability.sum() - bessel.probability / bessel.probability.sum()).cwiseAbs().sum();
  verdict(6, "joint pointer ring", fraction >= kRingMin && l1 < kBesselL1,
          fmt("annulus mass %.4f >= %.2f; Bessel vs K=%d walk L1 %.4f < %.2f on 41x41", fraction, kRingMin,
              kBesselWalkSteps, l1, kBesselL1));
  note(fmt("raw grid mass ratio Bessel/walk %.4f; %.1f s", bessel.probability.sum() / walk.probability.sum(),
           seconds_since(t0)));
}

// Observed orders between successive gamma halvings; errors under the floor
// count as converged.
bool order_ok(const std::vector<double>& errors, std::string& detail) {
  bool ok = true;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k - 1] < kErrorFloor && errors[k] < kErrorFloor) {
      detail += " exact";
      continue;
    }
    const double order = std::log2(errors[k - 1] / errors[k]);
    detail += fmt(" %.3f", order);
    ok = ok && order >= kWeakOrder;
  }
  return ok;
}

void criterion_7() {
  const std::vector<double> gammas{0.08, 0.04, 0.02, 0.01};
  auto errors_for = [&](const paths::Schedule& s, const Observable& q, double target, std::string& values) {
    std::vector<double> errors;
    for (double g : gammas) {
      const auto r = weak::weak_pointer_mean(s, {g, 1.0, q, 0.5}, {kUp, kUp});
      errors.push_back(std::abs(r.exact_mean - (std::isnan(target) ? r.mean_reading : target)));
      values += fmt(" %g:%.3g", g, errors.back());
    }
    return errors;
  };
  const auto s = fixtures::qubit_schedule();
  const auto up_z = fixtures::projector_obs(spin_up('z'));
  const auto report = weak::weak_pointer_mean(s, {0.01, 1.0, up_z, 0.5}, {kUp, kUp});
  std::string lit_values, lit_orders;
  const auto lit = errors_for(s, up_z, kWeakValue, lit_values);
  const bool lit_ok = order_ok(lit, lit_orders);

  const auto tilted = fixtures::qubit_schedule(kTheta);
  const auto q = fixtures::projector_obs((spin_up('x') + spin_up('z')).normalized());
  std::string gen_values, gen_orders;
  const auto gen = errors_for(tilted, q, NAN, gen_values);
  const bool gen_ok = order_ok(gen, gen_orders) && gen.back() < kWeakTol;

  verdict(7, "weak pointer mean", std::abs(report.mean_reading - kWeakValue) < 1e-12 && lit.back() < kWeakTol && lit_ok &&
                                      gen_ok,
          fmt("weak value %.12g; |exact mean - 0.5| at gamma 0.01 = %.3g < %.2f; orders >= %.0f", report.mean_reading,
              lit.back(), kWeakTol, kWeakOrder));
  note("up_x -> up_z projector -> up_y errors:" + lit_values + "; orders:" + lit_orders);
  note("the cross terms cancel for this pair, so the finite-coupling mean is 0.5 at every gamma;");
  note("order checked on theta = pi/3 with the (up_x + up_z) projector, errors:" + gen_values + "; orders:" +
       gen_orders);
}

void criterion_8() {
  auto residual = [](const paths::Schedule& s, double gamma) {
    const std::vector<weak::WeakGateConfig> g{{gamma, pauli_obs('z'), 0.5}};
    const auto r = weak::weak_gate_distribution(s, g);
    return paths::max_deviation(r.combined, weak::weak_gate_mixture(r, g));
  };
  auto sweep = [&](const paths::Schedule& s, std::string& detail) {
    bool ok = true;
    for (double g : {0.2, 0.1, 0.05}) {
      const double r = residual(s, g), r2 = residual(s, g / 2);
      if (r < kResidualFloor && r2 < kResidualFloor) {
        detail += fmt(" %g: exact (%.2g)", g, r);
        continue;
      }
      detail += fmt(" %g: %.4f", g, r2 / r);
      ok = ok && r2 / r < kMixtureRatio;
    }
    return ok;
  };
  std::string lit, gen;
  const bool ok_lit = sweep(fixtures::qubit_schedule(), lit);
  const bool ok_gen = sweep(fixtures::qubit_schedule(kTheta), gen);
  verdict(8, "weak gate mixture", ok_lit && ok_gen, fmt("residual(gamma/2)/residual(gamma) < %.2f", kMixtureRatio));
  note("sigma_x -> sigma_z -> sigma_y:" + lit);
  note("known and unknown tables coincide there (both 1/2), so the mixture is exact; the ratio is measured on");
  note("sigma_x -> sigma_z -> (theta = pi/3):" + gen);
}

void criterion_9() {
  const auto s = fixtures::qubit_schedule();
  const auto table = paths::probability_table(s);
  const auto freq = paths::sample_outcomes(s, kTrials, kSampleSeed);
  double worst = 0.0;
  for (const auto& [o, p] : table.entries) worst = std::max(worst, std::abs((freq.count(o) ? freq.at(o) : 0.0) - p));
  verdict(9, "sampling", worst < kSampleTol,
          fmt("max |frequency - P| = %.4f < %.2f with %lld trials, seed %llu", worst, kSampleTol,
              static_cast<long long>(kTrials), static_cast<unsigned long long>(kSampleSeed)));
}

}  // namespace

int main() {
  const auto schedules = random_schedules();
  criterion_1(schedules);
  criterion_2(schedules);
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
