#pragma once

// Small schedules shared by the test binaries.

#include <cmath>
#include <numbers>
#include <vector>

#include "seqmeas/hilbert.hpp"
#include "seqmeas/paths.hpp"

namespace fixtures {

using namespace seqmeas;
using hilbert::COperator;
using hilbert::CVector;
using hilbert::Observable;

// Block index of the +1 outcome of a Pauli-type observable.
inline constexpr int kUp = 1;
inline constexpr int kDown = 0;

inline Observable pauli_obs(char axis) { return Observable::from_matrix(hilbert::pauli(axis)); }

// cos(theta) sigma_x + sin(theta) sigma_y as an observable.
inline Observable in_plane(double theta) { return Observable::from_matrix(hilbert::in_plane_spin(theta)); }

inline Observable projector_obs(const CVector& v) { return Observable::from_matrix(v * v.adjoint()); }

inline paths::Schedule make_schedule(std::vector<double> times, std::vector<Observable> obs, int prep,
                                     const COperator& h) {
  paths::Schedule s{std::move(times), std::move(obs), hilbert::Evolution::from_hamiltonian(h), prep};
  s.validate();
  return s;
}

inline paths::Schedule make_schedule(std::vector<double> times, std::vector<Observable> obs, int prep) {
  const int n = obs.front().dim();
  return make_schedule(std::move(times), std::move(obs), prep, COperator::Zero(n, n));
}

// Prepared in up_x by a sigma_x measurement, then sigma_y; H = 0.
inline paths::Schedule qubit_schedule() { return make_schedule({0.0, 1.0}, {pauli_obs('x'), pauli_obs('y')}, kUp); }

// Same, with the final observable at angle theta in the x-y plane.
inline paths::Schedule qubit_schedule(double theta) {
  return make_schedule({0.0, 1.0}, {pauli_obs('x'), in_plane(theta)}, kUp);
}

inline double max_abs_diff(const paths::ProbabilityTable& a, const paths::ProbabilityTable& b) {
  return paths::max_deviation(a, b);
}

}  // namespace fixtures
