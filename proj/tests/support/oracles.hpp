#pragma once

// Test-only reference computations. Each one takes a different route from the
// library code it checks: Taylor exponentials instead of eigendecompositions,
// eigenvector path sums instead of projector chains, density-matrix updates
// instead of packet bookkeeping, plain Simpson sums instead of adaptive
// quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "seqmeas/hilbert.hpp"
#include "seqmeas/paths.hpp"

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Table = std::map<std::vector<int>, double>;

inline Matrix expm(const Matrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const Matrix x = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= 24; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline Matrix propagator(const Matrix& h, double dt) { return expm(Complex(0.0, -dt) * h); }

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Matrix sigma_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  return x;
}

// ---------------------------------------------------------------------------
// Path sums over eigenvectors

/// Real-path table by enumerating every virtual path n_1..n_L through the
/// eigenvector bases and adding amplitudes that share intermediate blocks.
inline Table path_sum_table(const seqmeas::paths::Schedule& s) {
  const int n = s.dim();
  const int last = s.last();
  std::vector<Matrix> u;
  for (int l = 0; l < last; ++l) u.push_back(propagator(s.evolution.hamiltonian(), s.times[l + 1] - s.times[l]));

  std::map<std::vector<int>, Complex> amp;  // key: blocks m_1..m_{L-1}, then n_L
  std::vector<int> path(last + 1, 0);
  path[0] = s.prep_index;
  const auto total = static_cast<long long>(std::pow(n, last));
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int l = 1; l <= last; ++l) {
      path[l] = static_cast<int>(c % n);
      c /= n;
    }
    Complex a = 1.0;
    for (int l = 0; l < last; ++l)
      a *= s.observables[l + 1].basis_vector(path[l + 1]).dot(u[l] * s.observables[l].basis_vector(path[l]));
    std::vector<int> key;
    for (int l = 1; l < last; ++l) key.push_back(s.observables[l].block_of(path[l]));
    key.push_back(path[last]);
    amp[key] += a;
  }
  Table out;
  for (const auto& [key, a] : amp) {
    std::vector<int> o{s.prep_index};
    o.insert(o.end(), key.begin(), key.end() - 1);
    o.push_back(s.observables[last].block_of(key.back()));
    out[o] += std::norm(a);
  }
  return out;
}

/// P(final <- mid_i <- first_j <- prep) for four qubit measurements, H = 0,
/// summed over the two middle outcomes. `mid` and `first` hold eigenvectors.
inline double four_path_marginal(const Vector& prep, const std::vector<Vector>& first, const std::vector<Vector>& mid,
                                 const Vector& final) {
  double p = 0.0;
  for (const auto& f : first)
    for (const auto& m : mid) p += std::norm(final.dot(m) * m.dot(f) * f.dot(prep));
  return p;
}

// ---------------------------------------------------------------------------
// Joint gates on the explicit system x probe x probe space

/// exp(i alpha P (x) sigma_x) on a system (x) qubit factor, in closed form.
inline Matrix projector_flip(const Matrix& p, double alpha) {
  const Matrix id = Matrix::Identity(p.rows(), p.cols());
  Matrix rot = std::cos(alpha) * Matrix::Identity(2, 2) + Complex(0.0, std::sin(alpha)) * sigma_x();
  return kron(p, rot) + kron(id - p, Matrix::Identity(2, 2));
}

/// Four normalized probabilities P(j', j'') (j = 0 unflipped, 1 flipped).
/// trotter_steps = 0 exponentiates the overlap segment directly; otherwise a
/// symmetric product of that many steps is used.
inline std::array<double, 4> joint_gate(const Matrix& pb, const Matrix& pc, const Vector& b1, const Vector& c1,
                                        double beta, int trotter_steps) {
  const int n = static_cast<int>(b1.size());
  const Matrix i2 = Matrix::Identity(2, 2);
  // Embed system (x) probe-k operators into system (x) probe1 (x) probe2.
  auto on_first = [&](const Matrix& m) { return kron(m, i2); };
  auto on_second = [&](const Matrix& m) {
    Matrix out = Matrix::Zero(4 * n, 4 * n);
    // m acts on system (x) probe2; probe1 is the middle factor.
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        for (int p1 = 0; p1 < 2; ++p1)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) out(s * 4 + p1 * 2 + a, t * 4 + p1 * 2 + b) = m(s * 2 + a, t * 2 + b);
    return out;
  };
  const double h = std::numbers::pi / 2.0;
  const double a = std::abs(beta);
  const Matrix solo_b = on_first(projector_flip(pb, h * a));
  const Matrix solo_c = on_second(projector_flip(pc, h * a));

  Matrix overlap;
  if (trotter_steps == 0) {
    const Matrix gen = on_first(kron(pb, sigma_x())) + on_second(kron(pc, sigma_x()));
    overlap = expm(Complex(0.0, h * (1.0 - a)) * gen);
  } else {
    const double d = h * (1.0 - a) / trotter_steps;
    const Matrix half_b = on_first(projector_flip(pb, d / 2.0));
    const Matrix step = half_b * on_second(projector_flip(pc, d)) * half_b;
    overlap = Matrix::Identity(4 * n, 4 * n);
    for (int k = 0; k < trotter_steps; ++k) overlap = step * overlap;
  }
  const Matrix total = beta >= 0.0 ? Matrix(solo_c * overlap * solo_b) : Matrix(solo_b * overlap * solo_c);

  Vector start = Vector::Zero(4 * n);
  for (int s = 0; s < n; ++s) start(s * 4) = b1(s);
  const Vector out = total * start;
  std::array<double, 4> p{};
  double norm = 0.0;
  for (int k = 0; k < 4; ++k) {
    Complex amp = 0.0;
    for (int s = 0; s < n; ++s) amp += std::conj(c1(s)) * out(s * 4 + k);
    p[k] = std::norm(amp);
    norm += p[k];
  }
  for (double& x : p) x /= norm;
  return p;
}

// ---------------------------------------------------------------------------
// Pointers through density-matrix updates

/// Integral over [lo, hi] of G(f - a) G(f - b), from erf.
inline double gaussian_pair_in(double a, double b, double w, double lo, double hi) {
  const double c = 0.5 * (a + b);
  const double k = std::sqrt(2.0) / w;
  return std::exp(-(a - b) * (a - b) / (2.0 * w * w)) * 0.5 * (std::erf(k * (hi - c)) - std::erf(k * (lo - c)));
}

/// Reading-bin table for impulsive Gaussian pointers of width w on
/// measurements 1..L, the preparation read exactly. Each reading bin acts on
/// the density matrix as rho -> sum_{m,m'} c_{mm'} pi_m rho pi_m'.
inline Table pointer_instrument_table(const seqmeas::paths::Schedule& s, double w) {
  const int last = s.last();
  const Vector q0 = s.observables[0].basis_vector(s.prep_index);
  Table out;
  std::function<void(int, const Matrix&, std::vector<int>&)> walk = [&](int l, const Matrix& rho,
                                                                          std::vector<int>& key) {
    if (l > last) {
      out[key] += rho.trace().real();
      return;
    }
    const Matrix u = propagator(s.evolution.hamiltonian(), s.times[l] - s.times[l - 1]);
    const Matrix evolved = u * rho * u.adjoint();
    const auto& obs = s.observables[l];
    const int m = obs.block_count();
    for (int bin = 0; bin < m; ++bin) {
      const double lo = bin == 0 ? -INFINITY : 0.5 * (obs.eigenvalue(bin - 1) + obs.eigenvalue(bin));
      const double hi = bin == m - 1 ? INFINITY : 0.5 * (obs.eigenvalue(bin) + obs.eigenvalue(bin + 1));
      Matrix next = Matrix::Zero(rho.rows(), rho.cols());
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          next += gaussian_pair_in(obs.eigenvalue(a), obs.eigenvalue(b), w, lo, hi) * obs.projector(a) * evolved *
                  obs.projector(b);
      key.push_back(bin);
      walk(l + 1, next, key);
      key.pop_back();
    }
  };
  std::vector<int> key{s.prep_index};
  walk(1, q0 * q0.adjoint(), key);
  return out;
}

// ---------------------------------------------------------------------------
// Plain quadrature

/// Composite Simpson rule with `intervals` (even) sub-intervals.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int intervals) {
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int k = 1; k < intervals; ++k) sum += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
  return sum * h / 3.0;
}

/// <f> of sum_k c_k G(f - a_k) by direct integration of |psi|^2.
inline double packet_mean(const std::vector<double>& shifts, const std::vector<Complex>& amps, double w) {
  auto psi2 = [&](double f) {
    Complex v = 0.0;
    for (std::size_t k = 0; k < shifts.size(); ++k)
      v += amps[k] * std::pow(2.0 / (std::numbers::pi * w * w), 0.25) * std::exp(-(f - shifts[k]) * (f - shifts[k]) / (w * w));
    return std::norm(v);
  };
  double lo = shifts.front(), hi = shifts.front();
  for (double a : shifts) lo = std::min(lo, a), hi = std::max(hi, a);
  lo -= 12.0 * w;
  hi += 12.0 * w;
  const double norm = simpson(psi2, lo, hi, 200000);
  return simpson([&](double f) { return f * psi2(f); }, lo, hi, 200000) / norm;
}

}  // namespace oracle
