#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "seqmeas/errors.hpp"
#include "seqmeas/joint.hpp"

namespace seqmeas::joint {

namespace {

void check_anticommuting(const JointPointerSetup& setup) {
  const COperator& b = setup.b.matrix();
  const COperator& c = setup.c.matrix();
  const COperator id = COperator::Identity(b.rows(), b.cols());
  if ((b * b - id).norm() > 1e-9 || (c * c - id).norm() > 1e-9 || (b * c + c * b).norm() > 1e-9)
    throw ValidationError("the Bessel form needs B^2 = C^2 = 1 and anticommuting B, C");
}

double integrate(const auto& f, double upper, const QuadratureOptions& quad, const char* name) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, 0.0, upper, static_cast<unsigned>(quad.max_depth), quad.rel_tol, &error, &l1);
  if (!(error <= quad.rel_tol * l1 + 1e-300))
    throw QuadratureNotConverged(std::string(name) + " integral did not reach tolerance");
  return value;
}

struct Radial {
  double i0;
  double i1;
};

// The two radial integrals depend on |f| only.
Radial radial_integrals(double f, double w, const QuadratureOptions& quad) {
  const double upper = quad.cutoff / w;
  auto damping = [w](double l) { return l * std::exp(-l * l * w * w / 4.0); };
  Radial r{integrate([&](double l) { return damping(l) * std::cos(l) * std::cyl_bessel_j(0.0, l * f); }, upper, quad,
                     "J0"),
           0.0};
  if (f > 0.0)
    r.i1 = integrate([&](double l) { return damping(l) * std::sin(l) * std::cyl_bessel_j(1.0, l * f); }, upper, quad,
                     "J1");
  return r;
}

struct Coefficients {
  Complex s0;  // <c1|b1>
  Complex sb;  // <c1|B|b1>
  Complex sc;  // <c1|C|b1>
};

Coefficients prepare(const JointPointerSetup& setup) {
  setup.validate();
  if (setup.beta != 0.0) throw ValidationError("the Bessel form applies to simultaneous measurement only");
  check_anticommuting(setup);
  return {setup.c1.dot(setup.b1), setup.c1.dot(setup.b.matrix() * setup.b1), setup.c1.dot(setup.c.matrix() * setup.b1)};
}

Complex assemble(const Coefficients& k, const Radial& r, double f1, double f2, double w) {
  const double f = std::hypot(f1, f2);
  const Complex angular = f > 0.0 ? (k.sb * (f1 / f) + k.sc * (f2 / f)) * r.i1 : Complex(0.0);
  return w / std::sqrt(2.0 * std::numbers::pi) * (k.s0 * r.i0 + angular);
}

}  // namespace

Complex bessel_amplitude(const JointPointerSetup& setup, double f1, double f2, const QuadratureOptions& quad) {
  const Coefficients k = prepare(setup);
  return assemble(k, radial_integrals(std::hypot(f1, f2), setup.width, quad), f1, f2, setup.width);
}

JointPointerMap bessel_distribution(const JointPointerSetup& setup, const ReadingGrid& grid,
                                    const QuadratureOptions& quad) {
  if (grid.points < 1 || !(grid.hi >= grid.lo)) throw ValidationError("reading grid is empty");
  const Coefficients k = prepare(setup);
  std::map<long long, Radial> cache;
  JointPointerMap out;
  out.grid = grid;
  out.probability.resize(grid.points, grid.points);
  for (int p = 0; p < grid.points; ++p)
    for (int q = 0; q < grid.points; ++q) {
      const double f1 = grid.at(p), f2 = grid.at(q);
      const double f = std::hypot(f1, f2);
      const long long key = std::llround(f * 1e12);
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, radial_integrals(f, setup.width, quad)).first;
      out.probability(p, q) = std::norm(assemble(k, it->second, f1, f2, setup.width));
    }
  // Riemann sum on the grid; no closed form for this route.
  const double h = grid.spacing();
  out.post_selection = out.probability.sum() * h * h;
  return out;
}

}  // namespace seqmeas::joint
