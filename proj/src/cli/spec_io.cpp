#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "seqmeas/cli.hpp"
#include "seqmeas/errors.hpp"

namespace seqmeas::cli {

using nlohmann::json;
using hilbert::Complex;
using hilbert::COperator;
using hilbert::CVector;
using hilbert::Observable;

namespace {

// Line of the first occurrence of a key, so that type errors can point
// somewhere useful. nlohmann does not keep value positions.
int line_of_key(std::string_view text, const std::string& path) {
  std::string key = path;
  const auto dot = key.find_last_of('.');
  if (dot != std::string::npos) key = key.substr(dot + 1);
  const auto bracket = key.find('[');
  if (bracket != std::string::npos) key = key.substr(0, bracket);
  const auto at = text.find("\"" + key + "\"");
  if (at == std::string_view::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + at, '\n'));
}

int line_of_offset(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(path, line_of_key(text_, path), what);
  }

  const json& require(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError("missing required field '" + join(path, key) + "'");
    return *it;
  }

  const json* optional(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  std::int64_t integer64(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<std::int64_t>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  Complex complex(const json& v, const std::string& path) const {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    fail(path, "expected a number or [re, im]");
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], index(path, k)));
    return out;
  }

  CVector state(const json& v, const std::string& path) const {
    if (v.is_string()) {
      static const std::regex named(R"((up|down)_([xyz]))");
      std::smatch m;
      const std::string s = v.get<std::string>();
      if (std::regex_match(s, m, named)) {
        const char axis = m[2].str()[0];
        return m[1] == "up" ? hilbert::spin_up(axis) : hilbert::spin_down(axis);
      }
      static const std::regex basis(R"(basis\(\s*(\d+)\s*,\s*(\d+)\s*\))");
      if (std::regex_match(s, m, basis)) {
        const int n = std::stoi(m[1]);
        const int k = std::stoi(m[2]);
        if (n < 1 || k >= n) throw ValidationError("'" + path + "': basis index out of range");
        return CVector::Unit(n, k);
      }
      fail(path, "unknown state shorthand '" + s + "'");
    }
    if (!v.is_array() || v.empty()) fail(path, "expected a state shorthand or a list of amplitudes");
    CVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = complex(v[k], index(path, k));
    if (std::abs(out.norm() - 1.0) > 1e-10) throw ValidationError("'" + path + "': state is not normalized");
    return out;
  }

  COperator matrix(const json& v, const std::string& path) const {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      static const std::regex pauli(R"(sigma_([xyz]))");
      static const std::regex sized(R"((identity|zero)\(\s*(\d+)\s*\))");
      std::smatch m;
      if (std::regex_match(s, m, pauli)) return hilbert::pauli(m[1].str()[0]);
      if (std::regex_match(s, m, sized)) {
        const int n = std::stoi(m[2]);
        if (n < 1) throw ValidationError("'" + path + "': dimension must be positive");
        return m[1] == "identity" ? hilbert::identity(n) : COperator::Zero(n, n);
      }
      fail(path, "unknown operator shorthand '" + s + "'");
    }
    if (v.is_object()) {
      if (const json* p = optional(v, "projector", path)) {
        const CVector u = state(*p, join(path, "projector"));
        return u * u.adjoint();
      }
      if (const json* t = optional(v, "terms", path)) {
        const std::string tp = join(path, "terms");
        if (!t->is_array() || t->empty()) fail(tp, "expected a list of [coefficient, operator]");
        COperator sum;
        for (std::size_t k = 0; k < t->size(); ++k) {
          const json& term = (*t)[k];
          const std::string kp = index(tp, k);
          if (!term.is_array() || term.size() != 2) fail(kp, "expected [coefficient, operator]");
          const COperator op = complex(term[0], kp) * matrix(term[1], kp);
          if (k == 0) sum = op;
          else if (op.rows() != sum.rows()) throw ValidationError("'" + kp + "': dimension mismatch");
          else sum += op;
        }
        return sum;
      }
      fail(path, "operator object needs 'projector' or 'terms'");
    }
    if (!v.is_array() || v.empty()) fail(path, "expected an operator shorthand or a list of rows");
    const auto n = static_cast<Eigen::Index>(v.size());
    COperator out(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const json& row = v[r];
      const std::string rp = index(path, r);
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) fail(rp, "matrix must be square");
      for (Eigen::Index c = 0; c < n; ++c) out(r, c) = complex(row[c], index(rp, c));
    }
    return out;
  }

  Observable observable(const json& v, const std::string& path) const {
    const COperator m = matrix(v, path);
    try {
      return Observable::from_matrix(m);
    } catch (const NotHermitian&) {
      throw NotHermitian("'" + path + "': matrix is not Hermitian");
    }
  }

 private:
  std::string_view text_;
};

paths::Schedule read_schedule(const Reader& rd, const json& sys) {
  const std::string path = "system";
  paths::Schedule s;
  s.times = rd.numbers(rd.require(sys, "times", path), "system.times");
  const json& obs = rd.require(sys, "observables", path);
  if (!obs.is_array()) rd.fail("system.observables", "expected a list");
  if (obs.empty()) throw ValidationError("'system.observables' is empty");
  for (std::size_t k = 0; k < obs.size(); ++k) s.observables.push_back(rd.observable(obs[k], Reader::index("system.observables", k)));

  const int n = s.observables.front().dim();
  if (const json* d = rd.optional(sys, "dimension", path))
    if (rd.integer(*d, "system.dimension") != n) throw ValidationError("'system.dimension' disagrees with the observables");

  s.evolution = hilbert::Evolution::null(n);
  if (const json* h = rd.optional(sys, "hamiltonian", path)) {
    if (!(h->is_string() && h->get<std::string>() == "zero")) {
      const COperator ham = rd.matrix(*h, "system.hamiltonian");
      if (ham.rows() != n) throw ValidationError("'system.hamiltonian' does not match the system dimension");
      if (!hilbert::is_hermitian(ham)) throw NotHermitian("'system.hamiltonian' is not Hermitian");
      s.evolution = hilbert::Evolution::from_hamiltonian(ham);
    }
  }

  const json& prep = rd.require(sys, "prep", path);
  if (prep.is_number_integer()) {
    s.prep_index = prep.get<int>();
  } else {
    const CVector u = rd.state(prep, "system.prep");
    const Observable& q0 = s.observables.front();
    if (u.size() != n) throw ValidationError("'system.prep' does not match the system dimension");
    s.prep_index = -1;
    for (int k = 0; k < n; ++k)
      if (std::abs(std::abs(q0.basis_vector(k).dot(u)) - 1.0) < 1e-9) s.prep_index = k;
    if (s.prep_index < 0) throw ValidationError("'system.prep' is not an eigenvector of the first observable");
  }
  s.validate();
  return s;
}

JointSpec read_joint(const Reader& rd, const json& j) {
  const std::string path = "joint";
  JointSpec out{rd.observable(rd.require(j, "B", path), "joint.B"), rd.observable(rd.require(j, "C", path), "joint.C"),
                rd.state(rd.require(j, "prep", path), "joint.prep"), rd.state(rd.require(j, "post", path), "joint.post"),
                0.0, {}, 0.05, 64, {}};
  if (const json* v = rd.optional(j, "beta", path)) out.beta = rd.number(*v, "joint.beta");
  if (const json* v = rd.optional(j, "betas", path)) {
    if (const json* x = rd.optional(*v, "start", "joint.betas")) out.betas.start = rd.number(*x, "joint.betas.start");
    if (const json* x = rd.optional(*v, "stop", "joint.betas")) out.betas.stop = rd.number(*x, "joint.betas.stop");
    if (const json* x = rd.optional(*v, "step", "joint.betas")) out.betas.step = rd.number(*x, "joint.betas.step");
  }
  if (const json* v = rd.optional(j, "width", path)) out.width = rd.number(*v, "joint.width");
  if (const json* v = rd.optional(j, "steps", path)) out.steps = rd.integer(*v, "joint.steps");
  if (const json* g = rd.optional(j, "grid", path)) {
    if (const json* x = rd.optional(*g, "min", "joint.grid")) out.grid.lo = rd.number(*x, "joint.grid.min");
    if (const json* x = rd.optional(*g, "max", "joint.grid")) out.grid.hi = rd.number(*x, "joint.grid.max");
    if (const json* x = rd.optional(*g, "points", "joint.grid")) out.grid.points = rd.integer(*x, "joint.grid.points");
  }

  if (!(std::abs(out.beta) <= 1.0)) throw ValidationError("'joint.beta' must lie in [-1, 1]");
  const BetaGrid& b = out.betas;
  if (!(b.start >= -1.0 && b.stop <= 1.0 && b.start <= b.stop))
    throw ValidationError("'joint.betas' must lie within [-1, 1] with start <= stop");
  if (!(b.step > 0.0)) throw ValidationError("'joint.betas.step' must be positive");
  if (!(out.width > 0.0)) throw ValidationError("'joint.width' must be positive");
  if (out.steps < 2 || out.steps % 2 != 0) throw ValidationError("'joint.steps' must be a positive even number");
  if (out.grid.points < 1 || !(out.grid.hi >= out.grid.lo)) throw ValidationError("'joint.grid' is empty");
  if (out.prep.size() != out.b.dim() || out.post.size() != out.b.dim() || out.c.dim() != out.b.dim())
    throw ValidationError("joint states and observables must share one dimension");
  return out;
}

reality::Which read_which(const Reader& rd, const json& v, const std::string& path) {
  const std::string s = rd.string(v, path);
  if (s == "minus") return reality::Which::Minus;
  if (s == "plus") return reality::Which::Plus;
  throw ValidationError("'" + path + "' must be \"minus\" or \"plus\"");
}

}  // namespace

RunSpec parse_spec(std::string_view text, Mode mode) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("", line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  const Reader rd(text);
  if (!doc.is_object()) rd.fail("", "top level must be an object");

  RunSpec spec;
  spec.mode = mode;
  if (const json* v = rd.optional(doc, "tolerance", "")) {
    spec.tolerance = rd.number(*v, "tolerance");
    if (!(spec.tolerance > 0.0)) throw ValidationError("'tolerance' must be positive");
  }
  if (const json* sys = rd.optional(doc, "system", "")) spec.schedule = read_schedule(rd, *sys);

  if (const json* smp = rd.optional(doc, "sampling", "")) {
    spec.trials = rd.integer64(rd.require(*smp, "trials", "sampling"), "sampling.trials");
    if (spec.trials < 1) throw ValidationError("'sampling.trials' must be at least 1");
    if (const json* v = rd.optional(*smp, "seed", "sampling"))
      spec.seed = static_cast<std::uint64_t>(rd.integer64(*v, "sampling.seed"));
  }
  if (const json* v = rd.optional(doc, "pointer_widths", "")) {
    spec.pointer_widths = rd.numbers(*v, "pointer_widths");
    for (double w : spec.pointer_widths)
      if (!(w > 0.0)) throw ValidationError("'pointer_widths' must be positive");
  }
  if (const json* r = rd.optional(doc, "random", "")) {
    RandomSpec rs;
    rs.count = rd.integer(rd.require(*r, "count", "random"), "random.count");
    if (rs.count < 1) throw ValidationError("'random.count' must be at least 1");
    if (const json* v = rd.optional(*r, "seed", "random")) rs.seed = static_cast<std::uint64_t>(rd.integer64(*v, "random.seed"));
    if (const json* v = rd.optional(*r, "max_dim", "random")) rs.options.max_dim = rd.integer(*v, "random.max_dim");
    if (const json* v = rd.optional(*r, "max_last", "random")) rs.options.max_last = rd.integer(*v, "random.max_last");
    if (rs.options.max_dim < rs.options.min_dim || rs.options.max_last < rs.options.min_last)
      throw ValidationError("'random' bounds are inconsistent");
    spec.random = rs;
    spec.seed = rs.seed;
  }
  if (const json* r = rd.optional(doc, "reality", "")) {
    spec.level = rd.integer(rd.require(*r, "level", "reality"), "reality.level");
    const json& ins = rd.require(*r, "insert", "reality");
    if (!ins.is_array() || ins.empty()) rd.fail("reality.insert", "expected a non-empty list");
    for (std::size_t k = 0; k < ins.size(); ++k) {
      const std::string p = Reader::index("reality.insert", k);
      spec.insertions.push_back({rd.number(rd.require(ins[k], "t", p), p + ".t"),
                                 read_which(rd, rd.require(ins[k], "which", p), p + ".which")});
    }
    if (const json* e = rd.optional(*r, "expect", "reality")) {
      const std::string s = rd.string(*e, "reality.expect");
      if (s != "invariant" && s != "broken") throw ValidationError("'reality.expect' must be \"invariant\" or \"broken\"");
      spec.expect_invariant = s == "invariant";
    }
  }
  if (const json* j = rd.optional(doc, "joint", "")) spec.joint = read_joint(rd, *j);
  if (const json* w = rd.optional(doc, "weak", "")) {
    if (const json* gates = rd.optional(*w, "gates", "weak")) {
      if (!gates->is_array() || gates->empty()) rd.fail("weak.gates", "expected a non-empty list");
      for (std::size_t k = 0; k < gates->size(); ++k) {
        const std::string p = Reader::index("weak.gates", k);
        const json& g = (*gates)[k];
        spec.weak_gates.push_back({rd.number(rd.require(g, "gamma", p), p + ".gamma"),
                                   rd.observable(rd.require(g, "observable", p), p + ".observable"),
                                   rd.number(rd.require(g, "t", p), p + ".t")});
        const double gamma = spec.weak_gates.back().gamma;
        if (!(gamma > 0.0 && gamma <= std::numbers::pi / 2.0))
          throw ValidationError("'" + p + ".gamma' must lie in (0, pi/2]");
      }
    }
    if (const json* ptr = rd.optional(*w, "pointer", "weak")) {
      const std::string p = "weak.pointer";
      WeakPointerSpec wp{rd.observable(rd.require(*ptr, "observable", p), p + ".observable"),
                         rd.number(rd.require(*ptr, "t", p), p + ".t"), 1.0, {}, {}};
      if (const json* v = rd.optional(*ptr, "width", p)) wp.width = rd.number(*v, p + ".width");
      wp.gammas = rd.numbers(rd.require(*ptr, "gammas", p), p + ".gammas");
      const json& cond = rd.require(*ptr, "conditioning", p);
      if (!cond.is_array()) rd.fail(p + ".conditioning", "expected a list of outcome indices");
      for (std::size_t k = 0; k < cond.size(); ++k)
        wp.conditioning.push_back(rd.integer(cond[k], Reader::index(p + ".conditioning", k)));
      if (!(wp.width > 0.0)) throw ValidationError("'weak.pointer.width' must be positive");
      if (wp.gammas.empty()) throw ValidationError("'weak.pointer.gammas' is empty");
      for (double g : wp.gammas)
        if (!(g > 0.0)) throw ValidationError("'weak.pointer.gammas' must be positive");
      spec.weak_pointer = std::move(wp);
    }
  }

  // Mode-required sections.
  auto need = [&](bool present, const char* what) {
    if (!present) throw ValidationError(std::string("mode '") + std::string(to_string(mode)) + "' needs " + what);
  };
  switch (mode) {
    case Mode::Probs:
      need(spec.schedule.has_value(), "a 'system' section");
      break;
    case Mode::VerifyEquivalence:
      need(spec.schedule.has_value() || spec.random.has_value(), "a 'system' or 'random' section");
      break;
    case Mode::Reality:
      need(spec.schedule.has_value() && !spec.insertions.empty(), "'system' and 'reality' sections");
      break;
    case Mode::JointGateScan:
    case Mode::JointPointerMap:
    case Mode::BesselMap:
      need(spec.joint.has_value(), "a 'joint' section");
      break;
    case Mode::WeakGate:
      need(spec.schedule.has_value() && !spec.weak_gates.empty(), "'system' and 'weak.gates' sections");
      break;
    case Mode::WeakMean:
      need(spec.schedule.has_value() && spec.weak_pointer.has_value(), "'system' and 'weak.pointer' sections");
      break;
  }
  return spec;
}

RunSpec load_spec(const std::string& path, Mode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  RunSpec spec = parse_spec(buf.str(), mode);
  spec.input_path = path;
  return spec;
}

}  // namespace seqmeas::cli
