#include "psweep/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "psweep/errors.hpp"
#include "psweep/io.hpp"
#include "psweep/scalar_sweep.hpp"

namespace psweep {

namespace {

const char* face_token(Face f) {
  switch (f) {
    case Face::XMin: return "x-";
    case Face::XMax: return "x+";
    case Face::YMin: return "y-";
    case Face::YMax: return "y+";
    case Face::ZMin: return "z-";
    case Face::ZMax: return "z+";
  }
  return "?";
}

Face parse_face(const std::string& tok) {
  static const std::map<std::string, Face> table = {
      {"x-", Face::XMin}, {"x+", Face::XMax}, {"y-", Face::YMin},
      {"y+", Face::YMax}, {"z-", Face::ZMin}, {"z+", Face::ZMax}};
  const auto it = table.find(tok);
  if (it == table.end()) throw ParseError("unknown face '" + tok + "'");
  return it->second;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap read_sections(const std::string& text) {
  SectionMap sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ParseError("line " + std::to_string(lineno) + ": key outside a section");
    sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(const SectionMap& map, const std::string& name) : name_(name) {
    const auto it = map.find(name);
    if (it != map.end()) kv_ = &it->second;
  }

  bool has(const std::string& key) const {
    return kv_ && kv_->count(key) > 0;
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return kv_->at(key);
  }
  std::string require(const std::string& key) const {
    if (!has(key))
      throw ParseError("section [" + name_ + "]: missing key '" + key + "'");
    return kv_->at(key);
  }
  double num(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    try {
      return std::stod(kv_->at(key));
    } catch (const std::exception&) {
      throw ParseError("section [" + name_ + "]: bad number for '" + key + "'");
    }
  }
  long integer(const std::string& key, long fallback) const {
    return std::lround(num(key, double(fallback)));
  }
  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = kv_->at(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError("section [" + name_ + "]: bad boolean for '" + key + "'");
  }
  Expr expr(const std::string& key, const std::string& fallback) const {
    return Expr::parse(str(key, fallback));
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* kv_ = nullptr;
};

const std::array<const char*, 6> tensor_suffix = {"11", "22", "33",
                                                  "12", "13", "23"};

}  // namespace

Grid Scenario::make_grid() const {
  return Grid(nx, ny, nz, hx, hy, hz, dirichlet_faces, homogeneous);
}

ThresholdField Scenario::make_threshold() const {
  ThresholdField f;
  f.c1 = c1;
  f.c2 = c2;
  f.tag = threshold_tag;
  switch (threshold_kind) {
    case ThresholdKind::Constant: {
      const double v = threshold_value;
      f.g = [v](double, double, double, double) { return v; };
      f.dgdt = [](double, double, double, double) { return 0.0; };
      break;
    }
    case ThresholdKind::Expression: {
      const Expr e = threshold_expr;
      f.g = [e](double t, double x1, double x2, double x3) {
        return e.eval(t, x1, x2, x3);
      };
      if (has_threshold_derivative) {
        const Expr d = threshold_derivative;
        f.dgdt = [d](double t, double x1, double x2, double x3) {
          return d.eval(t, x1, x2, x3);
        };
      }
      break;
    }
    case ThresholdKind::Table: {
      const std::string text = read_text_file(threshold_table);
      auto pl = std::make_shared<PiecewiseLinear>();
      std::istringstream in(text);
      std::string line;
      while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || !std::isdigit((unsigned char)line[0])) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
          throw ParseError("threshold table '" + threshold_table +
                           "': expected t,value rows");
        pl->t.push_back(std::stod(line.substr(0, comma)));
        pl->v.push_back(std::stod(line.substr(comma + 1)));
      }
      if (pl->t.size() < 2)
        throw ParseError("threshold table '" + threshold_table +
                         "': need at least two samples");
      f.g = [pl](double t, double, double, double) { return (*pl)(t); };
      f.dgdt = [pl](double t, double, double, double) { return pl->slope(t); };
      break;
    }
  }
  if (threshold_tag == Regularity::Continuous) f.dgdt = nullptr;
  return f;
}

ShiftField Scenario::make_shift() const {
  if (shift_kind == ShiftKind::Zero) {
    ShiftField f = ShiftField::zero();
    f.h1_in_V = shift_h1_in_V;
    return f;
  }
  ShiftField f;
  f.h1_in_V = shift_h1_in_V;
  const std::array<Expr, 6> exprs = shift_exprs;
  f.value = [exprs](double t, double x1, double x2, double x3) {
    SymTensor3 s;
    for (int c = 0; c < 6; ++c) s[c] = exprs[c].eval(t, x1, x2, x3);
    return s;
  };
  if (has_shift_derivative) {
    const std::array<Expr, 6> dexprs = shift_derivatives;
    f.derivative = [dexprs](double t, double x1, double x2, double x3) {
      SymTensor3 s;
      for (int c = 0; c < 6; ++c) s[c] = dexprs[c].eval(t, x1, x2, x3);
      return s;
    };
  } else {
    // expressions constant in t get a zero derivative for free
    bool constant = true;
    for (const Expr& e : exprs) {
      double v;
      constant = constant && e.is_constant(&v);
    }
    if (constant)
      f.derivative = [](double, double, double, double) { return SymTensor3{}; };
  }
  return f;
}

VectorField Scenario::make_v0(const Grid& g) const {
  if (!v0_file.empty()) return load_vector_field_csv(g, v0_file);
  const std::array<Expr, 3> exprs = v0_exprs;
  return VectorField(g, [&exprs](double x1, double x2, double x3) {
    return Vec3{exprs[0].eval(0.0, x1, x2, x3), exprs[1].eval(0.0, x1, x2, x3),
                exprs[2].eval(0.0, x1, x2, x3)};
  });
}

TensorField Scenario::make_sigma0(const Grid& g) const {
  if (!sigma0_file.empty()) return load_tensor_field_csv(g, sigma0_file);
  const std::array<Expr, 6> exprs = sigma0_exprs;
  return TensorField(g, [&exprs](double x1, double x2, double x3) {
    SymTensor3 s;
    for (int c = 0; c < 6; ++c) s[c] = exprs[c].eval(0.0, x1, x2, x3);
    return s;
  });
}

std::vector<std::string> Scenario::validate() const {
  std::vector<std::string> bad;

  // structural parameters first; field checks need a valid grid
  try {
    make_grid();
  } catch (const Error& e) {
    bad.push_back(std::string("domain: ") + e.what());
    return bad;
  }
  const Grid grid = make_grid();

  if (!(dt > 0.0) || !(T > 0.0)) bad.push_back("time: horizon and dt must be positive");
  else {
    const double steps = T / dt;
    if (std::abs(steps - std::round(steps)) > 1e-8 * std::max(1.0, steps))
      bad.push_back("time: dt must divide the horizon");
  }
  if (!(nu > 0.0) || nu > 1.0)
    bad.push_back("physics: nu must lie in (0,1]");
  if (regime == Regime::Regularized) {
    if (!(kappa > 0.0) || kappa > 1.0)
      bad.push_back("physics: regularized regime needs kappa in (0,1]");
  } else if (kappa != 0.0) {
    bad.push_back("physics: sweeping regime runs with kappa = 0");
  }
  if (!(safety > 0.0) || !(safety < 1.0))
    bad.push_back("solver: safety must lie strictly in (0,1)");
  if (!(lambda > 0.0)) bad.push_back("physics: lambda must be positive");

  // (A5) threshold bounds, and (A4) regularity bookkeeping
  ThresholdField threshold;
  try {
    threshold = make_threshold();
    validate_threshold(threshold, grid, 0.0, T, 33);
  } catch (const Error& e) {
    bad.push_back(std::string("(A5): ") + e.what());
  }
  if (regime == Regime::Sweeping && threshold_tag == Regularity::Continuous)
    bad.push_back(
        "(A4): the sweeping regime requires an H1-in-time threshold; a merely "
        "continuous g is only admissible in the regularized regime");
  if (threshold_tag == Regularity::H1InTime && threshold.g && !threshold.dgdt)
    bad.push_back("(A4): threshold tagged H1-in-time but no derivative given");

  // (A3)/(A3') shift regularity
  if (regime == Regime::Regularized && !shift_h1_in_V)
    bad.push_back(
        "(A3): the regularized regime needs sigma* in H1(0,T;V); got the "
        "weaker H1(0,T;H) tag");
  ShiftField shift = make_shift();
  for (double t : {0.0, 0.5 * T, T}) {
    const TensorField st = shift.materialize(grid, t);
    const double n = shift_h1_in_V ? norm_hdiv(st) : norm_l2(st);
    if (!std::isfinite(n)) {
      bad.push_back("(A3): sigma* norm not finite at t=" + std::to_string(t));
      break;
    }
  }

  // (A1) data evaluable and finite on a sample lattice
  {
    bool ok = true;
    for (int it = 0; it <= 4 && ok; ++it) {
      const double t = T * double(it) / 4.0;
      for (int c = 0; c < 3 && ok; ++c)
        ok = std::isfinite(f_exprs[c].eval(t, hx, hy, hz));
      for (int c = 0; c < 6 && ok; ++c)
        ok = std::isfinite(h_exprs[c].eval(t, hx, hy, hz));
    }
    if (!ok) bad.push_back("(A1): f or h not finite on sample points");
  }

  // (A2) initial data
  try {
    const VectorField v0 = make_v0(grid);
    if (!std::isfinite(norm_grad(v0)))
      bad.push_back("(A2): v0 has no finite V-norm");
    const TensorField s0 = make_sigma0(grid);
    if (!std::isfinite(norm_hdiv(s0)))
      bad.push_back("(A2): sigma0 has no finite V-norm");
    else if (threshold.g) {
      const ConstraintSet cs(threshold, shift, grid, membership_tol);
      const auto m = cs.membership(s0, 0.0, membership_tol);
      if (!m.feasible) {
        std::ostringstream os;
        os << "(A2): sigma0 violates K(0) by " << m.max_violation
           << " (pass --project-initial to project it)";
        bad.push_back(os.str());
      }
    }
  } catch (const Error& e) {
    bad.push_back(std::string("(A2): ") + e.what());
  }

  return bad;
}

CoupledProblem Scenario::make_problem(bool project_initial) const {
  std::vector<std::string> bad = validate();
  if (project_initial) {
    // drop the (A2) feasibility complaint; the projection repairs it
    bad.erase(std::remove_if(bad.begin(), bad.end(),
                             [](const std::string& s) {
                               return s.find("violates K(0)") != std::string::npos;
                             }),
              bad.end());
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "scenario violates assumptions:";
    for (const auto& b : bad) os << "\n  - " << b;
    throw AssumptionViolation(os.str());
  }

  CoupledProblem pb;
  pb.grid = make_grid();
  pb.constraint = ConstraintSet(make_threshold(), make_shift(), pb.grid,
                                membership_tol);
  const std::array<Expr, 3> f_local = f_exprs;
  const Grid grid = pb.grid;
  pb.f = [f_local, grid](double t) {
    return VectorField(grid, [&](double x1, double x2, double x3) {
      return Vec3{f_local[0].eval(t, x1, x2, x3), f_local[1].eval(t, x1, x2, x3),
                  f_local[2].eval(t, x1, x2, x3)};
    });
  };
  const std::array<Expr, 6> h_local = h_exprs;
  pb.h = [h_local, grid](double t) {
    return TensorField(grid, [&](double x1, double x2, double x3) {
      SymTensor3 s;
      for (int c = 0; c < 6; ++c) s[c] = h_local[c].eval(t, x1, x2, x3);
      return s;
    });
  };
  pb.v0 = make_v0(pb.grid);
  pb.sigma0 = make_sigma0(pb.grid);
  if (project_initial) pb.sigma0 = pb.constraint.project(pb.sigma0, 0.0);
  pb.regime = regime;
  pb.coupling = coupling;
  pb.kappa = regime == Regime::Regularized ? kappa : 0.0;
  pb.nu = nu;
  pb.dt = dt;
  pb.T = T;
  pb.safety = safety;
  pb.picard_tol = picard_tol;
  pb.picard_max_iters = picard_max_iters;
  pb.prox_tol = prox_tol;
  pb.prox_max_iters = prox_max_iters;
  pb.linear_tol = linear_tol;
  pb.linear_max_iters = linear_max_iters;
  pb.membership_tol = membership_tol;
  return pb;
}

Scenario parse_scenario_string(const std::string& text) {
  const SectionMap sections = read_sections(text);
  Scenario s;

  {
    SectionReader r(sections, "domain");
    s.nx = int(r.integer("nx", s.nx));
    s.ny = int(r.integer("ny", s.ny));
    s.nz = int(r.integer("nz", s.nz));
    s.hx = r.num("hx", s.hx);
    s.hy = r.num("hy", s.hy);
    s.hz = r.num("hz", s.hz);
    s.homogeneous = r.flag("homogeneous", false);
    if (r.has("dirichlet")) {
      s.dirichlet_faces.clear();
      std::istringstream fs(r.str("dirichlet", ""));
      std::string tok;
      while (fs >> tok) s.dirichlet_faces.push_back(parse_face(tok));
    } else if (s.homogeneous) {
      s.dirichlet_faces.clear();
    }
  }
  {
    SectionReader r(sections, "time");
    s.T = r.num("horizon", s.T);
    s.dt = r.num("dt", s.dt);
  }
  {
    SectionReader r(sections, "physics");
    const std::string reg = r.str("regime", "regularized");
    if (reg == "regularized") s.regime = Regime::Regularized;
    else if (reg == "sweeping") s.regime = Regime::Sweeping;
    else throw ParseError("physics: unknown regime '" + reg + "'");
    const std::string cpl = r.str("coupling", "picard");
    if (cpl == "picard") s.coupling = Coupling::Picard;
    else if (cpl == "staggered") s.coupling = Coupling::Staggered;
    else throw ParseError("physics: unknown coupling '" + cpl + "'");
    s.kappa = r.num("kappa", s.regime == Regime::Regularized ? 1.0 : 0.0);
    s.nu = r.num("nu", s.nu);
    s.lambda = r.num("lambda", s.lambda);
  }
  {
    SectionReader r(sections, "threshold");
    const std::string kind = r.str("kind", "constant");
    if (kind == "constant") {
      s.threshold_kind = Scenario::ThresholdKind::Constant;
      s.threshold_value = r.num("value", 1.0);
    } else if (kind == "expression") {
      s.threshold_kind = Scenario::ThresholdKind::Expression;
      s.threshold_expr = Expr::parse(r.require("expr"));
      if (r.has("derivative")) {
        s.threshold_derivative = Expr::parse(r.require("derivative"));
        s.has_threshold_derivative = true;
      }
    } else if (kind == "table") {
      s.threshold_kind = Scenario::ThresholdKind::Table;
      s.threshold_table = r.require("table");
    } else {
      throw ParseError("threshold: unknown kind '" + kind + "'");
    }
    s.c1 = r.num("c1", s.threshold_kind == Scenario::ThresholdKind::Constant
                           ? s.threshold_value
                           : 1.0);
    s.c2 = r.num("c2", s.threshold_kind == Scenario::ThresholdKind::Constant
                           ? s.threshold_value
                           : 1.0);
    const std::string tag = r.str("tag", "h1");
    if (tag == "h1") s.threshold_tag = Regularity::H1InTime;
    else if (tag == "continuous") s.threshold_tag = Regularity::Continuous;
    else throw ParseError("threshold: unknown tag '" + tag + "'");
  }
  {
    SectionReader r(sections, "shift");
    const std::string kind = r.str("kind", "zero");
    if (kind == "zero") {
      s.shift_kind = Scenario::ShiftKind::Zero;
    } else if (kind == "expression") {
      s.shift_kind = Scenario::ShiftKind::Expression;
      for (int c = 0; c < 6; ++c)
        s.shift_exprs[c] =
            r.expr(std::string("s") + tensor_suffix[c], "0");
      s.has_shift_derivative = r.has("d11") || r.has("d22") || r.has("d33") ||
                               r.has("d12") || r.has("d13") || r.has("d23");
      if (s.has_shift_derivative)
        for (int c = 0; c < 6; ++c)
          s.shift_derivatives[c] =
              r.expr(std::string("d") + tensor_suffix[c], "0");
    } else {
      throw ParseError("shift: unknown kind '" + kind + "'");
    }
    const std::string tag = r.str("tag", "h1v");
    if (tag == "h1v") s.shift_h1_in_V = true;
    else if (tag == "h1h") s.shift_h1_in_V = false;
    else throw ParseError("shift: unknown tag '" + tag + "'");
  }
  {
    SectionReader r(sections, "data");
    for (int c = 0; c < 3; ++c)
      s.f_exprs[c] = r.expr(std::string("f") + std::to_string(c + 1), "0");
    for (int c = 0; c < 6; ++c)
      s.h_exprs[c] = r.expr(std::string("h") + tensor_suffix[c], "0");
  }
  {
    SectionReader r(sections, "initial");
    for (int c = 0; c < 3; ++c)
      s.v0_exprs[c] = r.expr(std::string("v") + std::to_string(c + 1), "0");
    for (int c = 0; c < 6; ++c)
      s.sigma0_exprs[c] =
          r.expr(std::string("sigma") + tensor_suffix[c], "0");
    s.v0_file = r.str("v_file", "");
    s.sigma0_file = r.str("sigma_file", "");
  }
  {
    SectionReader r(sections, "solver");
    s.picard_tol = r.num("picard_tol", s.picard_tol);
    s.picard_max_iters = int(r.integer("picard_max_iters", s.picard_max_iters));
    s.prox_tol = r.num("prox_tol", s.prox_tol);
    s.prox_max_iters = int(r.integer("prox_max_iters", s.prox_max_iters));
    s.linear_tol = r.num("linear_tol", s.linear_tol);
    s.linear_max_iters = int(r.integer("linear_max_iters", s.linear_max_iters));
    s.safety = r.num("safety", s.safety);
    s.membership_tol = r.num("membership_tol", s.membership_tol);
  }
  {
    SectionReader r(sections, "output");
    s.out_dir = r.str("directory", s.out_dir);
    s.cadence = int(r.integer("cadence", s.cadence));
    s.snapshots = r.str("snapshots", s.snapshots);
    s.seed = (unsigned long long)r.integer("seed", long(s.seed));
  }
  return s;
}

Scenario parse_scenario(const std::string& path) {
  return parse_scenario_string(read_text_file(path));
}

std::string write_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "[domain]\n";
  os << "nx = " << s.nx << "\nny = " << s.ny << "\nnz = " << s.nz << "\n";
  os << "hx = " << format_double(s.hx) << "\nhy = " << format_double(s.hy)
     << "\nhz = " << format_double(s.hz) << "\n";
  if (!s.dirichlet_faces.empty()) {
    os << "dirichlet =";
    for (Face f : s.dirichlet_faces) os << ' ' << face_token(f);
    os << "\n";
  }
  os << "homogeneous = " << (s.homogeneous ? "true" : "false") << "\n\n";

  os << "[time]\nhorizon = " << format_double(s.T)
     << "\ndt = " << format_double(s.dt) << "\n\n";

  os << "[physics]\n";
  os << "regime = "
     << (s.regime == Regime::Regularized ? "regularized" : "sweeping") << "\n";
  os << "coupling = "
     << (s.coupling == Coupling::Picard ? "picard" : "staggered") << "\n";
  os << "kappa = " << format_double(s.kappa) << "\nnu = " << format_double(s.nu)
     << "\nlambda = " << format_double(s.lambda) << "\n\n";

  os << "[threshold]\n";
  switch (s.threshold_kind) {
    case Scenario::ThresholdKind::Constant:
      os << "kind = constant\nvalue = " << format_double(s.threshold_value)
         << "\n";
      break;
    case Scenario::ThresholdKind::Expression:
      os << "kind = expression\nexpr = " << s.threshold_expr.source() << "\n";
      if (s.has_threshold_derivative)
        os << "derivative = " << s.threshold_derivative.source() << "\n";
      break;
    case Scenario::ThresholdKind::Table:
      os << "kind = table\ntable = " << s.threshold_table << "\n";
      break;
  }
  os << "c1 = " << format_double(s.c1) << "\nc2 = " << format_double(s.c2)
     << "\n";
  os << "tag = "
     << (s.threshold_tag == Regularity::H1InTime ? "h1" : "continuous")
     << "\n\n";

  os << "[shift]\n";
  if (s.shift_kind == Scenario::ShiftKind::Zero) {
    os << "kind = zero\n";
  } else {
    os << "kind = expression\n";
    for (int c = 0; c < 6; ++c)
      os << "s" << tensor_suffix[c] << " = " << s.shift_exprs[c].source()
         << "\n";
    if (s.has_shift_derivative)
      for (int c = 0; c < 6; ++c)
        os << "d" << tensor_suffix[c] << " = "
           << s.shift_derivatives[c].source() << "\n";
  }
  os << "tag = " << (s.shift_h1_in_V ? "h1v" : "h1h") << "\n\n";

  os << "[data]\n";
  for (int c = 0; c < 3; ++c)
    os << "f" << c + 1 << " = " << s.f_exprs[c].source() << "\n";
  for (int c = 0; c < 6; ++c)
    os << "h" << tensor_suffix[c] << " = " << s.h_exprs[c].source() << "\n";
  os << "\n[initial]\n";
  for (int c = 0; c < 3; ++c)
    os << "v" << c + 1 << " = " << s.v0_exprs[c].source() << "\n";
  for (int c = 0; c < 6; ++c)
    os << "sigma" << tensor_suffix[c] << " = " << s.sigma0_exprs[c].source()
       << "\n";
  if (!s.v0_file.empty()) os << "v_file = " << s.v0_file << "\n";
  if (!s.sigma0_file.empty()) os << "sigma_file = " << s.sigma0_file << "\n";

  os << "\n[solver]\n";
  os << "picard_tol = " << format_double(s.picard_tol) << "\n";
  os << "picard_max_iters = " << s.picard_max_iters << "\n";
  os << "prox_tol = " << format_double(s.prox_tol) << "\n";
  os << "prox_max_iters = " << s.prox_max_iters << "\n";
  os << "linear_tol = " << format_double(s.linear_tol) << "\n";
  os << "linear_max_iters = " << s.linear_max_iters << "\n";
  os << "safety = " << format_double(s.safety) << "\n";
  os << "membership_tol = " << format_double(s.membership_tol) << "\n";

  os << "\n[output]\n";
  os << "directory = " << s.out_dir << "\n";
  os << "cadence = " << s.cadence << "\n";
  os << "snapshots = " << s.snapshots << "\n";
  os << "seed = " << s.seed << "\n";
  return os.str();
}

}  // namespace psweep
