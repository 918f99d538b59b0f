#pragma once
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lantern/estimators.hpp"
#include "lantern/table.hpp"

namespace lantern::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 2;
inline constexpr int kNumericalError = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- small spec parsers --------------------------------------------------

// "a:b" doubling schedule (4:256 -> 4 8 16 32 64 128 256), or a single value.
inline std::vector<int> parse_doubling(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const int v = std::stoi(s);
      if (v < 1) throw ConfigError("schedule values must be >= 1");
      return {v};
    }
    const int lo = std::stoi(s.substr(0, colon));
    const int hi = std::stoi(s.substr(colon + 1));
    if (lo < 1 || hi < lo) throw ConfigError("bad schedule range '" + s + "'");
    std::vector<int> out;
    for (long long v = lo; v <= hi; v *= 2) out.push_back(int(v));
    return out;
  } catch (const std::invalid_argument&) {
    throw ConfigError("bad schedule '" + s + "'");
  }
}

// Schwarz regimes n = m, n = m^2, n = m^3.
inline int schwarz_rows(const std::string& regime, int m) {
  if (regime == "n=m") return m;
  if (regime == "n=m^2") return m * m;
  if (regime == "n=m^3") {
    const long long n = (long long)m * m * m;
    if (n > 1 << 30) throw ConfigError("n = m^3 too large at m = " + std::to_string(m));
    return int(n);
  }
  throw ConfigError("unknown schwarz regime '" + regime + "' (use n=m, n=m^2, n=m^3)");
}

inline Point2 parse_point(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("point must be 'x,y', got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad point '" + s + "'");
  }
}

// "x0,y0;x1,y1;..." counterclockwise.
inline Polygon2 parse_polygon(const std::string& s) {
  Polygon2 p;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';'))
    if (!part.empty()) p.vertices.push_back(parse_point(part));
  if (p.vertices.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
  return p;
}

struct LanternSpec {
  std::vector<int> ms;
  std::string n_rule;  // "m", "m^2", "m^3", or a literal integer
  double height = 1.0;

  int n_for(int m) const {
    if (n_rule == "m") return m;
    if (n_rule == "m^2") return m * m;
    if (n_rule == "m^3") {
      const long long n = (long long)m * m * m;
      if (n > 1 << 30) throw ConfigError("lantern n too large");
      return int(n);
    }
    return std::stoi(n_rule);
  }
};

// "m=<int|a:b>,n=<int|m|m^2|m^3>[,height=<float>]".
inline LanternSpec parse_lantern(const std::string& s) {
  LanternSpec spec;
  std::stringstream ss(s);
  std::string part;
  bool have_m = false, have_n = false;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("bad lantern spec item '" + part + "'");
    const std::string key = part.substr(0, eq);
    const std::string val = part.substr(eq + 1);
    if (key == "m") {
      spec.ms = parse_doubling(val);
      have_m = true;
    } else if (key == "n") {
      if (val != "m" && val != "m^2" && val != "m^3") (void)std::stoi(val);  // must be an int
      spec.n_rule = val;
      have_n = true;
    } else if (key == "height") {
      spec.height = std::stod(val);
    } else {
      throw ConfigError("unknown lantern key '" + key + "'");
    }
  }
  if (!have_m || !have_n) throw ConfigError("lantern spec needs m=... and n=...");
  return spec;
}

// --- subcommand configs ---------------------------------------------------

struct TangentConfig {
  std::string surface = "cylinder(rho=1)";
  std::string schwarz_regime;  // empty: shrink mode
  std::string m_range = "4:256";
  int shrink_levels = 8;
  Point2 at{0.0, 0.0};
  bool relaxed = false;
  double kappa = 4.0;
};

struct AreaConfig {
  std::string surface = "cylinder(rho=1)";
  std::string polygon;   // polygon mode
  int refine = 4;
  std::string lantern;   // lantern mode, wins when set
  bool relaxed = false;
  double kappa = 4.0;
  int threads = 1;
  double rtol = 1e-8;
};

struct JacobianConfig {
  std::string transform = "identity";
  Point2 at{0.0, 0.0};
  int shrink_levels = 8;
  std::string which = "auto";
  bool relaxed = false;
  double kappa = 4.0;
};

struct ValidateConfig {
  std::string polygon;
  int refine = 0;
  std::string lantern;
  std::string partition_csv;   // read an existing partition instead
  std::string emit_partition;  // write the generated partition here
};

struct DemoConfig {
  int threads = 1;
};

namespace detail {

// "auto" defers to balanced_vertex_choice per triangle.
inline std::optional<VertexId> parse_vertex(const std::string& s) {
  if (s == "auto") return std::nullopt;
  if (s == "A") return VertexId::A;
  if (s == "B") return VertexId::B;
  if (s == "C") return VertexId::C;
  throw ConfigError("vertex must be A, B, C, or auto, got '" + s + "'");
}

inline void bivector_fields(CsvWriter& w, const ga::Multivector& b) {
  w.field(b[3]).field(b[5]).field(b[6]);  // e12, e13, e23
}

// Fixed obtuse scalene shape scaled around p, counterclockwise. Scalene so
// the generic first-order remainder shows (isosceles vertices hide it
// behind symmetric cancellation); obtuse so A and C exercise the
// unbalanced-vertex error path while B, the diameter vertex, is balanced.
inline OrientedTriangle2 shrinking_triangle_at(Point2 p, double scale) {
  return {{p.x + 0.95 * scale, p.y},
          {p.x + 0.30 * scale, p.y + 0.24 * scale},
          {p.x - 1.05 * scale, p.y}};
}

inline double err_norm(const ga::Multivector& est, const ga::Multivector& ref) {
  return ga::norm(est - ref);
}

}  // namespace detail

// --- subcommands ------------------------------------------------------------

// Naive and balanced mean bivectors against the analytic tangent bivector,
// either over the local Schwarz families or over a shrinking triangle
// family at a point.
inline int cmd_tangent(const TangentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Surface s = parse_surface(cfg.surface);
    EstimatorOptions opt;
    opt.relaxed = cfg.relaxed;
    opt.kappa = cfg.kappa;
    CsvWriter w(out);

    if (!cfg.schwarz_regime.empty()) {
      const Point2 at{0.0, 0.0};
      const auto exact = tangent_bivector(s, at);
      w.row({"m", "n", "naive_e12", "naive_e13", "naive_e23", "balanced_e12", "balanced_e13",
             "balanced_e23", "exact_e12", "exact_e13", "exact_e23", "naive_err",
             "balanced_err"});
      for (int m : parse_doubling(cfg.m_range)) {
        const int n = schwarz_rows(cfg.schwarz_regime, m);
        const auto t = schwarz_local_triangle(m, n);
        const auto naive = mean_bivector_naive(s, t);
        const auto balanced = balanced_mean_bivector(s, t, VertexId::A, opt).value;
        w.field(m).field(n);
        detail::bivector_fields(w, naive);
        detail::bivector_fields(w, balanced);
        detail::bivector_fields(w, exact);
        w.field(detail::err_norm(naive, exact)).field(detail::err_norm(balanced, exact));
        w.endrow();
      }
      return kOk;
    }

    const auto exact = tangent_bivector(s, cfg.at);
    w.row({"level", "diam", "naive_e12", "naive_e13", "naive_e23", "balanced_e12",
           "balanced_e13", "balanced_e23", "exact_e12", "exact_e13", "exact_e23", "naive_err",
           "balanced_err"});
    for (int k = 0; k < cfg.shrink_levels; ++k) {
      const double r = 0.5 * std::pow(0.5, k);
      const auto t = detail::shrinking_triangle_at(cfg.at, r);
      const auto naive = mean_bivector_naive(s, t);
      const auto balanced = balanced_mean_bivector(s, t, balanced_vertex_choice(t), opt).value;
      w.field(k).field(t.diameter());
      detail::bivector_fields(w, naive);
      detail::bivector_fields(w, balanced);
      detail::bivector_fields(w, exact);
      w.field(detail::err_norm(naive, exact)).field(detail::err_norm(balanced, exact));
      w.endrow();
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "tangent: " << e.what() << "\n";
    return kConfigError;
  } catch (const expr::ParseError& e) {
    err << "tangent: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "tangent: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "tangent: " << e.what() << "\n";
    return kNumericalError;
  }
}

// Balanced and naive area estimates against the quadrature oracle over a
// refined polygon partition, or against the lantern closed form.
inline int cmd_area(const AreaConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const Surface s = parse_surface(cfg.surface);
    EstimatorOptions opt;
    opt.relaxed = cfg.relaxed;
    opt.kappa = cfg.kappa;
    opt.threads = cfg.threads;
    CsvWriter w(out);

    if (!cfg.lantern.empty()) {
      const LanternSpec spec = parse_lantern(cfg.lantern);
      // the closed-form column applies when the surface is a cylinder
      std::optional<double> rho;
      const std::string surf = lantern::detail::strip(cfg.surface);
      if (surf.rfind("cylinder", 0) == 0) {
        const auto eq = surf.find("rho=");
        if (eq != std::string::npos) rho = std::stod(surf.substr(eq + 4));
      }
      const Polygon2 rect = rectangle({0.0, 0.0}, {2.0 * M_PI, spec.height});
      const double reference = area_integral_oracle(s, rect, cfg.rtol);
      w.row({"m", "n", "mesh_norm", "balanced", "naive", "lantern_closed_form", "reference",
             "balanced_rel_err", "naive_over_reference"});
      for (int m : spec.ms) {
        const int n = spec.n_for(m);
        const Partition pi = schwarz_lantern_partition(m, n, spec.height);
        const double balanced = area_estimate_balanced(s, pi, opt);
        const double naive = area_estimate_naive(s, pi, opt);
        w.field(m).field(n).field(pi.mesh_norm).field(balanced).field(naive);
        if (rho)
          w.field(lantern_area_closed_form(*rho, m, n, spec.height));
        else
          w.empty();
        w.field(reference)
            .field(std::abs(balanced - reference) / reference)
            .field(naive / reference);
        w.endrow();
      }
      return kOk;
    }

    if (cfg.polygon.empty()) throw ConfigError("area needs --polygon or --lantern");
    const Polygon2 P = parse_polygon(cfg.polygon);
    const double oracle = area_integral_oracle(s, P, cfg.rtol);
    w.row({"level", "mesh_norm", "balanced", "naive", "oracle", "balanced_abs_err",
           "naive_abs_err", "observed_order"});
    Partition pi = triangulate(P);
    double prev_err = 0.0;
    for (int k = 0; k <= cfg.refine; ++k) {
      if (k > 0) pi = refine_midpoint(pi);
      const double balanced = area_estimate_balanced(s, pi, opt);
      const double naive = area_estimate_naive(s, pi, opt);
      const double berr = std::abs(balanced - oracle);
      w.field(k).field(pi.mesh_norm).field(balanced).field(naive).field(oracle);
      w.field(berr).field(std::abs(naive - oracle));
      if (k > 0 && berr > 0.0 && prev_err > 0.0)
        w.field(std::log2(prev_err / berr));
      else
        w.empty();
      w.endrow();
      prev_err = berr;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "area: " << e.what() << "\n";
    return kConfigError;
  } catch (const expr::ParseError& e) {
    err << "area: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "area: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "area: " << e.what() << "\n";
    return kNumericalError;
  }
}

// Jacobian-determinant estimates over shrinking triangles at a point.
inline int cmd_jacobian(const JacobianConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const PlaneTransform f = parse_transform(cfg.transform);
    const auto which = detail::parse_vertex(cfg.which);
    EstimatorOptions opt;
    opt.relaxed = cfg.relaxed;
    opt.kappa = cfg.kappa;
    const double reference = f.jacobian_det(cfg.at);
    CsvWriter w(out);
    w.row({"level", "diam", "estimate", "reference", "abs_err", "observed_order"});
    double prev_err = 0.0;
    for (int k = 0; k < cfg.shrink_levels; ++k) {
      const double r = 0.5 * std::pow(0.5, k);
      const auto t = detail::shrinking_triangle_at(cfg.at, r);
      const double est = jacobian_estimate(f, t, which.value_or(balanced_vertex_choice(t)), opt);
      const double e = std::abs(est - reference);
      w.field(k).field(t.diameter()).field(est).field(reference).field(e);
      if (k > 0 && e > 0.0 && prev_err > 0.0)
        w.field(std::log2(prev_err / e));
      else
        w.empty();
      w.endrow();
      prev_err = e;
    }
    return kOk;
  } catch (const ConfigError& e) {
    err << "jacobian: " << e.what() << "\n";
    return kConfigError;
  } catch (const expr::ParseError& e) {
    err << "jacobian: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "jacobian: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "jacobian: " << e.what() << "\n";
    return kNumericalError;
  }
}

// Structured partition checks; exit 3 when any check fails.
inline int cmd_validate(const ValidateConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Partition pi;
    Polygon2 P;
    if (!cfg.partition_csv.empty()) {
      std::ifstream in(cfg.partition_csv);
      if (!in) throw ConfigError("cannot open '" + cfg.partition_csv + "'");
      pi = read_partition_csv(in);
      if (cfg.polygon.empty()) throw ConfigError("--partition-csv needs --polygon");
      P = parse_polygon(cfg.polygon);
    } else if (!cfg.lantern.empty()) {
      const LanternSpec spec = parse_lantern(cfg.lantern);
      if (spec.ms.size() != 1) throw ConfigError("validate wants a single lantern m");
      pi = schwarz_lantern_partition(spec.ms[0], spec.n_for(spec.ms[0]), spec.height);
      P = rectangle({0.0, 0.0}, {2.0 * M_PI, spec.height});
    } else if (!cfg.polygon.empty()) {
      P = parse_polygon(cfg.polygon);
      pi = triangulate(P);
      for (int k = 0; k < cfg.refine; ++k) pi = refine_midpoint(pi);
    } else {
      throw ConfigError("validate needs --polygon, --lantern, or --partition-csv");
    }

    if (!cfg.emit_partition.empty()) {
      std::ofstream pf(cfg.emit_partition, std::ios::binary);
      if (!pf) throw ConfigError("cannot write '" + cfg.emit_partition + "'");
      write_partition_csv(pi, pf);
    }

    const ValidationReport r = validate_partition(pi, P);
    out << "triangles: " << pi.triangles.size() << "\n";
    out << "mesh_norm: " << fmt17(pi.mesh_norm) << "\n";
    out << "area: " << (r.area_ok ? "PASS" : "FAIL") << " (sum " << fmt17(r.area_sum)
        << ", polygon " << fmt17(r.polygon_area) << ", rel err " << fmt17(r.area_rel_err)
        << ")\n";
    out << "orientation: " << (r.orientation_ok() ? "PASS" : "FAIL") << " (" << r.flipped
        << " flipped)\n";
    out << "nondegenerate: " << (r.nondegenerate_ok() ? "PASS" : "FAIL") << " ("
        << r.degenerate << " degenerate)\n";
    out << "balanced: " << (r.balanced_ok() ? "PASS" : "FAIL") << " (" << r.unbalanced
        << " without a balanced diameter vertex)\n";
    if (r.overlap_checked)
      out << "overlap: " << (r.overlap_ok() ? "PASS" : "FAIL") << " (" << r.overlapping_pairs
          << " crossing pairs)\n";
    else
      out << "overlap: SKIPPED (pairwise test limited to " << kPairwiseOverlapLimit
          << " triangles; area accounting above covers it)\n";
    out << "result: " << (r.ok() ? "PASS" : "FAIL") << "\n";
    return r.ok() ? kOk : kNumericalError;
  } catch (const ConfigError& e) {
    err << "validate: " << e.what() << "\n";
    return kConfigError;
  } catch (const expr::ParseError& e) {
    err << "validate: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "validate: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "validate: " << e.what() << "\n";
    return kNumericalError;
  }
}

// One-shot reproduction of the cylinder experiments: the three local
// regimes, the non-mirror fourth point, the diverging lanterns, and the
// quarter-cylinder area run. One CSV stream; '#' lines separate tables.
inline int cmd_schwarz_demo(const DemoConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const double rho = 1.0;
    const Surface cyl = make_cylinder(rho);
    EstimatorOptions opt;
    opt.threads = cfg.threads;

    out << "# table: tangent-cylinder\r\n";
    {
      TangentConfig tc;
      std::ostringstream section;
      bool first = true;
      for (const char* regime : {"n=m", "n=m^2", "n=m^3"}) {
        std::ostringstream one;
        tc.schwarz_regime = regime;
        const int rc = cmd_tangent(tc, one, err);
        if (rc != kOk) return rc;
        std::string text = one.str();
        if (!first) text = text.substr(text.find("\r\n") + 2);  // drop repeated header
        else {
          // prepend a regime column header
          section << "regime," << text.substr(0, text.find("\r\n") + 2);
          text = text.substr(text.find("\r\n") + 2);
        }
        // prefix each row with the regime token
        std::size_t pos = 0;
        while (pos < text.size()) {
          const auto nl = text.find("\r\n", pos);
          section << regime << ',' << text.substr(pos, nl - pos) << "\r\n";
          pos = nl + 2;
        }
        first = false;
      }
      out << section.str();
    }

    out << "# table: nonmirror-fourth-point\r\n";
    {
      CsvWriter w(out);
      w.row({"m", "n", "est_e12", "est_e13", "est_e23", "err"});
      const auto exact = tangent_bivector(cyl, {0.0, 0.0});
      for (int m : parse_doubling("4:256")) {
        const int n = m;
        const double y = 1.0 / (2.0 * n);
        const OrientedTriangle2 t{{-M_PI / m, y}, {0.0, 0.0}, {M_PI / m, y}};
        const Point2 d{2.0 * M_PI / m, 0.0};
        const auto est = generalized_balanced_bivector(cyl, t, d);
        w.field(m).field(n);
        detail::bivector_fields(w, est.value);
        w.field(detail::err_norm(est.value, exact));
        w.endrow();
      }
    }

    out << "# table: lantern-areas\r\n";
    {
      AreaConfig ac;
      ac.lantern = "m=4:32,n=m^3,height=1";
      ac.threads = cfg.threads;
      std::ostringstream one;
      const int rc = cmd_area(ac, one, err);
      if (rc != kOk) return rc;
      out << one.str();
    }

    out << "# table: area-cylinder-quarter\r\n";
    {
      AreaConfig ac;
      std::ostringstream poly;
      poly << "0,0;" << fmt17(M_PI / 2) << ",0;" << fmt17(M_PI / 2) << ",1;0,1";
      ac.polygon = poly.str();
      ac.refine = 6;
      ac.threads = cfg.threads;
      std::ostringstream one;
      const int rc = cmd_area(ac, one, err);
      if (rc != kOk) return rc;
      out << one.str();
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "schwarz-demo: " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace lantern::cli
