#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "lantern/cli.hpp"

// Command-line front end. Every subcommand emits one CSV file per run
// (default stdout) with fixed %.17g formatting and fixed row order, so
// identical configurations produce byte-identical output.

namespace {

struct OutputTarget {
  std::string path;  // empty: stdout

  int run(const std::function<int(std::ostream&)>& fn) {
    if (path.empty()) return fn(std::cout);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      std::cerr << "cannot open output file '" << path << "'\n";
      return lantern::cli::kConfigError;
    }
    return fn(f);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tangent-bivector and surface-area estimators from inscribed triangles"};
  app.require_subcommand(1);

  lantern::cli::TangentConfig tangent;
  lantern::cli::AreaConfig area;
  lantern::cli::JacobianConfig jacobian;
  lantern::cli::ValidateConfig validate;
  lantern::cli::DemoConfig demo;
  OutputTarget tangent_out, area_out, jacobian_out, validate_out, demo_out;
  std::string tangent_at = "0,0", jacobian_at = "0,0";

  auto* t = app.add_subcommand("tangent", "Naive vs balanced mean bivectors at a point");
  t->add_option("--surface", tangent.surface, "Surface spec, e.g. cylinder(rho=1)");
  t->add_option("--schwarz", tangent.schwarz_regime, "Local triangle regime: n=m, n=m^2, n=m^3");
  t->add_option("--m", tangent.m_range, "Doubling schedule a:b for m (default 4:256)");
  t->add_option("--shrink", tangent.shrink_levels, "Shrinking-triangle levels (non-schwarz mode)");
  t->add_option("--at", tangent_at, "Evaluation point x,y (non-schwarz mode)");
  t->add_flag("--relaxed", tangent.relaxed, "Accept unbalanced vertices within --kappa");
  t->add_option("--kappa", tangent.kappa, "Relaxed-mode bound (default 4)");
  t->add_option("--out", tangent_out.path, "Output CSV path (default stdout)");

  auto* a = app.add_subcommand("area", "Balanced vs naive area estimates");
  a->add_option("--surface", area.surface, "Surface spec");
  a->add_option("--polygon", area.polygon, "Polygon x0,y0;x1,y1;... (counterclockwise)");
  a->add_option("--refine", area.refine, "Midpoint refinement levels (default 4)");
  a->add_option("--lantern", area.lantern, "Lantern spec m=...,n=...[,height=...]");
  a->add_flag("--relaxed", area.relaxed, "Accept unbalanced vertices within --kappa");
  a->add_option("--kappa", area.kappa, "Relaxed-mode bound (default 4)");
  a->add_option("--threads", area.threads, "Worker threads (output bytes unchanged)");
  a->add_option("--rtol", area.rtol, "Oracle quadrature relative tolerance");
  a->add_option("--out", area_out.path, "Output CSV path");

  auto* j = app.add_subcommand("jacobian", "Jacobian determinant from shrinking triangles");
  j->add_option("--transform", jacobian.transform, "identity or custom(<expr>,<expr>)");
  j->add_option("--at", jacobian_at, "Evaluation point x,y");
  j->add_option("--shrink", jacobian.shrink_levels, "Shrinking-triangle levels");
  j->add_option("--which", jacobian.which, "Mirror vertex: A, B, C, or auto (diameter vertex)");
  j->add_flag("--relaxed", jacobian.relaxed, "Accept unbalanced vertices within --kappa");
  j->add_option("--kappa", jacobian.kappa, "Relaxed-mode bound");
  j->add_option("--out", jacobian_out.path, "Output CSV path");

  auto* v = app.add_subcommand("validate", "Partition checks (area, orientation, balance)");
  v->add_option("--polygon", validate.polygon, "Polygon to triangulate and check");
  v->add_option("--refine", validate.refine, "Midpoint refinement levels");
  v->add_option("--lantern", validate.lantern, "Lantern spec m=...,n=...[,height=...]");
  v->add_option("--partition-csv", validate.partition_csv, "Check a partition from CSV");
  v->add_option("--emit-partition", validate.emit_partition, "Write the partition CSV here");
  v->add_option("--out", validate_out.path, "Report path (default stdout)");

  auto* d = app.add_subcommand("schwarz-demo", "Reproduce the cylinder experiment tables");
  d->add_option("--threads", demo.threads, "Worker threads (output bytes unchanged)");
  d->add_option("--out", demo_out.path, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return lantern::cli::kConfigError;
  }

  try {
    tangent.at = lantern::cli::parse_point(tangent_at);
    jacobian.at = lantern::cli::parse_point(jacobian_at);
  } catch (const lantern::cli::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return lantern::cli::kConfigError;
  }

  if (t->parsed())
    return tangent_out.run(
        [&](std::ostream& out) { return lantern::cli::cmd_tangent(tangent, out, std::cerr); });
  if (a->parsed())
    return area_out.run(
        [&](std::ostream& out) { return lantern::cli::cmd_area(area, out, std::cerr); });
  if (j->parsed())
    return jacobian_out.run(
        [&](std::ostream& out) { return lantern::cli::cmd_jacobian(jacobian, out, std::cerr); });
  if (v->parsed())
    return validate_out.run(
        [&](std::ostream& out) { return lantern::cli::cmd_validate(validate, out, std::cerr); });
  return demo_out.run(
      [&](std::ostream& out) { return lantern::cli::cmd_schwarz_demo(demo, out, std::cerr); });
}
