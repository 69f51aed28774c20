// qmono: command-line driver for the verification suites, the Chern quadrature
// and wavepacket evolution.
//
//   qmono verify <algebra|geometry|operators|splitting|gis> [--samples N] [--seed S] ...
//   qmono chern [--radius R] [--n FINEST] [--out table.csv]
//   qmono evolve [--preset free|static|flyby] [--dt DT] [--steps K] [--out traj.csv]
//
// Exit codes: 0 every check within tolerance, 1 a check failed (or the solver
// did), 2 usage error.

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qmono/dynamics.hpp"
#include "qmono/geometry.hpp"
#include "qmono/report.hpp"
#include "qmono/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
  std::optional<int> n;
  std::optional<double> box;
  std::optional<double> tol;
  std::string out;
  bool json = false;
  bool timestamp = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--n", o.n, "lattice points per axis (chern: finest grid)");
  cmd->add_option("--box", o.box, "lattice half-width L");
  cmd->add_option("--tol", o.tol, "tolerance override");
  cmd->add_option("--out", o.out, "output file");
  cmd->add_flag("--json", o.json, "print the JSON report on stdout instead of text");
  cmd->add_flag("--timestamp", o.timestamp, "add a timestamp field to JSON output");
}

int finish(const qmono::Report& report, const CommonOptions& o, const std::string& json_path) {
  const std::string json = report.to_json(o.timestamp).dump(2);
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    if (!f) throw qmono::usage_error("cannot write " + json_path);
    f << json << "\n";
  }
  if (o.json) {
    std::cout << json << "\n";
  } else {
    std::cout << report.to_text();
    if (const auto* w = report.worst_failure())
      std::cout << "FAIL: worst offender '" << w->name << "'" << (w->worst.empty() ? "" : " at " + w->worst) << "\n";
    else
      std::cout << (report.passed() ? "PASS\n" : "FAIL\n");
  }
  return report.passed() ? kExitPass : kExitFail;
}

qmono::Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternionic monopole quantization: identity checks and dynamics"};
  app.require_subcommand(1);

  // verify
  CommonOptions verify_opts;
  std::string suite;
  std::size_t samples = 10000;
  std::uint64_t seed = 42;
  std::string inject = "none";
  int fields = 20;
  auto* verify = app.add_subcommand("verify", "run a randomized identity suite");
  verify->add_option("suite", suite, "algebra, geometry, operators, splitting or gis")
      ->required()
      ->check(CLI::IsMember(qmono::suite_names()));
  verify->add_option("--samples", samples, "random samples per identity")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "random seed");
  verify->add_option("--fields", fields, "smooth test fields for finite-difference checks")->check(CLI::PositiveNumber);
  verify->add_option("--inject", inject, "deliberate defect: flip-mul or literal-transport")
      ->check(CLI::IsMember({"none", "flip-mul", "literal-transport"}));
  add_common(verify, verify_opts);

  // chern
  CommonOptions chern_opts;
  double radius = 1.0;
  auto* chern = app.add_subcommand("chern", "Chern integral with a refinement table");
  chern->add_option("--radius", radius, "sphere radius")->check(CLI::PositiveNumber);
  add_common(chern, chern_opts);

  // evolve
  CommonOptions evolve_opts;
  std::string preset_name = "free";
  std::optional<double> mass, dt, width;
  std::optional<int> steps;
  std::optional<std::array<double, 3>> center, momentum;
  std::string report_path;
  auto* evolve = app.add_subcommand("evolve", "Cayley evolution of a slice wavepacket with Ehrenfest checks");
  evolve->add_option("--preset", preset_name, "free, static or flyby")
      ->check(CLI::IsMember({"free", "static", "flyby"}));
  evolve->add_option("--mass", mass, "particle mass");
  evolve->add_option("--dt", dt, "time step");
  evolve->add_option("--steps", steps, "number of steps");
  evolve->add_option("--width", width, "packet width");
  evolve->add_option("--center", center, "packet center x1 x2 x3")->expected(3);
  evolve->add_option("--momentum", momentum, "kick momentum p1 p2 p3")->expected(3);
  evolve->add_option("--report", report_path, "write the JSON Ehrenfest report here");
  add_common(evolve, evolve_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (verify->parsed()) {
      qmono::SuiteConfig cfg;
      cfg.samples = samples;
      cfg.seed = seed;
      cfg.fields = fields;
      cfg.fault = qmono::parse_fault(inject);
      if (verify_opts.n) cfg.lattice.n = *verify_opts.n;
      if (verify_opts.box) cfg.lattice.half_width = *verify_opts.box;
      if (verify_opts.tol) cfg.tol = *verify_opts.tol;
      cfg.lattice.validate();
      return finish(qmono::run_suite(suite, cfg), verify_opts, verify_opts.out);
    }

    if (chern->parsed()) {
      const int finest = chern_opts.n.value_or(256);
      const double tol = chern_opts.tol.value_or(1e-6);
      if (finest < 16) throw qmono::usage_error("chern: --n must be at least 16");
      std::ostringstream table;
      table << "n_theta,n_phi,value,error,ratio\n";
      std::cout << std::setw(6) << "n" << std::setw(24) << "value" << std::setw(14) << "error" << std::setw(10)
                << "ratio\n";
      double prev_error = 0.0;
      double order_dev = 0.0;
      double final_error = 0.0;
      for (int n = 16; n <= finest; n *= 2) {
        const double value = qmono::chern(n, n, radius);
        const double error = value - 2.0 * std::numbers::pi;
        const double ratio = prev_error != 0.0 ? prev_error / error : 0.0;
        // Ratios are only meaningful above the rounding floor.
        if (prev_error != 0.0 && std::abs(error) > 1e-12) order_dev = std::max(order_dev, std::abs(ratio - 16.0));
        const std::string ratio_text = prev_error != 0.0 ? std::to_string(ratio) : "";
        table << n << ',' << n << ',' << std::setprecision(17) << value << ',' << error << ',' << ratio_text << '\n';
        std::cout << std::setw(6) << n << std::setw(24) << std::setprecision(17) << value << std::setw(14)
                  << std::setprecision(3) << std::scientific << error << std::defaultfloat << std::setw(10)
                  << std::setprecision(4);
        if (prev_error != 0.0)
          std::cout << ratio << "\n";
        else
          std::cout << "-" << "\n";
        prev_error = error;
        final_error = std::abs(error);
      }
      if (!chern_opts.out.empty()) {
        std::ofstream f(chern_opts.out);
        if (!f) throw qmono::usage_error("cannot write " + chern_opts.out);
        f << table.str();
      }
      qmono::Report report;
      report.suite = "chern";
      report.n_samples = 1;
      report.checks.push_back(qmono::Check::single("Chern integral at the finest grid", "-∫ κ over S² = 2π",
                                                   final_error, tol, std::to_string(finest) + " x " + std::to_string(finest)));
      report.checks.push_back(qmono::Check::single("refinement ratio, fourth order", "e(n)/e(2n) = 16", order_dev, 2.0));
      return finish(report, chern_opts, "");
    }

    if (evolve->parsed()) {
      qmono::EvolutionConfig cfg = qmono::preset(preset_name);
      if (mass) cfg.mass = *mass;
      if (dt) cfg.dt = *dt;
      if (steps) cfg.steps = *steps;
      if (width) cfg.packet.width = *width;
      if (center) cfg.packet.center = to_vec(*center);
      if (momentum) cfg.packet.momentum = to_vec(*momentum);
      if (evolve_opts.n) cfg.lattice.n = *evolve_opts.n;
      if (evolve_opts.box) cfg.lattice.half_width = *evolve_opts.box;
      cfg.validate();
      const qmono::EvolutionResult result = qmono::evolve(cfg);
      if (!evolve_opts.out.empty()) {
        std::ofstream f(evolve_opts.out);
        if (!f) throw qmono::usage_error("cannot write " + evolve_opts.out);
        qmono::write_csv(f, result.trajectory);
      }
      qmono::EhrenfestTolerances tol;
      if (evolve_opts.tol) tol.velocity = *evolve_opts.tol;
      qmono::Report report = qmono::ehrenfest(result.trajectory, tol);
      report.suite = "evolve/" + preset_name;
      return finish(report, evolve_opts, report_path);
    }
  } catch (const qmono::usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qmono::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qmono::solver_error& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
