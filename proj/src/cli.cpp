#include "iceline/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "iceline/analysis.hpp"
#include "iceline/config.hpp"
#include "iceline/errors.hpp"

namespace iceline::cli {

namespace {

using config::RunConfig;
using nlohmann::json;

std::string g17(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

const char* mode_name(filippov::Mode m) {
  switch (m) {
    case filippov::Mode::SlideLower:
      return "slide_lower";
    case filippov::Mode::SlideUpper:
      return "slide_upper";
    case filippov::Mode::Interior:
      break;
  }
  return "interior";
}

const char* kind_name(filippov::EventKind k) {
  switch (k) {
    case filippov::EventKind::BoundaryHit:
      return "boundary_hit";
    case filippov::EventKind::SlidingEntry:
      return "sliding_entry";
    case filippov::EventKind::SlidingExit:
      return "sliding_exit";
    case filippov::EventKind::TangencyCross:
      return "tangency_cross";
    case filippov::EventKind::SectionCross:
      return "section_cross";
  }
  return "unknown";
}

const char* stability_name(Stability s) {
  switch (s) {
    case Stability::Stable:
      return "stable";
    case Stability::Unstable:
      return "unstable";
    case Stability::Degenerate:
      break;
  }
  return "degenerate";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    out += ch;
    if (ch == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string trajectory_csv(const filippov::Trajectory& traj) {
  std::string out = "t,A,eta,mode\n";
  for (const filippov::PlanarState& s : traj.samples) {
    out += g17(s.t);
    out += ',';
    out += g17(s.x);
    out += ',';
    out += g17(s.y);
    out += ',';
    out += mode_name(s.mode);
    out += '\n';
  }
  return out;
}

std::string events_json_text(const filippov::Trajectory& traj) {
  json arr = json::array();
  for (const filippov::Event& e : traj.events)
    arr.push_back({{"kind", kind_name(e.kind)},
                   {"t", e.t},
                   {"A", e.state.x},
                   {"eta", e.state.y}});
  return arr.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw Error("write failed: " + path);
}

int emit_error(int code, const std::string& type, const std::string& message,
               std::optional<double> t_fail = {}) {
  json e;
  e["error"]["type"] = type;
  e["error"]["message"] = message;
  if (t_fail) e["error"]["t_fail"] = *t_fail;
  std::cerr << e.dump() << "\n";
  return code;
}

// Flags shared by every subcommand.
struct Common {
  std::string config_path;
  std::string out = "out";
  bool dump = false;
  std::string model;
  std::map<std::string, std::optional<double>> params;
  std::map<std::string, std::optional<double>> integrator;
};

constexpr std::pair<const char*, const char*> kParamFlags[] = {
    {"--q", "Q"},           {"--s2", "s2"},
    {"--b", "B"},           {"--c", "C"},
    {"--alpha1", "alpha1"}, {"--alpha2", "alpha2"},
    {"--tc", "Tc"},         {"--rho", "rho"},
    {"--delta", "delta"},   {"--eta-c", "eta_c"},
    {"--m", "M"},           {"--alpha-w", "alpha_w"},
    {"--alpha-i", "alpha_i"}, {"--alpha-s", "alpha_s"},
    {"--y-snow", "y_snow"}};

constexpr std::pair<const char*, const char*> kIntegratorFlags[] = {
    {"--rel-tol", "rel_tol"},
    {"--abs-tol", "abs_tol"},
    {"--boundary-tol", "boundary_tol"},
    {"--tangency-tol", "tangency_tol"},
    {"--max-step", "max_step"},
    {"--max-slide-time", "max_slide_time"}};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON run configuration");
  cmd->add_option("--out", c.out, "output file prefix");
  cmd->add_flag("--dump-config", c.dump,
                "print the effective configuration and exit");
  cmd->add_option("--model", c.model, "budyko or jormungand")
      ->check(CLI::IsMember({"budyko", "jormungand"}));
  for (const auto& [flag, key] : kParamFlags)
    cmd->add_option(flag, c.params[key], std::string("model parameter ") + key);
  for (const auto& [flag, key] : kIntegratorFlags)
    cmd->add_option(flag, c.integrator[key],
                    std::string("integrator setting ") + key);
}

RunConfig build_config(const Common& c) {
  const std::string text =
      c.config_path.empty() ? std::string("{}") : read_file(c.config_path);
  RunConfig cfg = config::load_config(
      text, c.model.empty() ? std::optional<std::string>{}
                            : std::optional<std::string>{c.model});
  for (const auto& [key, v] : c.params)
    if (v) config::set_param(cfg, key, *v);
  for (const auto& [key, v] : c.integrator)
    if (v) config::set_integrator(cfg, key, *v);
  return cfg;
}

double effective_eta_c(const RunConfig& cfg) {
  return cfg.model == "jormungand" ? cfg.jormungand_params.eta_c
                                   : cfg.budyko_params.eta_c;
}

analysis::ModelFamily model_family(const RunConfig& cfg) {
  if (cfg.model == "jormungand") {
    return [p = cfg.jormungand_params](double ec) {
      auto q = p;
      q.eta_c = ec;
      return jormungand::make_model(q);
    };
  }
  return [p = cfg.budyko_params](double ec) {
    auto q = p;
    q.eta_c = ec;
    return budyko::make_model(q);
  };
}

// ---------------- subcommands ----------------

struct SimulateFlags {
  std::optional<double> a0, eta0, t_max, dt_out;
  std::optional<long long> seed;
};

int cmd_simulate(const Common& c, const SimulateFlags& f) {
  RunConfig cfg = build_config(c);
  if (f.a0) cfg.ic_A = *f.a0;
  if (f.eta0) cfg.ic_eta = *f.eta0;
  if (f.t_max) cfg.t_max = *f.t_max;
  if (f.dt_out) cfg.dt_out = *f.dt_out;
  if (f.seed) cfg.seed = *f.seed;
  if (c.dump) {
    std::cout << config::canonical_json(cfg);
    return 0;
  }

  const IceLineModel model = config::make_model(cfg);
  const filippov::PlanarState ic{cfg.ic_A, cfg.ic_eta, 0.0,
                                 filippov::Mode::Interior};
  filippov::IntegrateOptions opts;
  opts.dt_out = cfg.dt_out;

  filippov::Trajectory traj;
  try {
    traj = filippov::integrate(model.field, ic, cfg.t_max, cfg.integrator, opts);
  } catch (const filippov::IntegrationAbort& e) {
    write_file(c.out + ".csv.partial", trajectory_csv(e.partial));
    write_file(c.out + ".events.json.partial", events_json_text(e.partial));
    const char* type = "stiffness";
    if (e.kind == filippov::IntegrationAbort::Kind::RunawaySlide)
      type = "runaway_slide";
    if (e.kind == filippov::IntegrationAbort::Kind::DegenerateBoundary)
      type = "degenerate_boundary";
    return emit_error(1, type, e.what(), e.t_fail);
  }
  write_file(c.out + ".csv", trajectory_csv(traj));
  write_file(c.out + ".events.json", events_json_text(traj));
  return 0;
}

struct SweepFlags {
  double eta_c_min = 0.1;
  double eta_c_max = 0.9;
  int steps = 9;
  double t_max = 20000.0;
  int jobs = 1;
};

int cmd_sweep(const Common& c, const SweepFlags& f) {
  RunConfig cfg = build_config(c);
  if (c.dump) {
    std::cout << config::canonical_json(cfg);
    return 0;
  }
  if (f.steps < 1) throw PreconditionError("sweep: --steps must be >= 1");
  if (f.steps > 1 && !(f.eta_c_min < f.eta_c_max))
    throw PreconditionError("sweep: need --eta-c-min < --eta-c-max");

  std::vector<double> grid;
  for (int i = 0; i < f.steps; ++i)
    grid.push_back(f.steps == 1 ? f.eta_c_min
                                : f.eta_c_min + (f.eta_c_max - f.eta_c_min) *
                                                    (double(i) / (f.steps - 1)));

  analysis::SweepOptions so;
  so.t_max = f.t_max;
  so.jobs = f.jobs;
  const auto rows =
      analysis::sweep_eta_c(model_family(cfg), grid, cfg.integrator, so);

  std::string out = "eta_c,attractor,A_c,lambda_re_max,period,eta_min,eta_max,reason\n";
  bool any_resolved = false;
  for (const analysis::BifurcationRow& row : rows) {
    const double re_max = std::max(row.equilibrium.eigenvalues[0].real(),
                                   row.equilibrium.eigenvalues[1].real());
    out += g17(row.eta_c);
    if (row.attractor == analysis::Attractor::Equilibrium) {
      out += ",equilibrium," + g17(row.equilibrium.A_c) + "," + g17(re_max) +
             ",,,,\n";
      any_resolved = true;
    } else if (row.attractor == analysis::Attractor::PeriodicOrbit) {
      out += ",periodic_orbit," + g17(row.equilibrium.A_c) + "," +
             g17(re_max) + "," + g17(row.orbit->period) + "," +
             g17(row.orbit->eta_min) + "," + g17(row.orbit->eta_max) + ",\n";
      any_resolved = true;
    } else {
      out += ",undetermined,,,,,," + csv_escape(row.reason) + "\n";
    }
  }
  write_file(c.out + ".csv", out);
  return any_resolved ? 0 : 1;
}

struct NullclineFlags {
  int samples = 101;
};

int cmd_nullcline(const Common& c, const NullclineFlags& f) {
  RunConfig cfg = build_config(c);
  if (c.dump) {
    std::cout << config::canonical_json(cfg);
    return 0;
  }
  if (f.samples < 2) throw PreconditionError("nullcline: --samples must be >= 2");

  const IceLineModel model = config::make_model(cfg);
  std::string out = "eta,A,stability_branch\n";
  for (int i = 0; i < f.samples; ++i) {
    const double eta = double(i) / (f.samples - 1);
    const double A = model.nullcline_A(eta);
    const bool stable = model.dh_deta(A, eta) < 0.0;
    out += g17(eta) + "," + g17(A) + "," + (stable ? "stable" : "unstable") +
           "\n";
  }
  write_file(c.out + ".csv", out);
  return 0;
}

int cmd_equilibrium(const Common& c) {
  RunConfig cfg = build_config(c);
  if (c.dump) {
    std::cout << config::canonical_json(cfg);
    return 0;
  }
  const double ec = effective_eta_c(cfg);
  if (!(ec > 0.0 && ec < 1.0))
    return emit_error(2, "degenerate",
                      "eta_c outside (0,1): the boundary is a continuum of "
                      "rest points; no isolated equilibrium to report");

  const EquilibriumReport r =
      analysis::equilibrium_report(config::make_model(cfg));
  json out;
  out["A_c"] = r.A_c;
  out["eta_c"] = r.eta_c;
  out["jacobian"] = {{r.jacobian(0, 0), r.jacobian(0, 1)},
                     {r.jacobian(1, 0), r.jacobian(1, 1)}};
  out["eigenvalues"] = json::array();
  for (int i = 0; i < 2; ++i)
    out["eigenvalues"].push_back({{"re", r.eigenvalues[i].real()},
                                  {"im", r.eigenvalues[i].imag()}});
  out["stability"] = stability_name(r.stability);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Event-driven integrator and analysis tools for ice-line "
               "energy-balance models"};
  app.require_subcommand(1);

  Common c_sim, c_sweep, c_null, c_eq;
  SimulateFlags f_sim;
  SweepFlags f_sweep;
  NullclineFlags f_null;

  CLI::App* sim = app.add_subcommand(
      "simulate", "integrate one trajectory and write CSV + events JSON");
  add_common(sim, c_sim);
  sim->add_option("--a0", f_sim.a0, "initial A");
  sim->add_option("--eta0", f_sim.eta0, "initial eta");
  sim->add_option("--t-max", f_sim.t_max, "integration horizon");
  sim->add_option("--dt-out", f_sim.dt_out, "output sampling interval");
  sim->add_option("--seed", f_sim.seed, "diagnostics sampling seed");

  CLI::App* swp = app.add_subcommand(
      "sweep", "classify the attractor across a grid of eta_c values");
  add_common(swp, c_sweep);
  swp->add_option("--eta-c-min", f_sweep.eta_c_min, "grid start");
  swp->add_option("--eta-c-max", f_sweep.eta_c_max, "grid end");
  swp->add_option("--steps", f_sweep.steps, "number of grid rows");
  swp->add_option("--t-max", f_sweep.t_max,
                  "per-row orbit-detection horizon (default 20000)");
  swp->add_option("--jobs", f_sweep.jobs, "worker threads (default 1)");

  CLI::App* nul = app.add_subcommand(
      "nullcline", "sample the ice-line nullcline with branch stability");
  add_common(nul, c_null);
  nul->add_option("--samples", f_null.samples, "number of eta samples");

  CLI::App* eq = app.add_subcommand(
      "equilibrium", "print the rest-point report as JSON");
  add_common(eq, c_eq);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(c_sim, f_sim);
    if (swp->parsed()) return cmd_sweep(c_sweep, f_sweep);
    if (nul->parsed()) return cmd_nullcline(c_null, f_null);
    if (eq->parsed()) return cmd_equilibrium(c_eq);
  } catch (const PreconditionError& e) {
    return emit_error(2, "precondition", e.what());
  } catch (const InvalidDomainError& e) {
    return emit_error(2, "invalid_domain", e.what());
  } catch (const Error& e) {
    return emit_error(1, "runtime", e.what());
  } catch (const std::exception& e) {
    return emit_error(1, "runtime", e.what());
  }
  return 2;  // no subcommand (require_subcommand should have caught this)
}

}  // namespace iceline::cli
