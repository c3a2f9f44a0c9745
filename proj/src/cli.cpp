#include "beaconplan/cli.hpp"

#include "beaconplan/errors.hpp"
#include "beaconplan/error_map.hpp"
#include "beaconplan/fusion.hpp"
#include "beaconplan/grid_io.hpp"
#include "beaconplan/layout_opt.hpp"
#include "beaconplan/montecarlo.hpp"
#include "beaconplan/project.hpp"
#include "beaconplan/service.hpp"

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

namespace beaconplan
{

namespace fs = std::filesystem;

namespace
{

struct CommonArgs
{
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_res;
  std::string format = "csv";
};

struct WalkArgs
{
  std::vector<double> start;
  double heading = 0.0;
  int steps = 0;
};

void add_common(CLI::App *cmd, CommonArgs &a)
{
  cmd->add_option("--config", a.config, "Project document (JSON)")->required();
  cmd->add_option("--out", a.out_dir, "Output directory");
  cmd->add_option("--seed", a.seed, "Random seed");
  cmd->add_option("--grid-res", a.grid_res, "Grid resolution in meters")->check(CLI::PositiveNumber);
  cmd->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void add_walk(CLI::App *cmd, WalkArgs &w)
{
  cmd->add_option("--start", w.start, "Start point x,y in meters")->delimiter(',')->expected(2)->required();
  cmd->add_option("--heading", w.heading, "Walking heading in radians (0 = +x)")->required();
  cmd->add_option("--steps", w.steps, "Number of steps")->required()->check(CLI::PositiveNumber);
}

Trajectory to_trajectory(const WalkArgs &w)
{
  Trajectory t;
  t.start = {w.start.at(0), w.start.at(1)};
  t.heading = w.heading;
  t.step_count = w.steps;
  return t;
}

fs::path prepare_out(const CommonArgs &a)
{
  fs::path dir(a.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path &path, const std::string &content)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

void write_grid(const fs::path &dir, const std::string &stem, const ErrorGrid &grid, MapKind kind,
                const std::string &format)
{
  if (format == "json")
    write_file(dir / (stem + ".json"), grid_to_json(grid, map_kind_name(kind)).dump() + "\n");
  else
    write_file(dir / (stem + ".csv"), grid_to_csv(grid));
}

int cmd_simulate(const CommonArgs &a, std::ostream &out)
{
  const Project p = load_project_file(a.config);
  const fs::path dir = prepare_out(a);
  const double res = a.grid_res.value_or(p.grid.resolution);
  const BeaconLayout layout = p.layout();
  const GridSpec grid(p.floorplan, res);

  if (layout.beacons.empty())
    throw ValidationError("beacons", "simulate needs at least one beacon");
  const ErrorGrid strength = strength_map(p.channel, layout, grid);
  const ErrorGrid rss = rss_error_map(p.channel, layout, grid);
  const ErrorGrid fused = fused_error_map(p.channel, layout, grid, p.pdr, p.grid.pdr_mode, p.grid.horizon_steps);
  write_grid(dir, "strength", strength, MapKind::strength, a.format);
  write_grid(dir, "rss_error", rss, MapKind::rss_error, a.format);
  write_grid(dir, "fused_error", fused, MapKind::fused_error, a.format);

  auto report = [&](const char *label, const ErrorGrid &g) {
    try
    {
      const GridMean m = grid_mean(g);
      out << label << " mean=" << format_number(m.mean) << " bounded_fraction=" << format_number(m.bounded_fraction)
          << '\n';
    }
    catch (const NoInformation &)
    {
      out << label << " mean=inf bounded_fraction=0\n";
    }
  };
  report("rss_error", rss);
  report("fused_error", fused);
  return kExitOk;
}

int cmd_optimize(const CommonArgs &a, std::optional<int> max_evals, std::ostream &out)
{
  Project p = load_project_file(a.config);
  const fs::path dir = prepare_out(a);
  SaConfig cfg = p.optimize;
  if (a.seed)
    cfg.seed = *a.seed;
  if (a.grid_res)
    cfg.grid_resolution = *a.grid_res;
  if (max_evals)
    cfg.max_evals = *max_evals;
  cfg.validate();

  const SaResult result = optimize_project(p, cfg);

  nlohmann::json fragment = {
      {"format_version", kFormatVersion},
      {"beacons", beacons_to_json(result.best_layout.beacons)},
      {"best_objective_m", round_sig9(result.best_objective)},
      {"evals_used", result.evals_used},
      {"initial_temp_m", round_sig9(result.initial_temp)},
      {"optimize", optimize_to_json(cfg)},
  };
  write_file(dir / "best_layout.json", fragment.dump(2) + "\n");

  std::ofstream hist(dir / "history.csv", std::ios::binary | std::ios::trunc);
  if (!hist)
    throw std::runtime_error("cannot write history.csv");
  write_history_csv(hist, result.history);

  out << "best_objective=" << format_number(result.best_objective) << " evals=" << result.evals_used << '\n';
  return kExitOk;
}

int cmd_curves(const CommonArgs &a, const WalkArgs &w, const CurveOptions &opts, std::ostream &out)
{
  const Project p = load_project_file(a.config);
  const fs::path dir = prepare_out(a);
  const auto curve = fused_curve(p.channel, p.layout(), to_trajectory(w), p.pdr, opts);
  if (a.format == "json")
  {
    nlohmann::json rows = nlohmann::json::array();
    auto cell = [](double v) { return is_unbounded(v) ? nlohmann::json(nullptr) : nlohmann::json(round_sig9(v)); };
    for (const auto &c : curve)
      rows.push_back({{"step", c.step}, {"rss_rmse_m", cell(c.rss_rmse)}, {"pdr_rmse_m", cell(c.pdr_rmse)},
                      {"fused_rmse_m", cell(c.fused_rmse)}});
    write_file(dir / "curves.json", nlohmann::json{{"format_version", kFormatVersion}, {"rows", rows}}.dump() + "\n");
  }
  else
  {
    std::ofstream f(dir / "curves.csv", std::ios::binary | std::ios::trunc);
    if (!f)
      throw std::runtime_error("cannot write curves.csv");
    write_curve_csv(f, curve);
  }
  out << "steps=" << curve.size() << '\n';
  return kExitOk;
}

int cmd_validate(const CommonArgs &a, const WalkArgs &w, SimConfig sim, const std::string &mode, std::ostream &out)
{
  const Project p = load_project_file(a.config);
  const fs::path dir = prepare_out(a);
  sim.trajectory = to_trajectory(w);
  if (a.seed)
    sim.seed = *a.seed;
  sim.mode = mode == "pure_gaussian" ? FusionSimMode::pure_gaussian : FusionSimMode::walk;
  const ValidationReport report = validate_fusion(p.channel, p.layout(), p.pdr, sim);
  std::ofstream f(dir / "report.csv", std::ios::binary | std::ios::trunc);
  if (!f)
    throw std::runtime_error("cannot write report.csv");
  write_report_csv(f, report);
  out << "rows=" << report.rows.size() << '\n';
  return kExitOk;
}

Service *g_running_service = nullptr;

extern "C" void on_signal(int)
{
  if (g_running_service)
    g_running_service->stop();
}

int cmd_serve(const std::string &host, int port, std::string data_dir, std::ostream &out, std::ostream &err)
{
  if (data_dir.empty())
  {
    const char *env = std::getenv("BEACONPLAN_DATA");
    data_dir = env ? env : "beaconplan-data";
  }
  Service service({data_dir});
  const int bound = service.bind(host, port);
  if (bound < 0)
  {
    err << "beaconplan: cannot bind " << host << ":" << port << '\n';
    return kExitRuntime;
  }
  out << "listening on http://" << host << ":" << bound << " (data: " << data_dir << ")" << std::endl;
  g_running_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  service.listen();
  g_running_service = nullptr;
  return kExitOk;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Indoor beacon deployment planner: error maps, curves, layout optimization"};
  app.require_subcommand(1);

  CommonArgs sim_args, opt_args, curve_args, val_args;
  WalkArgs curve_walk, val_walk;
  CurveOptions curve_opts;
  SimConfig sim_cfg;
  std::string sim_mode = "walk";
  std::optional<int> max_evals;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data_dir;

  auto *simulate = app.add_subcommand("simulate", "Write strength, RSS error and fused error grids");
  add_common(simulate, sim_args);

  auto *optimize = app.add_subcommand("optimize", "Anneal beacon positions; write best layout and history");
  add_common(optimize, opt_args);
  optimize->add_option("--max-evals", max_evals, "Evaluation budget")->check(CLI::PositiveNumber);

  auto *curves = app.add_subcommand("curves", "RSS, PDR and fused RMSE along a straight walk");
  add_common(curves, curve_args);
  add_walk(curves, curve_walk);
  curves->add_flag("--rotate-pdr-frame", curve_opts.rotate_pdr_frame, "Rotate PDR covariance by the heading");
  curves->add_option("--reset-every", curve_opts.reset_every, "Reset PDR error every N steps (0 = never)");

  auto *validate = app.add_subcommand("validate", "Monte-Carlo check of the fused error model");
  add_common(validate, val_args);
  add_walk(validate, val_walk);
  validate->add_option("--trials", sim_cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
  validate->add_option("--step-sigma", sim_cfg.step_sigma, "Per-step step-length noise (m)");
  validate->add_option("--drift-bound", sim_cfg.drift_bound, "Heading drift rate bound (rad/s)");
  validate->add_option("--mode", sim_mode, "walk or pure_gaussian")->check(CLI::IsMember({"walk", "pure_gaussian"}));

  auto *serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", data_dir, "Project directory (default: $BEACONPLAN_DATA)");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &)
  {
    out << app.help();
    return kExitOk;
  }
  catch (const CLI::CallForAllHelp &)
  {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  }
  catch (const CLI::ParseError &e)
  {
    err << "beaconplan: " << e.what() << '\n';
    return kExitUsage;
  }

  try
  {
    if (*simulate)
      return cmd_simulate(sim_args, out);
    if (*optimize)
      return cmd_optimize(opt_args, max_evals, out);
    if (*curves)
      return cmd_curves(curve_args, curve_walk, curve_opts, out);
    if (*validate)
      return cmd_validate(val_args, val_walk, sim_cfg, sim_mode, out);
    if (*serve)
      return cmd_serve(host, port, data_dir, out, err);
  }
  catch (const ValidationError &e)
  {
    err << "beaconplan: invalid input: " << e.what() << '\n';
    return kExitValidation;
  }
  catch (const ParseError &e)
  {
    err << "beaconplan: invalid input: " << e.what() << '\n';
    return kExitValidation;
  }
  catch (const std::invalid_argument &e)
  {
    err << "beaconplan: invalid input: " << e.what() << '\n';
    return kExitValidation;
  }
  catch (const std::exception &e)
  {
    err << "beaconplan: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

} // namespace beaconplan
