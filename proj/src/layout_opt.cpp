#include "beaconplan/layout_opt.hpp"

#include "beaconplan/errors.hpp"
#include "beaconplan/grid_io.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace beaconplan
{

std::string objective_name(Objective o)
{
  return o == Objective::mean_rss_error ? "mean_rss_error" : "mean_fused_error";
}

Objective parse_objective(std::string_view name)
{
  if (name == "mean_rss_error")
    return Objective::mean_rss_error;
  if (name == "mean_fused_error")
    return Objective::mean_fused_error;
  throw std::invalid_argument("unknown objective '" + std::string(name) + "'");
}

std::string sa_start_name(SaStart s) { return s == SaStart::random ? "random" : "current"; }

SaStart parse_sa_start(std::string_view name)
{
  if (name == "random")
    return SaStart::random;
  if (name == "current")
    return SaStart::current;
  throw std::invalid_argument("unknown start '" + std::string(name) + "'");
}

void SaConfig::validate() const
{
  if (beacon_count < 1)
    throw ValidationError("optimize.beacon_count", "must be >= 1");
  if (!(unbounded_penalty >= 0.0) || !std::isfinite(unbounded_penalty))
    throw ValidationError("optimize.unbounded_penalty_m", "must be a nonnegative finite number");
  if (initial_temp && (!(*initial_temp > 0.0) || !std::isfinite(*initial_temp)))
    throw ValidationError("optimize.initial_temp_m", "must be \"auto\" or a positive number");
  if (!(cooling_factor > 0.0 && cooling_factor < 1.0))
    throw ValidationError("optimize.cooling_factor", "must lie strictly between 0 and 1");
  if (iters_per_temp < 1)
    throw ValidationError("optimize.iters_per_temp", "must be >= 1");
  if (!(min_temp_ratio > 0.0 && min_temp_ratio < 1.0))
    throw ValidationError("optimize.min_temp_ratio", "must lie strictly between 0 and 1");
  if (!(move_sigma > 0.0) || !std::isfinite(move_sigma))
    throw ValidationError("optimize.move_sigma_m", "must be a positive finite number");
  if (max_evals < 1)
    throw ValidationError("optimize.max_evals", "must be >= 1");
  if (!(grid_resolution > 0.0) || !std::isfinite(grid_resolution))
    throw ValidationError("optimize.grid_resolution_m", "must be a positive finite number");
  if (horizon_steps < 1)
    throw ValidationError("grid.horizon_steps", "must be >= 1");
}

double objective(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid, const SaConfig &cfg,
                 const PdrParams *pdr)
{
  ErrorGrid map = [&] {
    if (cfg.objective == Objective::mean_rss_error)
      return rss_error_map(ch, layout, grid);
    if (pdr == nullptr)
      throw std::invalid_argument("fused objective needs PDR parameters");
    return fused_error_map(ch, layout, grid, *pdr, cfg.pdr_mode, cfg.horizon_steps);
  }();

  try
  {
    const GridMean m = grid_mean(map);
    return m.mean + cfg.unbounded_penalty * (1.0 - m.bounded_fraction);
  }
  catch (const NoInformation &)
  {
    return cfg.unbounded_penalty;
  }
}

namespace
{

std::vector<Beacon> random_beacons(const Floorplan &plan, int count, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> ux(0.0, plan.width);
  std::uniform_real_distribution<double> uy(0.0, plan.height);
  std::vector<Beacon> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i)
  {
    const double x = ux(rng);
    const double y = uy(rng);
    out.push_back({"b" + std::to_string(i + 1), {x, y}});
  }
  return out;
}

double calibrate_temperature(const ChannelModel &ch, const Floorplan &plan, const GridSpec &grid, const SaConfig &cfg,
                             const PdrParams *pdr, std::mt19937_64 &rng)
{
  std::vector<double> samples;
  samples.reserve(kTempCalibrationLayouts);
  for (int i = 0; i < kTempCalibrationLayouts; ++i)
    samples.push_back(objective(ch, {plan, random_beacons(plan, cfg.beacon_count, rng)}, grid, cfg, pdr));

  double mean = 0.0;
  for (double s : samples)
    mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples)
    var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / static_cast<double>(samples.size() - 1));
  // Flat landscape: fall back to a unit temperature.
  return (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
}

} // namespace

namespace
{

SaResult run_chain(const ChannelModel &ch, BeaconLayout current, const GridSpec &grid, const SaConfig &cfg,
                   const PdrParams *pdr, const std::function<void(const SaProgress &)> &on_progress,
                   std::stop_token stop, std::mt19937_64 &rng)
{
  const Floorplan plan = current.floorplan;
  const double t0 = cfg.initial_temp ? *cfg.initial_temp : calibrate_temperature(ch, plan, grid, cfg, pdr, rng);

  SaResult result;
  result.config = cfg;
  result.initial_temp = t0;

  double current_obj = objective(ch, current, grid, cfg, pdr);
  result.best_layout = current;
  result.best_objective = current_obj;
  result.evals_used = 1;
  double temp = t0;
  result.history.push_back({0, current_obj, current_obj, temp});

  auto report = [&] {
    if (on_progress)
      on_progress({result.evals_used, cfg.max_evals, result.best_objective, temp});
  };
  report();

  std::uniform_int_distribution<std::size_t> pick(0, current.beacons.size() - 1);
  std::normal_distribution<double> step(0.0, cfg.move_sigma);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double t_min = cfg.min_temp_ratio * t0;
  int block = 0;

  while (result.evals_used < cfg.max_evals && temp >= t_min && !stop.stop_requested())
  {
    BeaconLayout candidate = current;
    auto &moved = candidate.beacons[pick(rng)];
    const double dx = step(rng);
    const double dy = step(rng);
    moved.position = plan.clamp({moved.position.x + dx, moved.position.y + dy});

    const double cand_obj = objective(ch, candidate, grid, cfg, pdr);
    ++result.evals_used;

    const double delta = cand_obj - current_obj;
    if (delta <= 0.0 || unit(rng) < std::exp(-delta / temp))
    {
      current = std::move(candidate);
      current_obj = cand_obj;
      if (current_obj < result.best_objective)
      {
        result.best_objective = current_obj;
        result.best_layout = current;
      }
    }
    result.history.push_back({result.evals_used - 1, current_obj, result.best_objective, temp});
    report();

    if (++block == cfg.iters_per_temp)
    {
      block = 0;
      temp *= cfg.cooling_factor;
    }
  }
  return result;
}

void check_inputs(const Floorplan &plan, const SaConfig &cfg, const PdrParams *pdr)
{
  if (!(plan.area() > 0.0) || !std::isfinite(plan.area()))
    throw std::invalid_argument("floorplan must have positive area");
  cfg.validate();
  if (cfg.objective == Objective::mean_fused_error && pdr == nullptr)
    throw std::invalid_argument("fused objective needs PDR parameters");
}

} // namespace

SaResult anneal(const ChannelModel &ch, const Floorplan &plan, const GridSpec &grid, const SaConfig &cfg,
                const PdrParams *pdr, const std::function<void(const SaProgress &)> &on_progress,
                std::stop_token stop)
{
  check_inputs(plan, cfg, pdr);
  std::mt19937_64 rng(cfg.seed);
  BeaconLayout initial{plan, random_beacons(plan, cfg.beacon_count, rng)};
  return run_chain(ch, std::move(initial), grid, cfg, pdr, on_progress, stop, rng);
}

SaResult anneal(const ChannelModel &ch, const BeaconLayout &initial, const GridSpec &grid, const SaConfig &cfg,
                const PdrParams *pdr, const std::function<void(const SaProgress &)> &on_progress,
                std::stop_token stop)
{
  check_inputs(initial.floorplan, cfg, pdr);
  if (initial.beacons.size() != static_cast<std::size_t>(cfg.beacon_count))
    throw std::invalid_argument("initial layout must hold beacon_count beacons");
  initial.validate();
  std::mt19937_64 rng(cfg.seed);
  return run_chain(ch, initial, grid, cfg, pdr, on_progress, stop, rng);
}

void write_history_csv(std::ostream &out, const std::vector<SaHistoryEntry> &history)
{
  out << "eval,current,best,temperature\n";
  for (const auto &h : history)
  {
    out << h.eval << ',' << format_number(h.current) << ',' << format_number(h.best) << ','
        << format_number(h.temperature) << '\n';
  }
}

} // namespace beaconplan
