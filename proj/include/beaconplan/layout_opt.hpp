#pragma once

#include "beaconplan/error_map.hpp"
#include "beaconplan/geometry.hpp"
#include "beaconplan/pdr_model.hpp"
#include "beaconplan/rss_model.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

namespace beaconplan
{

enum class Objective
{
  mean_rss_error,
  mean_fused_error,
};

std::string objective_name(Objective o);
Objective parse_objective(std::string_view name);

// Where a project optimization starts.
enum class SaStart
{
  random,  // uniform random layout drawn from the seed
  current, // the project's beacons, when their count matches beacon_count
};

std::string sa_start_name(SaStart s);
SaStart parse_sa_start(std::string_view name);

struct SaConfig
{
  int beacon_count = 4;
  Objective objective = Objective::mean_rss_error;
  double unbounded_penalty = 20.0;      // m, scaled by the unbounded-cell fraction
  std::optional<double> initial_temp;   // m; empty = calibrate from random layouts
  double cooling_factor = 0.95;
  int iters_per_temp = 50;
  double min_temp_ratio = 1e-3;
  double move_sigma = 2.0;              // m
  int max_evals = 10000;
  std::uint64_t seed = 1;
  double grid_resolution = 2.0;         // m
  SaStart start = SaStart::current;

  // Used by the fused objective only.
  PdrMode pdr_mode = PdrMode::distance_to_beacon;
  int horizon_steps = 20;

  // Throws ValidationError with an "optimize.*" path.
  void validate() const;

  friend bool operator==(const SaConfig &, const SaConfig &) = default;
};

// Number of random layouts sampled to calibrate the initial temperature.
inline constexpr int kTempCalibrationLayouts = 50;

struct SaHistoryEntry
{
  int eval = 0;
  double current = 0.0;
  double best = 0.0;
  double temperature = 0.0;
};

struct SaResult
{
  BeaconLayout best_layout;
  double best_objective = 0.0;
  std::vector<SaHistoryEntry> history;
  int evals_used = 0;
  double initial_temp = 0.0;
  SaConfig config;
};

struct SaProgress
{
  int evals_used = 0;
  int max_evals = 0;
  double best_objective = 0.0;
  double temperature = 0.0;
};

// Mean bounded-cell error plus unbounded_penalty * unbounded fraction.
// `pdr` is required for the fused objective.
double objective(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid, const SaConfig &cfg,
                 const PdrParams *pdr = nullptr);

// Simulated annealing over beacon positions. Deterministic for a given seed.
// The optional callback sees every evaluation; a stop request ends the run
// early with the best layout so far.
SaResult anneal(const ChannelModel &ch, const Floorplan &plan, const GridSpec &grid, const SaConfig &cfg,
                const PdrParams *pdr = nullptr, const std::function<void(const SaProgress &)> &on_progress = {},
                std::stop_token stop = {});

// Same chain started from `initial` instead of a random layout; beacon ids
// are kept. `initial` must hold cfg.beacon_count beacons.
SaResult anneal(const ChannelModel &ch, const BeaconLayout &initial, const GridSpec &grid, const SaConfig &cfg,
                const PdrParams *pdr = nullptr, const std::function<void(const SaProgress &)> &on_progress = {},
                std::stop_token stop = {});

// `eval,current,best,temperature`
void write_history_csv(std::ostream &out, const std::vector<SaHistoryEntry> &history);

} // namespace beaconplan
