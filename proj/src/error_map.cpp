#include "beaconplan/error_map.hpp"

#include "beaconplan/errors.hpp"
#include "beaconplan/fusion.hpp"
#include "beaconplan/parallel.hpp"

#include <algorithm>
#include <stdexcept>

namespace beaconplan
{

std::string map_kind_name(MapKind kind)
{
  switch (kind)
  {
  case MapKind::strength:
    return "strength";
  case MapKind::rss_error:
    return "rss_error";
  case MapKind::fused_error:
    return "fused_error";
  }
  throw std::invalid_argument("unknown map kind");
}

MapKind parse_map_kind(std::string_view name)
{
  if (name == "strength")
    return MapKind::strength;
  if (name == "rss_error")
    return MapKind::rss_error;
  if (name == "fused_error")
    return MapKind::fused_error;
  throw std::invalid_argument("unknown map kind '" + std::string(name) + "'");
}

std::string pdr_mode_name(PdrMode mode)
{
  return mode == PdrMode::uniform_horizon ? "uniform_horizon" : "distance_to_beacon";
}

PdrMode parse_pdr_mode(std::string_view name)
{
  if (name == "uniform_horizon")
    return PdrMode::uniform_horizon;
  if (name == "distance_to_beacon")
    return PdrMode::distance_to_beacon;
  throw std::invalid_argument("unknown pdr mode '" + std::string(name) + "'");
}

namespace
{

template <class CellFn>
ErrorGrid rasterize(const GridSpec &grid, GridUnit unit, CellFn &&fn)
{
  ErrorGrid out(grid, unit);
  const std::size_t nx = grid.nx();
  detail::parallel_for(grid.size(), [&](std::size_t idx) {
    out.values[idx] = fn(cell_center(grid, idx % nx, idx / nx));
  });
  return out;
}

double nearest_beacon_distance(Point2 p, const BeaconLayout &layout)
{
  double best = kUnbounded;
  for (const auto &b : layout.beacons)
    best = std::min(best, distance(p, b.position));
  return best;
}

} // namespace

ErrorGrid strength_map(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid)
{
  if (layout.beacons.empty())
    throw NoInformation("strength map needs at least one beacon");
  return rasterize(grid, GridUnit::dBm, [&](Point2 c) {
    double best = -kUnbounded;
    for (const auto &b : layout.beacons)
      best = std::max(best, predict_rss(ch, distance(c, b.position)));
    return best;
  });
}

ErrorGrid rss_error_map(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid)
{
  return rasterize(grid, GridUnit::meters, [&](Point2 c) { return rss_rmse(ch, c, layout); });
}

ErrorGrid fused_error_map(const ChannelModel &ch, const BeaconLayout &layout, const GridSpec &grid,
                          const PdrParams &pdr, PdrMode mode, int horizon_steps)
{
  if (horizon_steps < 1)
    throw std::invalid_argument("horizon_steps must be >= 1");
  const PdrTable table(pdr, horizon_steps);

  return rasterize(grid, GridUnit::meters, [&](Point2 c) {
    int n = horizon_steps;
    if (mode == PdrMode::distance_to_beacon)
    {
      const double d = nearest_beacon_distance(c, layout);
      if (!is_unbounded(d))
      {
        const double steps = std::ceil(d / pdr.step_length);
        n = static_cast<int>(std::clamp(steps, 1.0, static_cast<double>(horizon_steps)));
      }
    }
    const PdrErrorEstimate e = table.at(n);
    const AxisVariances rss = rss_variances(ch, c, layout);
    if (is_unbounded(rss.var_x) || is_unbounded(rss.var_y))
      return e.rmse;
    return fused_rmse(rss, pdr_axis_variances(e, 0.0, false));
  });
}

ErrorGrid compute_map(const ChannelModel &ch, const BeaconLayout &layout, const PdrParams &pdr,
                      const MapRequest &request)
{
  const GridSpec grid(layout.floorplan, request.resolution);
  switch (request.kind)
  {
  case MapKind::strength:
    return strength_map(ch, layout, grid);
  case MapKind::rss_error:
    return rss_error_map(ch, layout, grid);
  case MapKind::fused_error:
    return fused_error_map(ch, layout, grid, pdr, request.pdr_mode, request.horizon_steps);
  }
  throw std::invalid_argument("unknown map kind");
}

GridMean grid_mean(const ErrorGrid &grid)
{
  double sum = 0.0;
  std::size_t bounded = 0;
  for (double v : grid.values)
  {
    if (is_unbounded(v))
      continue;
    sum += v;
    ++bounded;
  }
  if (bounded == 0)
    throw NoInformation("every grid cell is unbounded");
  return {sum / static_cast<double>(bounded), static_cast<double>(bounded) / static_cast<double>(grid.values.size())};
}

} // namespace beaconplan
