#include "beaconplan/geometry.hpp"

#include "beaconplan/errors.hpp"

#include <algorithm>
#include <numbers>
#include <set>
#include <stdexcept>

namespace beaconplan
{

namespace
{

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

} // namespace

Point2 Floorplan::clamp(Point2 p) const { return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)}; }

void BeaconLayout::validate() const
{
  if (!(floorplan.width > 0.0) || !std::isfinite(floorplan.width))
    throw ValidationError("floorplan.width_m", "must be a positive finite number");
  if (!(floorplan.height > 0.0) || !std::isfinite(floorplan.height))
    throw ValidationError("floorplan.height_m", "must be a positive finite number");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < beacons.size(); ++i)
  {
    const auto &b = beacons[i];
    const std::string path = "beacons[" + std::to_string(i) + "]";
    if (b.id.empty())
      throw ValidationError(path + ".id", "must not be empty");
    if (!seen.insert(b.id).second)
      throw ValidationError(path + ".id", "duplicate beacon id '" + b.id + "'");
    if (!finite(b.position))
      throw ValidationError(path, "position must be finite");
    if (!floorplan.contains(b.position))
      throw ValidationError(path, "position lies outside the floorplan");
  }
}

GridSpec::GridSpec(const Floorplan &plan, double resolution) : resolution_(resolution)
{
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw std::invalid_argument("grid resolution must be positive");
  if (!(plan.width > 0.0) || !(plan.height > 0.0))
    throw std::invalid_argument("floorplan must have positive extent");
  nx_ = static_cast<std::size_t>(std::ceil(plan.width / resolution));
  ny_ = static_cast<std::size_t>(std::ceil(plan.height / resolution));
  nx_ = std::max<std::size_t>(nx_, 1);
  ny_ = std::max<std::size_t>(ny_, 1);
}

GridSpec::GridSpec(double resolution, std::size_t nx, std::size_t ny) : resolution_(resolution), nx_(nx), ny_(ny)
{
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw std::invalid_argument("grid resolution must be positive");
  if (nx == 0 || ny == 0)
    throw std::invalid_argument("grid must have at least one cell per axis");
}

Point2 cell_center(const GridSpec &spec, std::size_t i, std::size_t j)
{
  if (i >= spec.nx() || j >= spec.ny())
    throw std::out_of_range("cell index (" + std::to_string(i) + ", " + std::to_string(j) + ") outside grid");
  const double res = spec.resolution();
  return {(static_cast<double>(i) + 0.5) * res, (static_cast<double>(j) + 0.5) * res};
}

ErrorGrid::ErrorGrid(GridSpec s, GridUnit u) : spec(s), unit(u), values(s.size(), 0.0) {}

ErrorGrid::ErrorGrid(GridSpec s, GridUnit u, std::vector<double> v) : spec(s), unit(u), values(std::move(v))
{
  if (values.size() != spec.size())
    throw std::invalid_argument("grid value count does not match nx*ny");
}

void Trajectory::validate() const
{
  if (step_count < 1)
    throw std::invalid_argument("trajectory step_count must be >= 1");
  if (!finite(start))
    throw std::invalid_argument("trajectory start must be finite");
  if (!(heading >= -std::numbers::pi && heading <= std::numbers::pi))
    throw std::invalid_argument("trajectory heading must lie in [-pi, pi]");
}

Point2 trajectory_point(const Trajectory &traj, int k, double step_length)
{
  if (k < 1 || k > traj.step_count)
    throw std::out_of_range("step index " + std::to_string(k) + " outside [1, " + std::to_string(traj.step_count) + "]");
  if (!(step_length > 0.0))
    throw std::invalid_argument("step_length must be positive");
  const double dist = k * step_length;
  return {traj.start.x + dist * std::cos(traj.heading), traj.start.y + dist * std::sin(traj.heading)};
}

} // namespace beaconplan
