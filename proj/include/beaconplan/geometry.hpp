#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace beaconplan
{

// Infinite variance / error. Produced where the Fisher information is
// singular or a source carries no information.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline bool is_unbounded(double v) { return std::isinf(v) && v > 0; }

struct Point2
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2 &, const Point2 &) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Rectangular plan with its lower-left corner at the origin, x right, y up.
struct Floorplan
{
  double width = 0.0;
  double height = 0.0;

  bool contains(Point2 p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
  Point2 clamp(Point2 p) const;
  double area() const { return width * height; }

  friend bool operator==(const Floorplan &, const Floorplan &) = default;
};

struct Beacon
{
  std::string id;
  Point2 position;

  friend bool operator==(const Beacon &, const Beacon &) = default;
};

struct BeaconLayout
{
  Floorplan floorplan;
  std::vector<Beacon> beacons;

  // Throws ValidationError on a bad plan, duplicate id, non-finite or
  // out-of-plan beacon.
  void validate() const;

  friend bool operator==(const BeaconLayout &, const BeaconLayout &) = default;
};

// Regular raster over a floorplan. Cells are evaluated at their centers;
// the last row/column may extend past the plan edge.
class GridSpec
{
public:
  GridSpec(const Floorplan &plan, double resolution);
  GridSpec(double resolution, std::size_t nx, std::size_t ny);

  double resolution() const { return resolution_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }

  friend bool operator==(const GridSpec &, const GridSpec &) = default;

private:
  double resolution_;
  std::size_t nx_;
  std::size_t ny_;
};

Point2 cell_center(const GridSpec &spec, std::size_t i, std::size_t j);

enum class GridUnit
{
  dBm,
  meters,
  meters2,
};

// Row-major raster values: index = j * nx + i, row j = 0 first.
struct ErrorGrid
{
  GridSpec spec;
  GridUnit unit;
  std::vector<double> values;

  ErrorGrid(GridSpec s, GridUnit u);
  ErrorGrid(GridSpec s, GridUnit u, std::vector<double> v);

  double &at(std::size_t i, std::size_t j) { return values[j * spec.nx() + i]; }
  double at(std::size_t i, std::size_t j) const { return values[j * spec.nx() + i]; }

  friend bool operator==(const ErrorGrid &, const ErrorGrid &) = default;
};

struct Trajectory
{
  Point2 start;
  double heading = 0.0; // radians, 0 = +x
  int step_count = 1;

  void validate() const;
};

// Nominal drift-free position after k steps (1 <= k <= step_count).
Point2 trajectory_point(const Trajectory &traj, int k, double step_length);

} // namespace beaconplan
