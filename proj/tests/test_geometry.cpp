#include "beaconplan/errors.hpp"
#include "beaconplan/geometry.hpp"
#include "beaconplan/grid_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace beaconplan;

TEST(CellCenter, Examples)
{
  const GridSpec unit(Floorplan{4, 4}, 1.0);
  EXPECT_EQ(cell_center(unit, 0, 0), (Point2{0.5, 0.5}));

  const GridSpec half(Floorplan{4, 4}, 0.5);
  EXPECT_EQ(cell_center(half, 3, 1), (Point2{1.75, 0.75}));

  // The last row's center lies past the 5 m top edge.
  const GridSpec coarse(Floorplan{10, 5}, 2.0);
  EXPECT_EQ(coarse.nx(), 5u);
  EXPECT_EQ(coarse.ny(), 3u);
  EXPECT_EQ(cell_center(coarse, 4, 2), (Point2{9.0, 5.0}));
}

TEST(CellCenter, OutOfRangeThrows)
{
  const GridSpec g(Floorplan{10, 5}, 2.0);
  EXPECT_THROW(cell_center(g, 5, 0), std::out_of_range);
  EXPECT_THROW(cell_center(g, 0, 3), std::out_of_range);
}

TEST(CellCenter, Injective)
{
  const GridSpec g(Floorplan{7.3, 4.1}, 0.7);
  std::set<std::pair<double, double>> seen;
  for (std::size_t j = 0; j < g.ny(); ++j)
    for (std::size_t i = 0; i < g.nx(); ++i)
    {
      const Point2 c = cell_center(g, i, j);
      EXPECT_TRUE(seen.insert({c.x, c.y}).second);
    }
  EXPECT_EQ(seen.size(), g.size());
}

TEST(GridSpec, RejectsBadResolution)
{
  EXPECT_THROW(GridSpec(Floorplan{1, 1}, 0.0), std::invalid_argument);
  EXPECT_THROW(GridSpec(Floorplan{1, 1}, -1.0), std::invalid_argument);
  EXPECT_THROW(GridSpec(Floorplan{0, 1}, 1.0), std::invalid_argument);
}

TEST(TrajectoryPoint, Examples)
{
  Trajectory t{{0, 0}, 0.0, 10};
  const Point2 a = trajectory_point(t, 4, 0.625);
  EXPECT_DOUBLE_EQ(a.x, 2.5);
  EXPECT_DOUBLE_EQ(a.y, 0.0);

  Trajectory up{{1, 1}, std::numbers::pi / 2, 5};
  const Point2 b = trajectory_point(up, 2, 0.5);
  EXPECT_NEAR(b.x, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(b.y, 2.0);

  Trajectory diag{{0, 0}, std::numbers::pi / 4, 1};
  const Point2 c = trajectory_point(diag, 1, 1.0);
  EXPECT_NEAR(c.x, 0.7071, 5e-5);
  EXPECT_NEAR(c.y, 0.7071, 5e-5);
}

TEST(TrajectoryPoint, IndexErrors)
{
  Trajectory t{{0, 0}, 0.0, 3};
  EXPECT_THROW(trajectory_point(t, 0, 1.0), std::out_of_range);
  EXPECT_THROW(trajectory_point(t, 4, 1.0), std::out_of_range);
  t.heading = 4.0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
}

TEST(TrajectoryPoint, ConstantStepLength)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> h(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> s(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial)
  {
    Trajectory t{{3.0, -2.0}, h(rng), 50};
    const double len = s(rng);
    for (int k = 1; k < t.step_count; ++k)
    {
      const double d = distance(trajectory_point(t, k + 1, len), trajectory_point(t, k, len));
      EXPECT_NEAR(d, len, 1e-12 * len * k);
    }
  }
}

TEST(BeaconLayout, Validation)
{
  BeaconLayout ok{{10, 5}, {{"a", {1, 1}}, {"b", {10, 5}}}};
  EXPECT_NO_THROW(ok.validate());

  BeaconLayout empty{{10, 5}, {}};
  EXPECT_NO_THROW(empty.validate());

  BeaconLayout outside{{10, 5}, {{"a", {1, 1}}, {"b", {11, 1}}}};
  try
  {
    outside.validate();
    FAIL() << "expected ValidationError";
  }
  catch (const ValidationError &e)
  {
    EXPECT_EQ(e.path(), "beacons[1]");
  }

  BeaconLayout dup{{10, 5}, {{"a", {1, 1}}, {"a", {2, 2}}}};
  EXPECT_THROW(dup.validate(), ValidationError);
}

TEST(GridCsv, HeaderAndLayout)
{
  ErrorGrid g(GridSpec(0.5, 3, 2), GridUnit::meters, {1.0, 2.5, kUnbounded, 0.125, 3.0, 4.0});
  EXPECT_EQ(grid_to_csv(g), "# unit=m\n# resolution_m=0.5\n# nx=3\n# ny=2\n1,2.5,inf\n0.125,3,4\n");
}

TEST(GridCsv, RoundTripAtNineDigits)
{
  // write(read(write(g))) == write(g), and values survive to 9 significant digits.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-120.0, 50.0);
  std::uniform_int_distribution<int> dim(1, 12);
  std::bernoulli_distribution hole(0.1);
  for (int trial = 0; trial < 100; ++trial)
  {
    GridSpec spec(0.25 * dim(rng), dim(rng), dim(rng));
    std::vector<double> v(spec.size());
    for (auto &x : v)
      x = hole(rng) ? kUnbounded : val(rng) * std::pow(10.0, dim(rng) - 6);
    const ErrorGrid g(spec, trial % 2 ? GridUnit::dBm : GridUnit::meters2, v);

    const std::string text = grid_to_csv(g);
    const ErrorGrid back = grid_from_csv(text);
    EXPECT_EQ(grid_to_csv(back), text);
    EXPECT_EQ(back.spec, g.spec);
    EXPECT_EQ(back.unit, g.unit);
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      if (is_unbounded(v[i]))
        EXPECT_TRUE(is_unbounded(back.values[i]));
      else
        EXPECT_NEAR(back.values[i], v[i], 5e-9 * std::abs(v[i]));
    }
  }
}

TEST(GridCsv, RejectsMalformed)
{
  EXPECT_THROW(grid_from_csv("# unit=ft\n"), std::invalid_argument);
  EXPECT_THROW(grid_from_csv("# unit=m\n# resolution_m=1\n# nx=2\n# ny=1\n1\n"), std::runtime_error);
  EXPECT_THROW(grid_from_csv("# unit=m\n# resolution_m=1\n# nx=1\n# ny=1\nnan\n"), std::runtime_error);
}

TEST(GridJson, NullForUnbounded)
{
  ErrorGrid g(GridSpec(1.0, 2, 1), GridUnit::meters, {1.5, kUnbounded});
  const auto j = grid_to_json(g, "rss_error");
  EXPECT_EQ(j["kind"], "rss_error");
  EXPECT_EQ(j["unit"], "m");
  EXPECT_EQ(j["nx"], 2);
  EXPECT_EQ(j["ny"], 1);
  EXPECT_EQ(j["values"][0], 1.5);
  EXPECT_TRUE(j["values"][1].is_null());
}
