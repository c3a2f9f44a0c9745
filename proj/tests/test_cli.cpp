#include "beaconplan/cli.hpp"
#include "beaconplan/grid_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace beaconplan;
namespace fs = std::filesystem;

namespace
{

const fs::path kData = BEACONPLAN_TEST_DATA;

struct CliRun
{
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args)
{
  args.insert(args.begin(), "beaconplan");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string read_text(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string &text)
{
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    out.push_back(l);
  return out;
}

std::vector<double> split_numbers(const std::string &line)
{
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');)
    out.push_back(cell == "inf" ? kUnbounded : std::stod(cell));
  return out;
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           (std::string("beaconplan_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config_ = (kData / "table1.json").string();
  fs::path dir_;
};

} // namespace

TEST_F(CliTest, SimulateWritesThreeGrids)
{
  const CliRun r = run({"simulate", "--config", config_, "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char *stem : {"strength", "rss_error", "fused_error"})
  {
    const auto l = lines(read_text(dir_ / (std::string(stem) + ".csv")));
    ASSERT_GE(l.size(), 5u) << stem;
    EXPECT_EQ(l[0], std::string("# unit=") + (std::string(stem) == "strength" ? "dBm" : "m"));
    EXPECT_EQ(l[1], "# resolution_m=0.5");
    EXPECT_EQ(l[2], "# nx=40");
    EXPECT_EQ(l[3], "# ny=20");
    EXPECT_EQ(l.size(), 4u + 20u);
    EXPECT_EQ(split_numbers(l[4]).size(), 40u);
  }
  EXPECT_NE(r.out.find("rss_error mean="), std::string::npos);
  EXPECT_NE(r.out.find("fused_error mean="), std::string::npos);

  const ErrorGrid rss = grid_from_csv(read_text(dir_ / "rss_error.csv"));
  const ErrorGrid fused = grid_from_csv(read_text(dir_ / "fused_error.csv"));
  for (std::size_t c = 0; c < rss.values.size(); ++c)
    EXPECT_LE(fused.values[c], rss.values[c]);
}

TEST_F(CliTest, SimulateJsonAndGridOverride)
{
  const CliRun r = run({"simulate", "--config", config_, "--out", dir_.string(), "--format", "json", "--grid-res", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(read_text(dir_ / "rss_error.json"));
  EXPECT_EQ(doc["nx"], 10);
  EXPECT_EQ(doc["ny"], 5);
  EXPECT_EQ(doc["kind"], "rss_error");
  EXPECT_EQ(doc["format_version"], 1);
}

TEST_F(CliTest, CurvesEightyStepsDominance)
{
  // 80 steps of 0.625 m need a 50 m run; widen the room.
  auto doc = nlohmann::json::parse(read_text(config_));
  doc["floorplan"]["width_m"] = 52.0;
  const fs::path cfg = dir_ / "corridor.json";
  std::ofstream(cfg) << doc.dump(2);
  const CliRun r = run({"curves", "--config", cfg.string(), "--out", dir_.string(), "--start", "1,5", "--heading", "0",
                        "--steps", "80"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(read_text(dir_ / "curves.csv"));
  ASSERT_EQ(l.size(), 81u);
  EXPECT_EQ(l[0], "step,rss_rmse_m,pdr_rmse_m,fused_rmse_m");
  for (std::size_t i = 1; i < l.size(); ++i)
  {
    const auto v = split_numbers(l[i]);
    ASSERT_EQ(v.size(), 4u);
    EXPECT_EQ(v[0], static_cast<double>(i));
    EXPECT_LE(v[3], std::min(v[1], v[2])) << l[i];
  }
}

TEST_F(CliTest, OptimizeTwiceGivesIdenticalHistories)
{
  const fs::path a = dir_ / "a", b = dir_ / "b";
  for (const fs::path &d : {a, b})
  {
    const CliRun r = run({"optimize", "--config", config_, "--out", d.string(), "--max-evals", "300", "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(read_text(a / "history.csv"), read_text(b / "history.csv"));
  EXPECT_EQ(read_text(a / "best_layout.json"), read_text(b / "best_layout.json"));
  EXPECT_EQ(lines(read_text(a / "history.csv")).front(), "eval,current,best,temperature");
  EXPECT_EQ(lines(read_text(a / "history.csv")).size(), 301u);
  const auto best = nlohmann::json::parse(read_text(a / "best_layout.json"));
  EXPECT_EQ(best["beacons"].size(), 4u);
  EXPECT_EQ(best["optimize"]["seed"], 5);
}

TEST_F(CliTest, ValidateWritesReport)
{
  const CliRun r = run({"validate", "--config", config_, "--out", dir_.string(), "--start", "1,5", "--heading", "0",
                        "--steps", "20", "--trials", "500", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = read_text(dir_ / "report.csv");
  EXPECT_NE(text.find("# seed=3\n"), std::string::npos);
  EXPECT_NE(text.find("# trials=500\n"), std::string::npos);
  const auto l = lines(text);
  EXPECT_EQ(l[l.size() - 21], "step,model_rss,model_pdr,model_fused,emp_rss,emp_pdr,emp_fused");

  const fs::path again = dir_ / "again";
  ASSERT_EQ(run({"validate", "--config", config_, "--out", again.string(), "--start", "1,5", "--heading", "0", "--steps",
                 "20", "--trials", "500", "--seed", "3"})
                .code,
            0);
  EXPECT_EQ(read_text(again / "report.csv"), text);
}

TEST_F(CliTest, ExitCodes)
{
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"simulate"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"simulate", "--config", config_, "--format", "xml"}).code, 1);

  const fs::path bad = dir_ / "bad.json";
  std::ofstream(bad) << R"({"floorplan": {"width_m": 10, "height_m": 10}, "channel": {}, "beacons": [{"id": "a", "x_m": 11, "y_m": 1}]})";
  const CliRun v = run({"simulate", "--config", bad.string(), "--out", dir_.string()});
  EXPECT_EQ(v.code, 2);
  EXPECT_NE(v.err.find("beacons[0]"), std::string::npos);

  const fs::path garbled = dir_ / "garbled.json";
  std::ofstream(garbled) << "{ nope";
  EXPECT_EQ(run({"simulate", "--config", garbled.string(), "--out", dir_.string()}).code, 2);

  EXPECT_EQ(run({"curves", "--config", config_, "--out", dir_.string(), "--start", "1,5", "--heading", "0", "--steps",
                 "500"})
                .code,
            2);
  EXPECT_EQ(run({"simulate", "--config", (dir_ / "missing.json").string()}).code, 3);
}
