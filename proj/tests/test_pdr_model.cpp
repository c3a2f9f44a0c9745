#include "beaconplan/errors.hpp"
#include "beaconplan/pdr_model.hpp"
#include "scenes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace beaconplan;
using namespace beaconplan::test;

namespace
{

// Values printed by tests/oracles/model_oracle.py (direct summation).
constexpr double kSigmaS2 = 0.04485026142167532;
constexpr double kSigmaG2 = 0.01768513913756237;
constexpr double kRmse2 = 0.048211099302002625;
constexpr double kSigmaS3 = 0.04585110668988314;
constexpr double kSigmaG3 = 0.053041254506885224;
constexpr double kSigmaS80 = 32.54585038526719;
constexpr double kSigmaG80 = 35.95430923062408;
constexpr double kRmse80 = 48.49685277986125;
constexpr double kSigmaS80Half = 9.880387086648492;
constexpr double kSigmaG80Half = 25.12082735688873;

PdrParams random_params(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PdrParams p;
  p.step_length = 0.3 + 0.7 * u(rng);
  p.dmax = 0.1 * u(rng);
  p.sigma_sn = 0.2 * u(rng);
  p.step_period = 0.2 + 1.3 * u(rng);
  return p;
}

} // namespace

TEST(HeadingDrift, Examples)
{
  EXPECT_DOUBLE_EQ(heading_drift(table1_pdr(), 1), 0.0);
  EXPECT_DOUBLE_EQ(heading_drift(table1_pdr(1.0), 2), 0.0283);
  EXPECT_NEAR(heading_drift(table1_pdr(0.5), 81), 1.1320, 1e-12);
}

TEST(PdrModel, OracleValuesUnitPeriod)
{
  const PdrParams p = table1_pdr(1.0);
  EXPECT_NEAR(sigma_s(p, 2), kSigmaS2, 1e-12);
  EXPECT_NEAR(sigma_g(p, 2), kSigmaG2, 1e-12);
  EXPECT_NEAR(pdr_rmse(p, 2).rmse, kRmse2, 1e-12);
  EXPECT_NEAR(sigma_s(p, 3), kSigmaS3, 1e-12);
  EXPECT_NEAR(sigma_g(p, 3), kSigmaG3, 1e-12);
  EXPECT_NEAR(sigma_s(p, 80), kSigmaS80, 1e-12);
  EXPECT_NEAR(sigma_g(p, 80), kSigmaG80, 1e-12);
  EXPECT_NEAR(pdr_rmse(p, 80).rmse, kRmse80, 1e-12);

  EXPECT_NEAR(sigma_s(p, 2), 0.044850, 1e-6);
  EXPECT_NEAR(sigma_g(p, 2), 0.017685, 1e-6);
  EXPECT_NEAR(pdr_rmse(p, 2).rmse, 0.048211, 1e-6);
  EXPECT_NEAR(0.625 * (1.0 - std::cos(0.0283)), 2.503e-4, 1e-7);
}

TEST(PdrModel, OracleValuesHalfPeriod)
{
  const PdrParams p = table1_pdr(0.5);
  EXPECT_NEAR(sigma_s(p, 80), kSigmaS80Half, 1e-12);
  EXPECT_NEAR(sigma_g(p, 80), kSigmaG80Half, 1e-12);
}

TEST(PdrModel, ZeroDrift)
{
  PdrParams p = table1_pdr();
  p.dmax = 0.0;
  for (int n : {1, 2, 10, 500})
  {
    EXPECT_EQ(sigma_s(p, n), 0.0446);
    EXPECT_EQ(sigma_g(p, n), 0.0);
    EXPECT_EQ(pdr_rmse(p, n).rmse, 0.0446);
  }
  p.sigma_sn_scaling = SigmaSnScaling::sqrt_n;
  EXPECT_NEAR(sigma_s(p, 9), 3.0 * 0.0446, 1e-15);
}

TEST(PdrModel, SqrtNScaling)
{
  PdrParams p = table1_pdr(1.0);
  p.sigma_sn_scaling = SigmaSnScaling::sqrt_n;
  EXPECT_NEAR(sigma_s(p, 2), kSigmaS2 - 0.0446 + 0.0446 * std::sqrt(2.0), 1e-12);
  EXPECT_DOUBLE_EQ(sigma_g(p, 2), kSigmaG2);
}

TEST(PdrModel, InvalidStepCount)
{
  EXPECT_THROW(sigma_s(table1_pdr(), 0), std::invalid_argument);
  EXPECT_THROW(sigma_g(table1_pdr(), -1), std::invalid_argument);
  EXPECT_THROW(pdr_rmse(table1_pdr(), 0), std::invalid_argument);
}

TEST(PdrParams, Validation)
{
  PdrParams p = table1_pdr();
  EXPECT_NO_THROW(p.validate());
  p.step_length = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = table1_pdr();
  p.dmax = -0.1;
  EXPECT_THROW(p.validate(), ValidationError);
  p = table1_pdr();
  p.step_period = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(PdrModel, NondecreasingWhileDriftBelowQuarterTurn)
{
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 500; ++trial)
  {
    const PdrParams p = random_params(rng);
    double prev_s = sigma_s(p, 1);
    double prev_g = sigma_g(p, 1);
    double prev_r = pdr_rmse(p, 1).rmse;
    for (int n = 2; n <= 400 && heading_drift(p, n) <= std::numbers::pi / 2; ++n)
    {
      const PdrErrorEstimate e = pdr_rmse(p, n);
      EXPECT_GE(e.sigma_s, prev_s);
      EXPECT_GE(e.sigma_g, prev_g);
      if (p.dmax > 0.0)
      {
        EXPECT_GT(e.rmse, prev_r);
      }
      prev_s = e.sigma_s;
      prev_g = e.sigma_g;
      prev_r = e.rmse;
    }
  }
}

TEST(PdrModel, TriangleBounds)
{
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 300; ++trial)
  {
    PdrParams p = random_params(rng);
    p.dmax *= 20.0; // let the drift wrap past a half turn
    for (int n = 1; n <= 300; n += 7)
    {
      EXPECT_LE(std::abs(sigma_g(p, n)), n * p.step_length + 1e-9);
      EXPECT_LE(sigma_s(p, n), 2.0 * n * p.step_length + p.sigma_sn + 1e-9);
      EXPECT_GE(sigma_s(p, n), 0.0);
    }
  }
}

TEST(PdrModel, RmseIsEuclideanCombination)
{
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 1000; ++trial)
  {
    const PdrParams p = random_params(rng);
    const int n = 1 + static_cast<int>(rng() % 200);
    const PdrErrorEstimate e = pdr_rmse(p, n);
    EXPECT_EQ(e.rmse, std::sqrt(e.sigma_s * e.sigma_s + e.sigma_g * e.sigma_g));
    EXPECT_EQ(e.sigma_s, sigma_s(p, n));
    EXPECT_EQ(e.sigma_g, sigma_g(p, n));
  }
}

TEST(PdrModel, DriftToZeroLimit)
{
  PdrParams p = table1_pdr();
  for (double d : {1e-3, 1e-5, 1e-7, 1e-9})
  {
    p.dmax = d;
    EXPECT_NEAR(sigma_g(p, 50), 0.0, 50 * 50 * p.step_length * d);
    EXPECT_NEAR(sigma_s(p, 50), p.sigma_sn, 50 * 50 * 50 * p.step_length * d * d);
  }
}

TEST(PdrTable, MatchesDirectSummation)
{
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial)
  {
    PdrParams p = random_params(rng);
    if (trial % 2)
      p.sigma_sn_scaling = SigmaSnScaling::sqrt_n;
    const PdrTable table(p, 200);
    EXPECT_EQ(table.max_steps(), 200);
    for (int n = 1; n <= 200; ++n)
    {
      const PdrErrorEstimate a = table.at(n);
      const PdrErrorEstimate b = pdr_rmse(p, n);
      EXPECT_NEAR(a.sigma_s, b.sigma_s, 1e-12 * (1.0 + b.sigma_s));
      EXPECT_NEAR(a.sigma_g, b.sigma_g, 1e-12 * (1.0 + b.sigma_g));
      EXPECT_NEAR(a.rmse, b.rmse, 1e-12 * (1.0 + b.rmse));
    }
  }
  const PdrTable table(table1_pdr(1.0), 80);
  EXPECT_NEAR(table.at(80).sigma_s, kSigmaS80, 1e-12);
  EXPECT_THROW(table.at(81), std::out_of_range);
  EXPECT_THROW(table.at(0), std::invalid_argument);
}
