// Copyright 2026 The ggpgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ggpgraph/crm.hpp"
#include "oracles.hpp"

using namespace ggpgraph;

namespace {

struct ParamCase {
  double sigma;
  double tau;
};

const std::vector<ParamCase> kGrid = {{-2.0, 0.5}, {-1.0, 1.0}, {-0.3, 2.0}, {0.0, 1.0},
                                      {0.0, 0.2},  {0.2, 1.0},  {0.5, 1.0},  {0.5, 3.0},
                                      {0.8, 0.5},  {0.5, 0.0},  {0.9, 0.0}};

}  // namespace

TEST(ValidateParams, AcceptsRegion) {
  EXPECT_NO_THROW(validate_params(300, 0.5, 1));
  EXPECT_NO_THROW(validate_params(1, 0.5, 0));
  EXPECT_NO_THROW(validate_params(1, -3.0, 0.1));
  EXPECT_NO_THROW(validate_params(1, 0.0, 2.0));
}

TEST(ValidateParams, RejectsOutsideRegion) {
  EXPECT_THROW(validate_params(1, -1, 0), out_of_region);
  EXPECT_THROW(validate_params(1, 0, 0), out_of_region);
  EXPECT_THROW(validate_params(1, 1.0, 1), out_of_region);
  EXPECT_THROW(validate_params(1, 0.5, -0.1), out_of_region);
  EXPECT_THROW(validate_params(0, 0.5, 1), non_positive_alpha);
  EXPECT_THROW(validate_params(-2, 0.5, 1), non_positive_alpha);
  EXPECT_THROW(validate_params(1, std::nan(""), 1), out_of_region);
}

TEST(ValidateParams, PropertyRegionMembership) {
  RngStream rng(7, 0);
  int accepted = 0;
  for (int k = 0; k < 20000; ++k) {
    const double sigma = -3.0 + 5.0 * rng.uniform();
    const double tau = rng.uniform() < 0.2 ? 0.0 : -1.0 + 4.0 * rng.uniform();
    const bool inside = (sigma <= 0 && tau > 0) || (sigma > 0 && sigma < 1 && tau >= 0);
    if (inside) {
      EXPECT_NO_THROW(validate_params(1.0, sigma, tau));
      ++accepted;
    } else {
      EXPECT_THROW(validate_params(1.0, sigma, tau), out_of_region);
    }
  }
  EXPECT_GT(accepted, 1000);
}

TEST(LevyDensity, Values) {
  EXPECT_NEAR(levy_density(validate_params(1, 0, 1), 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(levy_density(validate_params(1, 0.5, 0), 1.0), 0.5641895835477563, 1e-15);
  EXPECT_THROW(levy_density(validate_params(1, 0.5, 0), 0.0), domain_error);
}

TEST(LevyDensity, StrictlyDecreasing) {
  for (const auto& c : kGrid) {
    if (c.sigma < -1.0) continue;  // w^(-1-sigma) increases near zero
    const auto p = validate_params(1, c.sigma, c.tau);
    double prev = levy_density(p, 1e-6);
    for (double w = 2e-6; w < 50; w *= 1.7) {
      const double cur = levy_density(p, w);
      EXPECT_LT(cur, prev);
      prev = cur;
    }
  }
}

TEST(LevyDensity, LogFiniteOverRange) {
  for (const auto& c : kGrid) {
    const auto p = validate_params(1, c.sigma, c.tau);
    for (double w = 1e-300; w < 1e300; w *= 1e10) {
      EXPECT_TRUE(std::isfinite(log_levy_density(p, w))) << c.sigma << " " << c.tau << " " << w;
    }
  }
}

TEST(TailIntensity, ClosedFormExamples) {
  EXPECT_NEAR(tail_intensity(validate_params(1, 0.5, 0), 1.0), 1.1283791670955126, 1e-12);
  EXPECT_NEAR(tail_intensity(validate_params(1, 0.0, 1), 1.0), 0.21938393439552027, 1e-12);
}

TEST(TailIntensity, MatchesQuadrature) {
  for (const auto& c : kGrid) {
    const auto p = validate_params(1, c.sigma, c.tau);
    for (double x : {1e-4, 0.01, 0.3, 1.0, 4.0, 20.0}) {
      const double expected = oracle::integrate_to_inf(
          [&](double w) { return oracle::ggp_density(c.sigma, c.tau, w); }, x);
      EXPECT_NEAR(tail_intensity(p, x) / expected, 1.0, 1e-8)
          << "sigma=" << c.sigma << " tau=" << c.tau << " x=" << x;
    }
  }
}

TEST(TailIntensity, VanishesAtInfinity) {
  for (const auto& c : kGrid) {
    const auto p = validate_params(1, c.sigma, c.tau);
    EXPECT_LT(tail_intensity(p, 1e12), 1e-5);
  }
  EXPECT_THROW(tail_intensity(validate_params(1, 0.5, 1), 0.0), domain_error);
}

TEST(InvTailIntensity, ClosedFormExample) {
  EXPECT_NEAR(inv_tail_intensity(validate_params(1, 0.5, 0), 1.128379), 1.0, 1e-6);
  EXPECT_NEAR(inv_tail_intensity(validate_params(1, 0.5, 0), 1.1283791670955126), 1.0, 1e-8);
}

TEST(InvTailIntensity, RoundTripProperty) {
  RngStream rng(11, 0);
  for (const auto& c : kGrid) {
    const auto p = validate_params(1, c.sigma, c.tau);
    // sigma = 0: rho_bar(x) ~ -log(tau x), so y beyond ~690 needs x < 1e-300
    const double cap = c.sigma < 0 ? levy_total_mass(p) : (c.sigma == 0.0 ? 300.0 : 1e6);
    for (int k = 0; k < 100; ++k) {
      const double y = c.sigma < 0 ? cap * rng.uniform() : std::exp(std::log(1e-8) + rng.uniform() *
                                                                         (std::log(cap) - std::log(1e-8)));
      const double x = inv_tail_intensity(p, y);
      EXPECT_NEAR(tail_intensity(p, x) / y, 1.0, 1e-10) << c.sigma << " " << c.tau << " y=" << y;
    }
  }
}

TEST(InvTailIntensity, MonotoneAndHinted) {
  const auto p = validate_params(1, 0.5, 1);
  double prev = inv_tail_intensity(p, 1e-3);
  for (double y = 2e-3; y < 1e4; y *= 1.9) {
    const double x = inv_tail_intensity(p, y, prev);
    EXPECT_LT(x, prev);
    EXPECT_NEAR(x, inv_tail_intensity(p, y), 1e-12 * x);
    prev = x;
  }
}

TEST(InvTailIntensity, FiniteActivityBound) {
  const auto p = validate_params(1, -1.0, 1.0);
  EXPECT_DOUBLE_EQ(levy_total_mass(p), 1.0);
  EXPECT_THROW(inv_tail_intensity(p, 1.0), not_invertible);
  EXPECT_THROW(inv_tail_intensity(p, 2.0), not_invertible);
  EXPECT_NO_THROW(inv_tail_intensity(p, 0.999));
  EXPECT_THROW(inv_tail_intensity(p, 0.0), domain_error);
}

TEST(LaplaceExponent, Examples) {
  EXPECT_NEAR(laplace_exponent(validate_params(1, 0.5, 1), 3.0), 2.0, 1e-14);
  EXPECT_NEAR(laplace_exponent(validate_params(1, 0.0, 1), std::numbers::e - 1.0), 1.0, 1e-14);
  for (const auto& c : kGrid) {
    EXPECT_EQ(laplace_exponent(validate_params(1, c.sigma, c.tau), 0.0), 0.0);
  }
  EXPECT_THROW(laplace_exponent(validate_params(1, 0.5, 1), -1.0), domain_error);
}

TEST(LaplaceExponent, MatchesQuadrature) {
  for (const auto& c : kGrid) {
    const auto p = validate_params(1, c.sigma, c.tau);
    for (double t : {0.01, 0.5, 1.0, 3.0, 25.0}) {
      auto f = [&](double w) {
        return std::exp(std::log(-std::expm1(-w * t)) + oracle::log_ggp_density(c.sigma, c.tau, w));
      };
      const double expected = oracle::integrate(f, 0.0, 1.0) + oracle::integrate_to_inf(f, 1.0);
      EXPECT_NEAR(laplace_exponent(p, t) / expected, 1.0, 1e-6) << c.sigma << " " << c.tau << " " << t;
    }
  }
}

TEST(Kappa, Examples) {
  const auto p = validate_params(1, 0.5, 1);
  EXPECT_NEAR(kappa(p, 1, 3.0), 0.5, 1e-14);
  EXPECT_NEAR(kappa(p, 2, 3.0), 0.0625, 1e-14);
  EXPECT_THROW(kappa(p, 0, 3.0), domain_error);
  EXPECT_THROW(kappa(validate_params(1, 0.5, 0), 1, 0.0), domain_error);
}

TEST(Kappa, MatchesQuadratureAndDecreases) {
  for (const auto& c : kGrid) {
    const auto p = validate_params(1, c.sigma, c.tau);
    for (int m : {1, 2, 5}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double z : {0.1, 1.0, 3.0, 10.0}) {
        auto f = [&](double w) {
          return std::exp(m * std::log(w) - z * w + oracle::log_ggp_density(c.sigma, c.tau, w));
        };
        const double expected = oracle::integrate(f, 0.0, 1.0) + oracle::integrate_to_inf(f, 1.0);
        const double got = kappa(p, m, z);
        EXPECT_NEAR(got / expected, 1.0, 1e-8) << c.sigma << " " << c.tau << " m=" << m << " z=" << z;
        EXPECT_LT(got, prev);
        prev = got;
      }
    }
  }
}

TEST(MassBelow, MatchesQuadrature) {
  for (const auto& c : kGrid) {
    if (c.sigma < 0) continue;
    const auto p = validate_params(2.0, c.sigma, c.tau);
    for (double eps : {1e-6, 1e-2, 0.5}) {
      const double expected = 2.0 * oracle::integrate(
          [&](double w) { return std::exp(std::log(w) + oracle::log_ggp_density(c.sigma, c.tau, w)); }, 0.0, eps);
      EXPECT_NEAR(mass_below(p, eps) / expected, 1.0, 1e-8);
    }
  }
}

TEST(PositiveStable, LaplaceTransform) {
  RngStream rng(3, 0);
  for (double s : {0.1, 0.5, 0.8}) {
    const int n = 40000;
    for (double t : {0.5, 1.0, 2.0}) {
      std::vector<double> e(n);
      RngStream local = rng.substream(static_cast<std::uint64_t>(s * 100 + t * 10));
      for (auto& v : e) v = std::exp(-t * sample_positive_stable(s, local));
      const auto m = oracle::moments(e);
      EXPECT_NEAR(m.mean, std::exp(-std::pow(t, s)), 4 * m.se) << "s=" << s << " t=" << t;
    }
  }
}

TEST(TiltedStable, LaplaceTransformAcrossBranches) {
  // (log V0, s, lambda) spanning the simple-rejection branch (lambda^s V0 < 1)
  // and both Devroye regimes (gamma < 1 and gamma >= 1).
  struct Case {
    double v0, s, lambda;
  };
  const std::vector<Case> cases = {{0.5, 0.5, 1.0},  {2.0, 0.5, 1.0},   {4.0, 0.5, 1.0},
                                   {600., 0.5, 1.0}, {50.0, 0.2, 3.0},  {5.0, 0.9, 2.0},
                                   {30.0, 0.05, 1.0}, {10.0, 0.7, 40.0}, {1e4, 0.5, 0.01}};
  RngStream rng(5, 1);
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    const int n = 20000;
    std::vector<double> x(n);
    RngStream local = rng.substream(ci);
    for (auto& v : x) v = sample_tilted_stable(std::log(c.v0), c.s, c.lambda, local);
    // choose t so that the transform is O(1): V0 s lambda^(s-1) t ~ 1
    const double mean = c.v0 * c.s * std::pow(c.lambda, c.s - 1.0);
    for (double k : {0.5, 1.0, 2.0}) {
      const double t = k / mean;
      std::vector<double> e(n);
      for (int i = 0; i < n; ++i) e[i] = std::exp(-t * x[i]);
      const auto m = oracle::moments(e);
      const double expected =
          std::exp(-c.v0 * (std::pow(t + c.lambda, c.s) - std::pow(c.lambda, c.s)));
      EXPECT_NEAR(m.mean, expected, 4 * m.se + 1e-12)
          << "V0=" << c.v0 << " s=" << c.s << " lambda=" << c.lambda << " t=" << t;
    }
    const auto mx = oracle::moments(x);
    EXPECT_NEAR(mx.mean, mean, 4 * mx.se) << "case " << ci;
  }
}

TEST(TiltedStable, MatchesDivideAndConquerOracle) {
  // X is infinitely divisible: a sum of k independent copies with V0 / k. For
  // k large each copy is cheap by naive rejection from the positive stable law.
  const double v0 = 40.0, s = 0.5, lambda = 1.0;
  const int k = 80;
  RngStream a(9, 0), b(9, 1);
  const int n = 4000;
  std::vector<double> fast(n), slow(n);
  for (auto& v : fast) v = sample_tilted_stable(std::log(v0), s, lambda, a);
  const double scale = std::pow(v0 / k, 1.0 / s);
  for (auto& v : slow) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      for (;;) {
        const double y = scale * sample_positive_stable(s, b);
        if (b.uniform() <= std::exp(-lambda * y)) {
          sum += y;
          break;
        }
      }
    }
    v = sum;
  }
  EXPECT_GT(oracle::ks_two_sample_p(fast, slow), 0.01);
}

TEST(TotalMass, GammaProcessMean) {
  RngStream rng(21, 0);
  const auto p = validate_params(300, 0.0, 1.0);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_total_mass(p, rng);
  const auto m = oracle::moments(x);
  EXPECT_NEAR(m.mean, 300.0, 3 * m.se);
  EXPECT_NEAR(m.var, 300.0, 0.03 * 300.0);
}

TEST(TotalMass, GgpMean) {
  RngStream rng(22, 0);
  const auto p = validate_params(300, 0.5, 1.0);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_total_mass(p, rng);
  const auto m = oracle::moments(x);
  // E[W*] = alpha tau^(sigma - 1)
  EXPECT_NEAR(m.mean, 300.0, 3 * m.se);
}

TEST(TotalMass, FiniteActivityMean) {
  RngStream rng(23, 0);
  const auto p = validate_params(50, -1.0, 2.0);
  std::vector<double> x(50000);
  for (auto& v : x) v = sample_total_mass(p, rng);
  const auto m = oracle::moments(x);
  EXPECT_NEAR(m.mean, 50.0 * std::pow(2.0, -2.0), 3 * m.se);
}

TEST(TotalMass, LaplaceTransform) {
  RngStream rng(24, 0);
  for (const auto& c : kGrid) {
    const auto p = validate_params(3.0, c.sigma, c.tau);
    std::vector<double> x(20000);
    for (auto& v : x) v = sample_total_mass(p, rng);
    for (double t : {0.5, 1.0, 2.0}) {
      std::vector<double> e(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(-t * x[i]);
      const auto m = oracle::moments(e);
      EXPECT_NEAR(m.mean, std::exp(-3.0 * laplace_exponent(p, t)), 4 * m.se + 1e-12)
          << c.sigma << " " << c.tau << " t=" << t;
    }
  }
}

TEST(TiltedTotalMass, GammaConjugacy) {
  RngStream rng(31, 0);
  const TiltedStableSpec spec(validate_params(20, 0.0, 1.0), 3.0);
  std::vector<double> x(50000);
  for (auto& v : x) v = sample_tilted_total_mass(spec, rng);
  const auto m = oracle::moments(x);
  EXPECT_NEAR(m.mean, 20.0 / 4.0, 3 * m.se);
}

TEST(TiltedTotalMass, TiltingIdentity) {
  RngStream rng(32, 0);
  for (const auto& c : kGrid) {
    for (double tilt : {0.5, 4.0}) {
      const auto base = validate_params(3.0, c.sigma, c.tau);
      const TiltedStableSpec spec(base, tilt);
      std::vector<double> x(10000);
      for (auto& v : x) v = sample_tilted_total_mass(spec, rng);
      for (double t : {0.5, 1.0, 2.0}) {
        std::vector<double> e(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::exp(-t * x[i]);
        const auto m = oracle::moments(e);
        const double expected =
            std::exp(-3.0 * (laplace_exponent(base, t + tilt) - laplace_exponent(base, tilt)));
        EXPECT_NEAR(m.mean, expected, 4 * m.se + 1e-12) << c.sigma << " " << c.tau << " c=" << tilt;
      }
    }
  }
}

TEST(TiltedTotalMass, ZeroTiltMatchesTotalMass) {
  RngStream a(41, 0), b(41, 1);
  const auto p = validate_params(5.0, 0.5, 1.0);
  std::vector<double> x(10000), y(10000);
  for (auto& v : x) v = sample_tilted_total_mass(TiltedStableSpec(p, 0.0), a);
  for (auto& v : y) v = sample_total_mass(p, b);
  EXPECT_GT(oracle::ks_two_sample_p(x, y), 0.01);
  EXPECT_THROW(TiltedStableSpec(p, -1.0), domain_error);
}

TEST(TruncatedPoisson, MeanAtUnitRate) {
  RngStream rng(51, 0);
  std::vector<double> x(100000);
  for (auto& v : x) v = static_cast<double>(sample_truncated_poisson(1.0, rng));
  const auto m = oracle::moments(x);
  EXPECT_NEAR(m.mean, 1.0 / (1.0 - std::exp(-1.0)), 3 * m.se);
}

TEST(TruncatedPoisson, SupportAndSmallRate) {
  RngStream rng(52, 0);
  std::uint64_t min_k = 1000;
  std::uint64_t above_one = 0;
  for (int i = 0; i < 1000000; ++i) {
    min_k = std::min(min_k, sample_truncated_poisson(i % 2 ? 0.3 : 7.0, rng));
    above_one += sample_truncated_poisson(1e-9, rng) > 1;
  }
  EXPECT_GE(min_k, 1u);
  EXPECT_EQ(above_one, 0u);
  EXPECT_THROW(sample_truncated_poisson(0.0, rng), domain_error);
}

TEST(TruncatedPoisson, PmfChiSquare) {
  RngStream rng(53, 0);
  for (double rate : {0.4, 2.5}) {
    const int n = 100000;
    std::vector<double> counts(8, 0.0);
    for (int i = 0; i < n; ++i) {
      const auto k = sample_truncated_poisson(rate, rng);
      counts[std::min<std::uint64_t>(k, 8) - 1] += 1;
    }
    std::vector<double> expected(8, 0.0);
    double tail = 1.0;
    for (int k = 1; k <= 7; ++k) {
      expected[k - 1] = n * std::exp(k * std::log(rate) - rate - std::lgamma(k + 1.0)) / -std::expm1(-rate);
      tail -= expected[k - 1] / n;
    }
    expected[7] = n * tail;
    std::vector<double> obs, exp;
    for (int k = 0; k < 8; ++k) {
      if (expected[k] > 5) {
        obs.push_back(counts[k]);
        exp.push_back(expected[k]);
      }
    }
    EXPECT_GT(oracle::chi_square_p(obs, exp), 0.001) << rate;
  }
}
