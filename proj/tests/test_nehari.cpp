#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "sdl/nehari.hpp"

using namespace sdl;

namespace {

constexpr double kPi = std::numbers::pi;

const NehariKind kBuiltins[] = {NehariKind::classical_nehari, NehariKind::constant_pi2, NehariKind::pokornyi};

// Companion convex solution for the classical weight.
double classical_convex_u(double x) {
  const double r = std::pow((1 + x) / (1 - x), std::numbers::sqrt2 / 2);
  return 0.5 * std::sqrt((1 - x) * (1 + x)) * (r + 1 / r);
}

}  // namespace

TEST(Builtins, Values) {
  EXPECT_DOUBLE_EQ(builtin_nehari(NehariKind::classical_nehari)(0.0), 1.0);
  EXPECT_NEAR(builtin_nehari(NehariKind::classical_nehari)(0.5), 16.0 / 9, 1e-15);
  EXPECT_NEAR(builtin_nehari(NehariKind::constant_pi2)(0.3), kPi * kPi / 4, 1e-15);
  EXPECT_NEAR(builtin_nehari(NehariKind::constant_pi2)(-0.9), 2.4674011002723395, 1e-15);
  EXPECT_DOUBLE_EQ(builtin_nehari(NehariKind::pokornyi)(0.0), 2.0);
  for (auto k : kBuiltins) {
    const auto p = builtin_nehari(k);
    EXPECT_TRUE(p.flags().even && p.flags().positive && p.flags().decay_nonincreasing &&
                p.flags().monotone_nondecreasing);
    EXPECT_TRUE(verify_flags(p).ok) << p.name();
  }
}

TEST(Builtins, UnknownKind) {
  try {
    builtin_nehari(NehariKind::custom);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownKind);
  }
  try {
    builtin_nehari("koebe");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownKind);
  }
  EXPECT_EQ(builtin_nehari("pi2").kind(), NehariKind::constant_pi2);
}

TEST(Builtins, WeightMatchesPlainEvaluation) {
  for (auto k : kBuiltins) {
    const auto p = builtin_nehari(k);
    for (double t : {0.0, 0.3, -1.2, 4.0}) {
      const double x = std::tanh(t), s = 1 - x * x;
      EXPECT_NEAR(p.weight(t), s * s * p(x), 1e-12) << p.name() << " t=" << t;
    }
  }
}

TEST(Flags, ClaimedFlagsAreVerified) {
  NehariFlags f;
  f.even = true;
  f.positive = true;
  f.monotone_nondecreasing = true;
  const auto odd = NehariFunction::custom("skewed", [](double x) { return 1 + 0.5 * x; }, f);
  const auto check = verify_flags(odd);
  EXPECT_FALSE(check.ok);
  bool saw_even = false, saw_monotone = false;
  for (const auto& i : check.issues) {
    saw_even |= i.flag == "even";
    saw_monotone |= i.flag == "monotone_nondecreasing";
  }
  EXPECT_TRUE(saw_even);
  EXPECT_FALSE(saw_monotone);

  const auto neg = NehariFunction::custom("negative", [](double x) { return x * x - 0.5; }, f);
  EXPECT_FALSE(verify_flags(neg).ok);

  try {
    require_flags(odd, {"even"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisFailed);
  }
  try {
    require_flags(odd, {"decay_nonincreasing"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisFailed);
  }
  EXPECT_NO_THROW(require_flags(builtin_nehari(NehariKind::pokornyi), {"extremal", "monotone_nondecreasing"}));
}

TEST(ExtremalF, ClosedFormsAtHalf) {
  EXPECT_NEAR(extremal_F(builtin_nehari(NehariKind::classical_nehari)).F(0.5), 0.5 * std::log(3.0), 1e-8);
  EXPECT_NEAR(extremal_F(builtin_nehari(NehariKind::constant_pi2)).F(0.5), 2 / kPi, 1e-8);
  EXPECT_NEAR(extremal_F(builtin_nehari(NehariKind::pokornyi)).F(0.5), 0.25 * std::log(3.0) + 0.5 / 1.5, 1e-8);
}

TEST(ExtremalF, ClosedFormsMaxError) {
  for (auto k : kBuiltins) {
    const auto start = std::chrono::steady_clock::now();
    const auto prof = extremal_F(builtin_nehari(k));
    double worst = 0;
    for (int i = 0; i <= 1980; ++i) {
      const double x = -0.99 + 0.001 * i;
      worst = std::max(worst, std::abs(prof.F(x) - closed_form_F(k, x)));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(worst, 1e-7) << to_string(k);
    EXPECT_LT(secs, 1.0) << to_string(k);
  }
}

TEST(ExtremalF, ProfileInvariants) {
  for (auto k : kBuiltins) {
    const auto prof = extremal_F(builtin_nehari(k));
    EXPECT_NEAR(prof.F(0.0), 0.0, 1e-10);
    EXPECT_NEAR(prof.dF(0.0), 1.0, 1e-10);
    double prev = -1e300;
    for (std::size_t i = 0; i < prof.grid().size(); ++i) {
      const double x = prof.grid()[i];
      EXPECT_GT(prof.dF(x), 0);
      EXPECT_GT(prof.node_values()[i], prev);
      prev = prof.node_values()[i];
    }
    for (double x = 0.01; x < 0.999; x += 0.0137) {
      EXPECT_NEAR(prof.F(-x) + prof.F(x), 0.0, 1e-9) << to_string(k) << " x=" << x;
    }
  }
}

TEST(ExtremalF, IndependentSolutionResidual) {
  // u0 F solves the same equation; residual from differentiated interpolants
  // at interval midpoints (the worst place) on |x| <= 0.99.
  for (auto k : kBuiltins) {
    const auto p = builtin_nehari(k);
    const auto prof = extremal_F(p, 1e-3, 1e-12);
    double worst = 0, wx = 0;
    const auto& xs = prof.grid();
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      const double x = 0.5 * (xs[i] + xs[i + 1]);
      if (std::abs(x) > 0.99) continue;
      const double u = prof.u(x), du = prof.du(x), d2u = prof.d2u(x);
      const double F = prof.F(x), dF = prof.dF(x), d2F = prof.d2F(x);
      const double u1pp = d2u * F + 2 * du * dF + u * d2F;
      const double r = std::abs(u1pp + p(x) * u * F);
      if (r > worst) { worst = r; wx = x; }
    }
    EXPECT_LT(worst, 1e-5) << to_string(k) << " at " << wx;
  }
}

TEST(ExtremalF, SchwarzianIsTwiceP) {
  for (auto k : kBuiltins) {
    const auto p = builtin_nehari(k);
    const auto prof = extremal_F(p);
    // S F = (log F')'' - (log F')'^2 / 2 from central differences of
    // log F', Richardson-combined over steps h and h/2.
    auto derivs = [&](double x, double h) {
      const double lm = std::log(prof.dF(x - h)), l0 = std::log(prof.dF(x)), lp = std::log(prof.dF(x + h));
      return std::pair((lp - lm) / (2 * h), (lp - 2 * l0 + lm) / (h * h));
    };
    double worst = 0;
    for (double x = -0.95; x <= 0.95; x += 0.01) {
      const auto [c1, c2] = derivs(x, 2e-3);
      const auto [f1, f2] = derivs(x, 1e-3);
      const double d1 = (4 * f1 - c1) / 3, d2 = (4 * f2 - c2) / 3;
      const double S = d2 - 0.5 * d1 * d1;
      worst = std::max(worst, std::abs(S - 2 * p(x)) / std::max(1.0, 2 * p(x)));
    }
    EXPECT_LT(worst, 1e-4) << to_string(k);
  }
}

TEST(ExtremalF, RejectsOscillatingWeight) {
  const auto p = NehariFunction::constant(kPi * kPi);
  try {
    extremal_F(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DoubleZeroDetected);
    ASSERT_TRUE(e.where());
    EXPECT_NEAR(std::abs(*e.where()), 0.5, 1e-6);
  }
}

TEST(ExtremalF, CsvExport) {
  const auto prof = extremal_F(builtin_nehari(NehariKind::classical_nehari));
  std::ostringstream os;
  write_profile_csv(os, prof);
  const auto s = os.str();
  EXPECT_EQ(s.rfind("x,u,du,F,dF\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')), prof.grid().size() + 1);
}

TEST(ExtremalG, ClassicalClosedForm) {
  const auto prof = extremal_G(builtin_nehari(NehariKind::classical_nehari));
  double worst = 0;
  for (int i = 0; i <= 1980; ++i) {
    const double x = -0.99 + 0.001 * i;
    worst = std::max(worst, std::abs(prof.G(x) - closed_form_G_classical(x)));
  }
  EXPECT_LT(worst, 1e-7);
  EXPECT_EQ(prof.sign(), -1);
}

TEST(ExtremalG, ZeroWeightIsIdentity) {
  const auto prof = extremal_G(NehariFunction::constant(0.0));
  for (double x : {-0.9, -0.3, 0.0, 0.25, 0.8}) EXPECT_NEAR(prof.G(x), x, 1e-10);
}

TEST(ExtremalG, LimitAtOne) {
  const auto prof = extremal_G(builtin_nehari(NehariKind::classical_nehari), 1e-4);
  EXPECT_NEAR(prof.G(prof.hi()), 1 / std::numbers::sqrt2, 2e-3);
  EXPECT_NEAR(prof.limit_at_one(), 1 / std::numbers::sqrt2, 1e-6);
}

TEST(ExtremalG, ConvexSolutionAtLeastOne) {
  for (auto k : kBuiltins) {
    const auto prof = extremal_G(builtin_nehari(k));
    for (double v : prof.base().u()) EXPECT_GE(v, 1.0);
  }
}

TEST(ClosedForm, ClassicalG) {
  EXPECT_EQ(closed_form_G_classical(0.0), 0.0);
  EXPECT_NEAR(closed_form_G_classical(1 - 1e-12), 1 / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(closed_form_G_classical(-0.4), -closed_form_G_classical(0.4), 1e-15);
  const double oracle = quadrature(
      [](double t) {
        const double u = classical_convex_u(t);
        return 1 / (u * u);
      },
      0.0, 0.5, 1e-13);
  EXPECT_NEAR(closed_form_G_classical(0.5), oracle, 1e-9);
  for (double x : {1.0, -1.0, 2.0}) {
    try {
      closed_form_G_classical(x);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DomainError);
    }
  }
}

TEST(ClosedForm, CompanionSolvesMinusEquation) {
  const double h = 1e-4;
  for (double x : {-0.7, 0.0, 0.3, 0.8}) {
    const double um = classical_convex_u(x - h), u0 = classical_convex_u(x), up = classical_convex_u(x + h);
    const double d2 = (up - 2 * u0 + um) / (h * h);
    const double s = 1 - x * x;
    EXPECT_NEAR(d2 - u0 / (s * s), 0.0, 1e-5 * std::max(1.0, u0 / (s * s)));
  }
}

TEST(Disconjugacy, Examples) {
  const auto classical = disconjugacy_check(builtin_nehari(NehariKind::classical_nehari));
  EXPECT_TRUE(classical.ok);
  EXPECT_TRUE(classical.u0_positive);
  EXPECT_EQ(classical.evidence, "numerical evidence");

  const auto osc = disconjugacy_check(NehariFunction::constant(kPi * kPi));
  EXPECT_FALSE(osc.ok);
  ASSERT_TRUE(osc.witness);
  EXPECT_NEAR(osc.witness->first, -0.5, 1e-6);
  EXPECT_NEAR(osc.witness->second, 0.5, 1e-6);

  EXPECT_TRUE(disconjugacy_check(NehariFunction::constant(0.0)).ok);
  EXPECT_TRUE(disconjugacy_check(builtin_nehari(NehariKind::constant_pi2)).ok);
  EXPECT_TRUE(disconjugacy_check(builtin_nehari(NehariKind::pokornyi)).ok);
}

TEST(Disconjugacy, BoundarySolutionWitness) {
  // Odd-shifted weight: u0 may keep its sign on one side, but the solution
  // vanishing at the left end must vanish again.
  NehariFlags f;
  f.positive = true;
  const auto p = NehariFunction::custom("bump", [](double x) { return x > 0 ? 40.0 : 1.0; }, f);
  const auto r = disconjugacy_check(p);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.witness);
  EXPECT_LT(r.witness->first, r.witness->second);
}

TEST(Disconjugacy, ConstantRescaleMonotone) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(0.05, 0.999);
  for (auto k : kBuiltins) {
    const auto p = builtin_nehari(k);
    ASSERT_TRUE(disconjugacy_check(p).ok);
    for (int i = 0; i < 4; ++i) EXPECT_TRUE(disconjugacy_check(p.scaled(c(rng))).ok) << to_string(k);
  }
}

TEST(ExtremalScan, BuiltinsAreExtremal) {
  for (auto k : {NehariKind::classical_nehari, NehariKind::constant_pi2, NehariKind::pokornyi}) {
    const double c = extremal_scan(builtin_nehari(k), 4.0, 14);
    EXPECT_GE(c, 1.0) << to_string(k);
    EXPECT_LE(c, 1.001) << to_string(k);
  }
}

TEST(ExtremalScan, HalfOfPiSquaredQuarter) {
  const double c = extremal_scan(NehariFunction::constant(kPi * kPi / 8), 4.0, 14);
  EXPECT_NEAR(c, 2.0, 1e-3);
}

TEST(ExtremalScan, RejectsNonDisconjugate) {
  try {
    extremal_scan(NehariFunction::constant(kPi * kPi), 2.0, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DoubleZeroDetected);
  }
}

TEST(Growth, Builtins) {
  const auto classical = check_F_growth(extremal_F(builtin_nehari(NehariKind::classical_nehari)));
  EXPECT_TRUE(classical.ok) << classical.detail;
  EXPECT_NEAR(classical.value_at_zero, 1.0, 1e-12);
  EXPECT_NEAR(classical.value_at_end, 1.0, 1e-8);
  for (auto k : {NehariKind::constant_pi2, NehariKind::pokornyi}) {
    const auto r = check_F_growth(extremal_F(builtin_nehari(k)));
    EXPECT_TRUE(r.ok) << to_string(k) << ": " << r.detail;
    EXPECT_NEAR(r.value_at_zero, 1.0, 1e-12);
    EXPECT_GT(r.value_at_end, 1.0);
  }
}

TEST(Growth, RequiresFProfile) {
  const auto g = extremal_G(builtin_nehari(NehariKind::classical_nehari));
  EXPECT_THROW(check_F_growth(g), Error);
}
