#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracfield/mildness.hpp"
#include "test_util.hpp"

using namespace fracfield;
using Rule = MildnessVerdict::Rule;
using Outcome = ProbeReport::Outcome;

namespace {
DiffusionParams P(double alpha, double lambda, double mu, int dim) { return {alpha, lambda, mu, 1.0, dim}; }
}  // namespace

TEST_CASE("classify examples") {
  const MildnessVerdict v0 = classify(P(0.7, 0.0, 1.0, 1));
  CHECK_FALSE(v0.mild);
  CHECK(v0.rule == Rule::LambdaZeroNotMild);

  CHECK(classify(P(0.8, 1.0, 2.0, 1)).mild);
  CHECK(classify(P(0.8, 1.0, 2.0, 1)).rule == Rule::SubdiffusiveN1AlphaAboveTwoThirds);
  CHECK_FALSE(classify(P(1.5, 1.0, 0.0, 3)).mild);
  CHECK(classify(P(1.0, 1.0, 0.0, 1)).rule == Rule::AlphaOneN1);
  CHECK_FALSE(classify(P(0.5, 1.0, 5.0, 1)).mild);
  CHECK(classify(P(1.5, 1.0, 0.0, 2)).rule == Rule::SuperdiffusiveN12);

  // The threshold is strict.
  CHECK_FALSE(classify(P(2.0 / 3.0, 1.0, 0.0, 1)).mild);
  CHECK(classify(P(std::nextafter(2.0 / 3.0, 1.0), 1.0, 0.0, 1)).mild);

  CHECK_THROWS_AS(classify(P(0.8, 0.0, 0.0, 1)), DegenerateParamsError);
  CHECK_THROWS_AS(classify(P(2.0, 1.0, 0.0, 1)), DomainError);
}

TEST_CASE("ten-case truth table") {
  struct Row {
    double alpha, lambda, mu;
    int dim;
    bool mild;
  };
  const Row rows[] = {
      {0.5, 0.0, 1.0, 1, false}, {1.5, 0.0, 2.0, 3, false}, {1.0, 1.0, 0.0, 1, true},  {1.0, 1.0, 0.5, 2, false},
      {0.5, 1.0, 0.0, 1, false}, {0.8, 1.0, 1.0, 1, true},  {1.5, 1.0, 0.0, 1, true},  {1.5, 2.0, 0.0, 2, true},
      {1.5, 1.0, 3.0, 3, false}, {1.2, 0.0, 1.0, 1, false},
  };
  for (const Row& r : rows) {
    CAPTURE(r.alpha);
    CAPTURE(r.dim);
    const MildnessVerdict v = classify(P(r.alpha, r.lambda, r.mu, r.dim));
    CHECK(v.mild == r.mild);
    if (v.rule == Rule::LambdaZeroNotMild) CHECK_FALSE(v.mild);
  }
}

TEST_CASE("classifier agrees with the lemma composition and ignores mu") {
  for (int i = 1; i <= 19; ++i) {
    const double a = 0.1 * i;
    for (int n = 1; n <= 5; ++n) {
      bool expected;
      if (i < 10) {
        expected = lemma_lp_condition(a, n, 1.0, MLMap::E_alpha) && lemma_b_condition(a, n);
      } else if (i == 10) {
        expected = n == 1;
      } else {
        expected = prop_superdiffusive_condition(a, n);
      }
      for (double mu : {0.0, 1.0, 10.0}) {
        CAPTURE(a);
        CAPTURE(n);
        CHECK(classify(P(a, 1.0, mu, n)).mild == expected);
      }
    }
  }
}

TEST_CASE("lemma predicates") {
  CHECK(lemma_lp_condition(0.5, 1, 1.0, MLMap::E_alpha));
  CHECK_FALSE(lemma_lp_condition(0.5, 2, 1.0, MLMap::E_alpha));
  CHECK(lemma_lp_condition(0.5, 3, 1.0, MLMap::E_alpha_alpha));
  CHECK_FALSE(lemma_lp_condition(0.5, 4, 1.0, MLMap::E_alpha_alpha));
  CHECK(lemma_lp_condition(1.5, 7, 1.0, MLMap::E_alpha));
  CHECK(lemma_lp_condition(1.5, 7, 1.0, MLMap::E_alpha_alpha));

  CHECK(lemma_b_condition(0.8, 1));
  CHECK_FALSE(lemma_b_condition(0.6, 1));
  CHECK_FALSE(lemma_b_condition(0.9, 2));
  CHECK_THROWS_AS(lemma_b_condition(1.2, 1), DomainError);

  CHECK(prop_superdiffusive_condition(1.5, 2));
  CHECK_FALSE(prop_superdiffusive_condition(1.1, 3));
  CHECK(prop_superdiffusive_condition(1.0 + 1e-9, 1));
  CHECK_THROWS_AS(prop_superdiffusive_condition(0.9, 1), DomainError);
}

TEST_CASE("refinement rule on synthetic sequences") {
  double slope = 0.0;
  // Logarithmic growth: constant increments.
  CHECK(judge_refinement({4.6, 6.9, 9.2}, 0.05, &slope) == Outcome::diverges);
  CHECK(std::fabs(slope) < 1e-9);
  // Linear growth in the cutoff.
  CHECK(judge_refinement({1e2, 1e3, 1e4}, 0.05, &slope) == Outcome::diverges);
  CHECK(slope == doctest::Approx(1.0));
  // Growth toward minus infinity.
  CHECK(judge_refinement({-8.1, -12.2, -16.3}, 0.05) == Outcome::diverges);
  // Tail ~ 1/K.
  CHECK(judge_refinement({2.0, 2.09, 2.099}, 0.05, &slope) == Outcome::converges);
  CHECK(slope == doctest::Approx(-1.0));
  // Flat.
  CHECK(judge_refinement({1.0, 1.0, 1.0}, 0.05) == Outcome::converges);
  // Steady increments that are too small to call divergence and too large to ignore.
  CHECK(judge_refinement({100.0, 101.0, 102.0}, 0.05) == Outcome::inconclusive);
  CHECK_THROWS_AS(judge_refinement({1.0, 2.0}, 0.05), DomainError);
}

TEST_CASE("probe_m2 examples") {
  const KernelSpec g = KernelSpec::gaussian(1.0);
  const ProbeReport super = probe_m2(P(1.5, 1.0, 0.0, 1), g, 1.0);
  CHECK_FALSE(super.diverges);
  CHECK(super.outcome == Outcome::converges);
  REQUIRE(super.values.size() == 3);
  REQUIRE(super.cutoffs.size() == 3);

  // alpha = 1: the truncated value plus the missing (0, eps) piece sqrt(eps/(2 pi)) is sqrt(t/(2 pi)).
  const ProbeReport heat = probe_m2(P(1.0, 1.0, 0.0, 1), g, 1.0);
  CHECK(heat.outcome == Outcome::converges);
  const double eps = heat.cutoffs.back().second;
  CHECK(fracfield::testing::rel_err(heat.values.back() + std::sqrt(eps / (2.0 * std::numbers::pi)),
                                    1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-6);

  const ProbeReport sub = probe_m2(P(0.5, 1.0, 0.0, 1), g, 1.0);
  CHECK(sub.diverges);
  // s^{2 alpha - 2 - alpha/2} = s^{-5/4}: increments grow like eps^{-1/4}.
  CHECK(sub.tail_exponent_fit == doctest::Approx(0.25).epsilon(0.02));

  const ProbeReport nonlocal = probe_m2(P(0.5, 0.0, 1.0, 1), g, 1.0);
  CHECK(nonlocal.diverges);

  // sigma scales the reported values by sigma^2 without changing the decision.
  DiffusionParams loud = P(1.5, 1.0, 0.0, 1);
  loud.sigma = 3.0;
  const ProbeReport scaled = probe_m2(loud, g, 1.0);
  CHECK(fracfield::testing::rel_err(scaled.values[2], 9.0 * super.values[2]) < 1e-13);
  CHECK(scaled.outcome == super.outcome);
}

TEST_CASE("probe_m1 examples") {
  const KernelSpec g = KernelSpec::gaussian(1.0);
  const ProbeReport sub = probe_m1(P(0.5, 1.0, 0.0, 1), g, 1.0);
  CHECK(sub.outcome == Outcome::converges);
  CHECK(sub.tail_exponent_fit == doctest::Approx(-1.0).epsilon(0.01));

  const ProbeReport flat = probe_m1(P(0.5, 0.0, 1.0, 1), g, 1.0);
  CHECK(flat.diverges);
  CHECK(flat.tail_exponent_fit == doctest::Approx(1.0).epsilon(0.01));

  // alpha = 1: int exp(-xi^2) = sqrt(pi).
  const ProbeReport heat = probe_m1(P(1.0, 1.0, 0.0, 1), g, 1.0);
  CHECK(fracfield::testing::rel_err(heat.values.back(), std::sqrt(std::numbers::pi)) < 1e-10);

  // 1 < alpha < 2, N = 2: the algebraic tail E_alpha(-x) ~ x^{-1}/Gamma(1-alpha) makes the planar
  // integral grow like log K; each decade adds 2 pi ln(10) / Gamma(-1/2).
  const ProbeReport planar = probe_m1(P(1.5, 1.0, 0.0, 2), g, 1.0);
  CHECK(planar.diverges);
  const double step = planar.values[2] - planar.values[1];
  CHECK(fracfield::testing::rel_err(step, 2.0 * std::numbers::pi * std::log(10.0) / std::tgamma(-0.5)) < 1e-6);

  CHECK_THROWS_AS(probe_m1(P(0.5, 0.0, 0.0, 1), g, 1.0), DegenerateParamsError);
  ProbeSchedule bad;
  bad.K = {1e3, 1e2, 1e4};
  CHECK_THROWS_AS(probe_m1(P(0.5, 1.0, 0.0, 1), g, 1.0, bad), DomainError);
}

TEST_CASE("JSON shapes") {
  const nlohmann::json v = to_json(classify(P(0.5, 0.0, 1.0, 1)));
  CHECK(v["mild"] == false);
  CHECK(v["rule"] == "LambdaZeroNotMild");
  CHECK(v.contains("detail"));

  const nlohmann::json r = to_json(probe_m1(P(0.5, 1.0, 0.0, 1), KernelSpec::gaussian(1.0), 1.0));
  CHECK(r["quantity"] == "M1_L1_tail");
  CHECK(r["cutoffs"].size() == 3);
  CHECK(r["values"].size() == 3);
  CHECK(r["diverges"] == false);
  CHECK(r.contains("tail_exponent_fit"));
}
