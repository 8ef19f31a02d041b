#pragma once

// Exact mildness classification of the stochastic solution and numerical
// refinement probes of the two second-moment integrals M1 and M2.

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fracfield/quad_spec.hpp"
#include "fracfield/symbol.hpp"

namespace fracfield {

struct MildnessVerdict {
  enum class Rule {
    LambdaZeroNotMild,
    AlphaOneN1,
    SubdiffusiveN1AlphaAboveTwoThirds,
    SuperdiffusiveN12,
    NotMildOtherwise,
  };

  bool mild = false;
  Rule rule = Rule::NotMildOtherwise;
  std::string detail;
};

std::string to_string(MildnessVerdict::Rule r);

/// Throws DegenerateParamsError when lambda = mu = 0. The boundary alpha = 2/3 is not mild.
MildnessVerdict classify(const DiffusionParams& params);

enum class MLMap { E_alpha, E_alpha_alpha };

/// L^p(R^N) membership of x -> E_alpha(-|x|^2) (resp. E_{alpha,alpha}): N < 2p (resp. N < 4p)
/// for 0 < alpha < 1, unconditional for 1 <= alpha < 2.
bool lemma_lp_condition(double alpha, int dim, double p, MLMap which);

/// Finiteness of the subdiffusive second moment: N = 1 and alpha > 2/3. Requires 0 < alpha < 1.
bool lemma_b_condition(double alpha, int dim);

/// Finiteness for 1 < alpha < 2: N < 4 - 2/alpha.
bool prop_superdiffusive_condition(double alpha, int dim);

struct ProbeReport {
  enum class Quantity { M1_L1_tail, M2_spacetime };
  enum class Outcome { converges, diverges, inconclusive };

  Quantity quantity = Quantity::M1_L1_tail;
  std::vector<std::pair<double, double>> cutoffs;  // (K, eps); eps is 0 for M1
  std::vector<double> values;
  double tail_exponent_fit = 0.0;  // log-log slope of the increments against the refinement
  bool diverges = false;
  Outcome outcome = Outcome::inconclusive;
  double tol_used = 0.05;
  std::string detail;
};

std::string to_string(ProbeReport::Quantity q);
std::string to_string(ProbeReport::Outcome o);

struct ProbeSchedule {
  std::vector<double> K{1e2, 1e3, 1e4};
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  double tol = 0.05;
};

/// Truncated int_{|xi| <= K} E_alpha(-a(xi) t^alpha) d xi along the K schedule.
ProbeReport probe_m1(const DiffusionParams& params, const KernelSpec& kernel, double t,
                     const ProbeSchedule& schedule = {}, const QuadSpec& quad = {});

/// Truncated sigma^2 (2 pi)^{-N} int_eps^t int_{|xi| <= K} s^{2 alpha - 2} E_{alpha,alpha}(-s^alpha a(xi))^2
/// along the joint (K, eps) schedule.
ProbeReport probe_m2(const DiffusionParams& params, const KernelSpec& kernel, double t,
                     const ProbeSchedule& schedule = {}, const QuadSpec& quad = {});

/// Applies the refinement rule to an arbitrary value sequence; `cutoffs` only feeds the report.
ProbeReport::Outcome judge_refinement(const std::vector<double>& values, double tol, double* slope = nullptr);

nlohmann::json to_json(const MildnessVerdict& v);
nlohmann::json to_json(const ProbeReport& r);

}  // namespace fracfield
