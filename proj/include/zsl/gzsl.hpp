#pragma once

#include <vector>

#include "zsl/data.hpp"
#include "zsl/eval.hpp"
#include "zsl/types.hpp"

namespace zsl {

struct SUCurve {
    std::vector<double> critical_gammas; // ascending, one per interior point
    // One (a_u, a_s) pair per gamma interval, plus both extremes; points[i]
    // holds the accuracies for gamma in [critical_gammas[i-1], critical_gammas[i]).
    std::vector<std::pair<double, double>> points; // (A_U->T, A_S->T)
    double ausuc = 0.0;
};

/// Calibrated stacking: argmax of f_c - gamma * [c seen]. Exact seen/unseen
/// ties resolve toward the unseen class; remaining ties to smallest id.
/// gamma = +infinity restricts the argmax to unseen candidates.
std::vector<ClassId> gzsl_predict(const Matrix& scores,
                                  const std::vector<ClassId>& candidate_ids,
                                  const std::vector<bool>& seen_mask, double gamma);

/// Exact sweep over all critical gammas; accuracies are per-class.
SUCurve suc_curve(const ScoreTable& table, const ClassSplit& split);

/// Area under the right-continuous staircase (recomputed from the points).
double ausuc(const SUCurve& curve);

/// 2ab/(a+b); 0 when both are 0.
double harmonic_mean(double a_s, double a_u);

struct CalibratedResult {
    double h = 0.0;
    double a_u = 0.0;
    double a_s = 0.0;
    double gamma = 0.0;
};

/// Accuracies and harmonic mean of gzsl_predict at gamma_star.
CalibratedResult calibrated_harmonic_mean(const ScoreTable& table, const ClassSplit& split,
                                          double gamma_star);

/// gamma maximizing the harmonic mean over the curve's critical sweep
/// (gamma = 0 and the extremes included).
CalibratedResult best_harmonic_mean(const ScoreTable& table, const ClassSplit& split);

} // namespace zsl
