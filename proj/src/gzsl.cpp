#include "zsl/gzsl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace zsl {

namespace {

struct SideBest {
    double seen_score = -std::numeric_limits<double>::infinity();
    double unseen_score = -std::numeric_limits<double>::infinity();
    ClassId seen_id = -1;
    ClassId unseen_id = -1;
};

SideBest side_best(const Matrix& scores, Index row, const std::vector<ClassId>& candidate_ids,
                   const std::vector<bool>& seen_mask) {
    SideBest b;
    for (Index c = 0; c < scores.cols(); ++c) {
        const double s = scores(row, c);
        const ClassId id = candidate_ids[static_cast<std::size_t>(c)];
        if (seen_mask[static_cast<std::size_t>(c)]) {
            if (s > b.seen_score || (s == b.seen_score && id < b.seen_id)) {
                b.seen_score = s;
                b.seen_id = id;
            }
        } else {
            if (s > b.unseen_score || (s == b.unseen_score && id < b.unseen_id)) {
                b.unseen_score = s;
                b.unseen_id = id;
            }
        }
    }
    return b;
}

double side_accuracy(const std::vector<ClassId>& preds, const std::vector<ClassId>& labels,
                     const std::set<ClassId>& side) {
    std::vector<ClassId> present;
    for (ClassId c : side)
        if (std::find(labels.begin(), labels.end(), c) != labels.end()) present.push_back(c);
    if (present.empty()) throw DataError("suc_curve: one side of the test set is empty");
    return per_class_accuracy(preds, labels, present);
}

} // namespace

std::vector<ClassId> gzsl_predict(const Matrix& scores,
                                  const std::vector<ClassId>& candidate_ids,
                                  const std::vector<bool>& seen_mask, double gamma) {
    if (candidate_ids.size() != static_cast<std::size_t>(scores.cols()) ||
        seen_mask.size() != candidate_ids.size())
        throw DataError("gzsl_predict: candidate metadata mismatch");
    const bool any_seen = std::find(seen_mask.begin(), seen_mask.end(), true) != seen_mask.end();
    const bool any_unseen =
        std::find(seen_mask.begin(), seen_mask.end(), false) != seen_mask.end();
    if (!any_seen || !any_unseen)
        throw DataError("gzsl_predict: need both seen and unseen candidates");

    std::vector<ClassId> out;
    out.reserve(static_cast<std::size_t>(scores.rows()));
    for (Index i = 0; i < scores.rows(); ++i) {
        const SideBest b = side_best(scores, i, candidate_ids, seen_mask);
        if (std::isinf(gamma) && gamma > 0) {
            out.push_back(b.unseen_id);
            continue;
        }
        // Ties go to the unseen class.
        out.push_back(b.unseen_score >= b.seen_score - gamma ? b.unseen_id : b.seen_id);
    }
    return out;
}

SUCurve suc_curve(const ScoreTable& table, const ClassSplit& split) {
    const Index n = table.scores.rows();
    if (static_cast<Index>(table.true_labels.size()) != n)
        throw DataError("suc_curve: label count mismatch");
    const std::set<ClassId> seen_set(split.seen.begin(), split.seen.end());
    const std::set<ClassId> unseen_set(split.unseen.begin(), split.unseen.end());

    std::vector<bool> seen_mask;
    seen_mask.reserve(table.candidate_ids.size());
    for (ClassId id : table.candidate_ids) seen_mask.push_back(seen_set.count(id) > 0);

    // A sample predicts its best-seen candidate for gamma below its critical
    // value and its best-unseen candidate from the critical value on.
    std::vector<SideBest> best(static_cast<std::size_t>(n));
    std::vector<double> crit(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        best[static_cast<std::size_t>(i)] = side_best(table.scores, i, table.candidate_ids, seen_mask);
        crit[static_cast<std::size_t>(i)] = best[static_cast<std::size_t>(i)].seen_score -
                                            best[static_cast<std::size_t>(i)].unseen_score;
    }

    std::vector<double> gammas(crit.begin(), crit.end());
    std::sort(gammas.begin(), gammas.end());
    gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

    std::vector<ClassId> preds(static_cast<std::size_t>(n));
    auto evaluate = [&](double gamma) {
        for (Index i = 0; i < n; ++i)
            preds[static_cast<std::size_t>(i)] = crit[static_cast<std::size_t>(i)] > gamma
                                                     ? best[static_cast<std::size_t>(i)].seen_id
                                                     : best[static_cast<std::size_t>(i)].unseen_id;
        return std::make_pair(side_accuracy(preds, table.true_labels, unseen_set),
                              side_accuracy(preds, table.true_labels, seen_set));
    };

    SUCurve curve;
    curve.critical_gammas = gammas;
    curve.points.push_back(evaluate(gammas.front() - 1.0)); // all-seen extreme
    for (double g : gammas) curve.points.push_back(evaluate(g));
    curve.ausuc = ausuc(curve);
    return curve;
}

double ausuc(const SUCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& [u0, s0] = curve.points[i - 1];
        const auto& [u1, s1] = curve.points[i];
        if (u1 < u0 - 1e-12 || s1 > s0 + 1e-12)
            throw NumericError("ausuc: staircase monotonicity violated");
        area += s1 * (u1 - u0);
    }
    return area;
}

double harmonic_mean(double a_s, double a_u) {
    if (a_s < 0.0 || a_u < 0.0) throw NumericError("harmonic_mean: negative input");
    if (a_s == 0.0 && a_u == 0.0) return 0.0;
    return 2.0 * a_s * a_u / (a_s + a_u);
}

CalibratedResult calibrated_harmonic_mean(const ScoreTable& table, const ClassSplit& split,
                                          double gamma_star) {
    const std::set<ClassId> seen_set(split.seen.begin(), split.seen.end());
    const std::set<ClassId> unseen_set(split.unseen.begin(), split.unseen.end());
    std::vector<bool> seen_mask;
    for (ClassId id : table.candidate_ids) seen_mask.push_back(seen_set.count(id) > 0);
    const auto preds = gzsl_predict(table.scores, table.candidate_ids, seen_mask, gamma_star);

    CalibratedResult r;
    r.gamma = gamma_star;
    r.a_u = side_accuracy(preds, table.true_labels, unseen_set);
    r.a_s = side_accuracy(preds, table.true_labels, seen_set);
    r.h = harmonic_mean(r.a_s, r.a_u);
    return r;
}

CalibratedResult best_harmonic_mean(const ScoreTable& table, const ClassSplit& split) {
    const SUCurve curve = suc_curve(table, split);
    std::vector<double> candidates = curve.critical_gammas;
    candidates.push_back(0.0);
    candidates.push_back(curve.critical_gammas.front() - 1.0);
    std::sort(candidates.begin(), candidates.end());

    CalibratedResult best;
    best.h = -1.0;
    for (double g : candidates) {
        const CalibratedResult r = calibrated_harmonic_mean(table, split, g);
        if (r.h > best.h) best = r;
    }
    return best;
}

} // namespace zsl
