#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>
#include <random>

#include "zsl/gzsl.hpp"

using namespace zsl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Brute-force AUSUC: evaluate the per-class accuracies at midpoints between
// consecutive distinct critical gammas and accumulate rectangle areas.
double brute_force_ausuc(const ScoreTable& table, const ClassSplit& split) {
    std::vector<double> gammas;
    std::vector<bool> seen_mask;
    const std::set<ClassId> seen_set(split.seen.begin(), split.seen.end());
    for (ClassId id : table.candidate_ids) seen_mask.push_back(seen_set.count(id) > 0);
    for (Index i = 0; i < table.scores.rows(); ++i) {
        double bs = -kInf, bu = -kInf;
        for (Index c = 0; c < table.scores.cols(); ++c)
            (seen_mask[static_cast<std::size_t>(c)] ? bs : bu) =
                std::max(seen_mask[static_cast<std::size_t>(c)] ? bs : bu, table.scores(i, c));
        gammas.push_back(bs - bu);
    }
    std::sort(gammas.begin(), gammas.end());
    gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

    // Evaluation points: below everything, then each critical gamma itself
    // (ties go unseen, so gamma = crit realizes the post-flip state).
    std::vector<double> evals{gammas.front() - 1.0};
    for (double g : gammas) evals.push_back(g);

    double area = 0.0;
    double prev_u = 0.0, first = true;
    double last_u = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (double g : evals) {
        const CalibratedResult r = calibrated_harmonic_mean(table, split, g);
        pts.emplace_back(r.a_u, r.a_s);
    }
    for (std::size_t i = 1; i < pts.size(); ++i)
        area += pts[i].second * (pts[i].first - pts[i - 1].first);
    (void)prev_u;
    (void)first;
    (void)last_u;
    return area;
}

ScoreTable random_table(std::mt19937_64& rng, const ClassSplit& split, Index n) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<ClassId> all = split.seen;
    all.insert(all.end(), split.unseen.begin(), split.unseen.end());
    ScoreTable t;
    t.candidate_ids = all;
    t.scores.resize(n, static_cast<Index>(all.size()));
    for (Index i = 0; i < n; ++i)
        for (Index c = 0; c < t.scores.cols(); ++c) t.scores(i, c) = uni(rng);
    // Ensure both sides appear among the true labels.
    for (Index i = 0; i < n; ++i)
        t.true_labels.push_back(all[static_cast<std::size_t>(i) % all.size()]);
    return t;
}

} // namespace

TEST_CASE("calibrated stacking prediction") {
    Matrix scores(1, 2);
    scores << 0.9, 0.5; // candidate 0 seen, candidate 1 unseen
    const std::vector<ClassId> ids{0, 1};
    const std::vector<bool> mask{true, false};

    CHECK(gzsl_predict(scores, ids, mask, 0.0) == std::vector<ClassId>{0});
    CHECK(gzsl_predict(scores, ids, mask, 0.39) == std::vector<ClassId>{0});
    CHECK(gzsl_predict(scores, ids, mask, 0.4) == std::vector<ClassId>{1}); // tie -> unseen
    CHECK(gzsl_predict(scores, ids, mask, 0.41) == std::vector<ClassId>{1});
    CHECK(gzsl_predict(scores, ids, mask, kInf) == std::vector<ClassId>{1});
    CHECK_THROWS_AS(gzsl_predict(scores, ids, {true, true}, 0.0), DataError);
}

TEST_CASE("suc curve derived examples") {
    ClassSplit split;
    split.seen = {0};
    split.unseen = {1};

    SUBCASE("unseen fixes before seen breaks: area 1") {
        ScoreTable t;
        t.scores.resize(2, 2);
        // seen sample flips wrong at gamma=2; unseen becomes correct at 1.
        t.scores << 2.0, 0.0,
                    1.0, 0.0;
        t.candidate_ids = {0, 1};
        t.true_labels = {0, 1};
        const SUCurve c = suc_curve(t, split);
        REQUIRE(c.points.size() == 3);
        CHECK(c.points[0] == std::pair<double, double>{0.0, 1.0});
        CHECK(c.points[1] == std::pair<double, double>{1.0, 1.0});
        CHECK(c.points[2] == std::pair<double, double>{1.0, 0.0});
        CHECK(c.ausuc == doctest::Approx(1.0));
    }
    SUBCASE("seen breaks before unseen fixes: area 0") {
        ScoreTable t;
        t.scores.resize(2, 2);
        t.scores << 1.0, 0.0,
                    2.0, 0.0;
        t.candidate_ids = {0, 1};
        t.true_labels = {0, 1};
        const SUCurve c = suc_curve(t, split);
        REQUIRE(c.points.size() == 3);
        CHECK(c.points[0] == std::pair<double, double>{0.0, 1.0});
        CHECK(c.points[1] == std::pair<double, double>{0.0, 0.0});
        CHECK(c.points[2] == std::pair<double, double>{1.0, 0.0});
        CHECK(c.ausuc == doctest::Approx(0.0));
    }
    SUBCASE("missing side errors") {
        ScoreTable t;
        t.scores.resize(1, 2);
        t.scores << 1.0, 0.0;
        t.candidate_ids = {0, 1};
        t.true_labels = {0};
        CHECK_THROWS_AS(suc_curve(t, split), DataError);
    }
}

TEST_CASE("ausuc") {
    SUBCASE("degenerate single point") {
        SUCurve c;
        c.points = {{0.0, 0.7}};
        CHECK(ausuc(c) == 0.0);
    }
    SUBCASE("non-monotone curve rejected") {
        SUCurve c;
        c.points = {{0.0, 0.5}, {0.5, 0.8}};
        CHECK_THROWS_AS(ausuc(c), NumericError);
    }
    SUBCASE("positive rescaling leaves ausuc unchanged") {
        ClassSplit split;
        split.seen = {0, 1};
        split.unseen = {2, 3};
        std::mt19937_64 rng(7);
        ScoreTable t = random_table(rng, split, 12);
        const double base = suc_curve(t, split).ausuc;
        t.scores *= 3.5;
        CHECK(suc_curve(t, split).ausuc == doctest::Approx(base));
    }
    SUBCASE("constant score shift leaves ausuc unchanged") {
        ClassSplit split;
        split.seen = {0, 1};
        split.unseen = {2, 3};
        std::mt19937_64 rng(8);
        ScoreTable t = random_table(rng, split, 12);
        const double base = suc_curve(t, split).ausuc;
        t.scores.array() += 2.25;
        CHECK(suc_curve(t, split).ausuc == doctest::Approx(base));
    }
}

TEST_CASE("harmonic mean") {
    CHECK(harmonic_mean(63.9, 37.8) == doctest::Approx(47.5).epsilon(0.002));
    CHECK(harmonic_mean(59.9, 37.8) == doctest::Approx(46.4).epsilon(0.002));
    CHECK(harmonic_mean(0.3, 0.3) == doctest::Approx(0.3));
    CHECK(harmonic_mean(0.0, 0.0) == 0.0);
    CHECK_THROWS_AS(harmonic_mean(-1.0, 0.5), NumericError);
}

TEST_CASE("calibrated harmonic mean") {
    ClassSplit split;
    split.seen = {0, 1};
    split.unseen = {2};
    std::mt19937_64 rng(13);
    const ScoreTable t = random_table(rng, split, 9);

    SUBCASE("gamma = 0 equals the uncalibrated value") {
        const CalibratedResult r = calibrated_harmonic_mean(t, split, 0.0);
        CHECK(r.gamma == 0.0);
        CHECK(r.h == doctest::Approx(harmonic_mean(r.a_s, r.a_u)));
    }
    SUBCASE("swept maximum dominates gamma = 0") {
        const CalibratedResult best = best_harmonic_mean(t, split);
        const CalibratedResult zero = calibrated_harmonic_mean(t, split, 0.0);
        CHECK(best.h >= zero.h);
    }
    SUBCASE("matches exhaustive sweep oracle") {
        const CalibratedResult best = best_harmonic_mean(t, split);
        double brute = -1.0;
        for (double g = -3.0; g <= 3.0; g += 0.001)
            brute = std::max(brute, calibrated_harmonic_mean(t, split, g).h);
        CHECK(best.h == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("exact sweep matches brute force on random instances") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 25; ++trial) {
        ClassSplit split;
        split.seen = {0, 1, 2};
        split.unseen = {3, 4};
        const ScoreTable t = random_table(rng, split, 10 + (trial % 20));
        const SUCurve c = suc_curve(t, split);
        CHECK(c.ausuc == doctest::Approx(brute_force_ausuc(t, split)).epsilon(1e-12));
        for (std::size_t i = 1; i < c.points.size(); ++i) {
            CHECK(c.points[i].first >= c.points[i - 1].first);
            CHECK(c.points[i].second <= c.points[i - 1].second);
        }
        CHECK(c.ausuc >= 0.0);
        CHECK(c.ausuc <= c.points.back().first * c.points.front().second + 1e-12);
    }
}
