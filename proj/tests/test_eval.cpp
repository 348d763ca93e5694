#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "zsl/eval.hpp"

using namespace zsl;

TEST_CASE("per-class accuracy") {
    SUBCASE("all correct") {
        CHECK(per_class_accuracy({0, 1, 0}, {0, 1, 0}, {0, 1}) == 1.0);
    }
    SUBCASE("imbalanced hand count") {
        // class 0: 2/3 correct; class 1: 0/1.
        const std::vector<ClassId> preds{0, 0, 1, 0};
        const std::vector<ClassId> labels{0, 0, 0, 1};
        CHECK(per_class_accuracy(preds, labels, {0, 1}) == doctest::Approx(1.0 / 3.0));
        CHECK(per_sample_accuracy(preds, labels) == doctest::Approx(0.5));
    }
    SUBCASE("class with zero samples") {
        CHECK_THROWS_AS(per_class_accuracy({0}, {0}, {0, 1}), DataError);
    }
    SUBCASE("balanced classes match per-sample") {
        const std::vector<ClassId> preds{0, 1, 1, 0};
        const std::vector<ClassId> labels{0, 0, 1, 1};
        CHECK(per_class_accuracy(preds, labels, {0, 1}) ==
              doctest::Approx(per_sample_accuracy(preds, labels)));
    }
}

TEST_CASE("per-sample accuracy") {
    CHECK(per_sample_accuracy({1, 1}, {0, 0}) == 0.0);
    CHECK_THROWS_AS(per_sample_accuracy({}, {}), DataError);
}

namespace {

ScoreTable make_table() {
    ScoreTable t;
    t.scores.resize(2, 3);
    // sample 0: true label 0 ranked 1st; sample 1: true label 2 ranked 3rd.
    t.scores << 5.0, 2.0, 1.0,
                5.0, 2.0, 1.0;
    t.candidate_ids = {0, 1, 2};
    t.true_labels = {0, 2};
    return t;
}

} // namespace

TEST_CASE("flat hit at k") {
    const ScoreTable t = make_table();
    CHECK(flat_hit_at_k(t, 3) == 1.0);
    CHECK(flat_hit_at_k(t, 2) == doctest::Approx(0.5));
    CHECK(flat_hit_at_k(t, 1) == doctest::Approx(per_sample_accuracy(argmax_labels(t), t.true_labels)));
    CHECK_THROWS_AS(flat_hit_at_k(t, 0), DataError);
    CHECK_THROWS_AS(flat_hit_at_k(t, 4), DataError);

    SUBCASE("non-decreasing in k") {
        double prev = 0.0;
        for (Index k = 1; k <= 3; ++k) {
            const double v = flat_hit_at_k(t, k);
            CHECK(v >= prev);
            prev = v;
        }
    }
    SUBCASE("score ties rank the smaller id first") {
        ScoreTable tie;
        tie.scores.resize(1, 3);
        tie.scores << 1.0, 1.0, 1.0;
        tie.candidate_ids = {7, 3, 5};
        tie.true_labels = {3};
        CHECK(flat_hit_at_k(tie, 1) == 1.0); // id 3 ranks first among equals
        tie.true_labels = {7};
        CHECK(flat_hit_at_k(tie, 1) == 0.0);
        CHECK(flat_hit_at_k(tie, 3) == 1.0);
    }
}

TEST_CASE("hierarchy correct set") {
    LabelHierarchy h;
    h.edges = {{10, 20}, {20, 30}}; // chain 10 - 20 - 30

    SUBCASE("k=1 is the class itself") {
        CHECK(h_correct_set(h, 20, 1, {10, 20, 30}) == std::set<ClassId>{20});
    }
    SUBCASE("invalid middle node is skipped but still traversed") {
        CHECK(h_correct_set(h, 30, 2, {10, 30}) == std::set<ClassId>{30, 10});
    }
    SUBCASE("unreachable k errors with the reachable count") {
        CHECK_THROWS_WITH_AS(h_correct_set(h, 30, 3, {10, 30}),
                             doctest::Contains("only 2 valid nodes reachable"), DataError);
    }
    SUBCASE("true class must be valid") {
        CHECK_THROWS_AS(h_correct_set(h, 20, 1, {10, 30}), DataError);
    }
}

TEST_CASE("hierarchical precision at k") {
    LabelHierarchy chain;
    chain.edges = {{0, 1}, {1, 2}};

    SUBCASE("k=1 with correct argmax") {
        ScoreTable t;
        t.scores.resize(1, 3);
        t.scores << 0.1, 0.9, 0.2;
        t.candidate_ids = {0, 1, 2};
        t.true_labels = {1};
        CHECK(hierarchical_precision_at_k(t, chain, 1) == 1.0);
    }
    SUBCASE("hand-traced chain overlaps") {
        ScoreTable t;
        t.scores.resize(2, 3);
        // sample 0: true 1, top-2 = {0, 2}; correct set at k=2 is {0,1,2}.
        // sample 1: true 0, top-2 = {1, 2}; correct set at k=2 is {0,1}.
        t.scores << 0.8, 0.1, 0.7,
                    0.1, 0.9, 0.8;
        t.candidate_ids = {0, 1, 2};
        t.true_labels = {1, 0};
        CHECK(hierarchical_precision_at_k(t, chain, 2) == doctest::Approx(0.75));
    }
    SUBCASE("star hierarchy at k=1 equals flat hit at 1") {
        LabelHierarchy star;
        star.edges = {{9, 0}, {9, 1}, {9, 2}};
        ScoreTable t = make_table();
        CHECK(hierarchical_precision_at_k(t, star, 1) == doctest::Approx(flat_hit_at_k(t, 1)));
    }
}
