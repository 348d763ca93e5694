#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "zsl/analysis.hpp"
#include "zsl/linalg.hpp"

using namespace zsl;

namespace {

double pearson(const RowVector& a, const RowVector& b) {
    const RowVector x = a.array() - a.mean();
    const RowVector y = b.array() - b.mean();
    return x.dot(y) / (x.norm() * y.norm());
}

} // namespace

TEST_CASE("distance matrix correlation") {
    Matrix d(3, 3);
    d << 0, 1, 2, 1, 0, 3, 2, 3, 0;

    CHECK(distance_matrix_correlation(d, d) == doctest::Approx(1.0));

    SUBCASE("per-row positive affine transforms keep correlation 1") {
        Matrix e = d;
        e.row(0) = 2.0 * d.row(0).array() + 5.0;
        e.row(1) = 0.5 * d.row(1).array() - 1.0;
        e.row(2) = 3.0 * d.row(2).array();
        CHECK(distance_matrix_correlation(d, e) == doctest::Approx(1.0));
    }
    SUBCASE("hand instance matches the scalar formula") {
        Matrix e(3, 3);
        e << 0, 2, 1, 3, 0, 1, 1, 2, 0;
        double expect = 0.0;
        for (Index r = 0; r < 3; ++r) expect += pearson(d.row(r), e.row(r));
        expect /= 3.0;
        CHECK(distance_matrix_correlation(d, e) == doctest::Approx(expect));
    }
    SUBCASE("zero-variance row rejected") {
        Matrix flat = Matrix::Constant(3, 3, 1.0);
        CHECK_THROWS_AS(distance_matrix_correlation(d, flat), NumericError);
    }
    SUBCASE("too few rows rejected") {
        CHECK_THROWS_AS(distance_matrix_correlation(Matrix::Zero(2, 2), Matrix::Zero(2, 2)),
                        NumericError);
    }
}

TEST_CASE("knn overlap") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1, 1);
    Matrix a(10, 4);
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j) a(i, j) = uni(rng);

    CHECK(knn_overlap(a, a, 4) == doctest::Approx(100.0)); // the 40% rule: U=10, k=4
    CHECK_THROWS_AS(knn_overlap(a, a, 0), NumericError);
    CHECK_THROWS_AS(knn_overlap(a, a, 10), NumericError);

    SUBCASE("symmetric in its arguments") {
        Matrix b(10, 3);
        for (Index i = 0; i < b.rows(); ++i)
            for (Index j = 0; j < b.cols(); ++j) b(i, j) = uni(rng);
        CHECK(knn_overlap(a, b, 3) == doctest::Approx(knn_overlap(b, a, 3)));
    }
    SUBCASE("planted 5-point instance matches enumeration") {
        Matrix p(5, 1);
        p << 0.0, 1.0, 2.0, 10.0, 11.0;
        Matrix q(5, 1);
        q << 0.0, 10.0, 2.0, 1.0, 11.0; // points 1 and 3 swapped
        // k=1 neighbors in p: 0->1, 1->0, 2->1, 3->4, 4->3.
        // k=1 neighbors in q: 0->3, 1->4, 2->3, 3->0, 4->1.
        // Overlap: zero matches.
        CHECK(knn_overlap(p, q, 1) == doctest::Approx(0.0));
        // k=2: p: 0->{1,2},1->{0,2},2->{1,0},3->{4,2},4->{3,2};
        //      q: 0->{3,2},1->{4,2}? (|1-10|=9? no: q values 0,10,2,1,11)
        //      q distances from 10: {10,8,9,1} -> {4,2}. row0: {3,2}.
        //      row2 (2): {1(3),2(0)} -> {3,0}; row3 (1): {0,2}; row4 (11): {1,2}.
        // Overlaps: row0 {1,2}&{3,2}=1; row1 {0,2}&{4,2}=1; row2 {1,0}&{3,0}=1;
        //           row3 {4,2}&{0,2}=1; row4 {3,2}&{1,2}=1 -> 50%.
        CHECK(knn_overlap(p, q, 2) == doctest::Approx(50.0));
    }
    SUBCASE("distance ties pick the smaller id") {
        Matrix p(3, 1);
        p << 0.0, 1.0, -1.0; // ids 1 and 2 equidistant from 0
        Matrix q(3, 1);
        q << 0.0, 1.0, 5.0;
        // For row 0, p picks id 1 (tie to smaller), q picks id 1 -> overlap.
        CHECK(knn_overlap(p, q, 1) >= doctest::Approx(100.0 / 3.0));
    }
}

TEST_CASE("classifier variance profile") {
    SUBCASE("rank-1 matrix needs one component") {
        Matrix w(4, 3);
        for (Index i = 0; i < 4; ++i) w.row(i) = double(i) * RowVector::Ones(3);
        CHECK(classifier_variance_profile(w, 0.95) == doctest::Approx(100.0 / 3.0));
        CHECK(classifier_variance_profile(w, 0.5) == doctest::Approx(100.0 / 3.0));
    }
    SUBCASE("isotropic two-component spectrum") {
        Matrix w(4, 3);
        w << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0;
        // Two equal nonzero eigenvalues: threshold 0.95 needs both.
        CHECK(classifier_variance_profile(w, 0.95) == doctest::Approx(200.0 / 3.0));
        CHECK(classifier_variance_profile(w, 0.4) == doctest::Approx(100.0 / 3.0));
    }
    SUBCASE("random instance matches an eigendecomposition oracle") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> uni(-1, 1);
        Matrix w(4, 3);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 3; ++j) w(i, j) = uni(rng);
        const Matrix centered = w.rowwise() - w.colwise().mean();
        Eigen::SelfAdjointEigenSolver<Matrix> es(centered.transpose() * centered);
        Vector ev = es.eigenvalues().reverse();
        const double total = ev.sum();
        double cum = 0.0;
        Index m = 0;
        while (m < ev.size()) {
            cum += ev(m);
            ++m;
            if (cum / total >= 0.9) break;
        }
        CHECK(classifier_variance_profile(w, 0.9) == doctest::Approx(100.0 * double(m) / 3.0));
    }
    SUBCASE("degenerate and invalid inputs") {
        CHECK_THROWS_AS(classifier_variance_profile(Matrix::Zero(3, 3), 0.95), NumericError);
        CHECK_THROWS_AS(classifier_variance_profile(Matrix::Random(3, 3), 1.0), NumericError);
        CHECK_THROWS_AS(classifier_variance_profile(Matrix::Random(3, 3), 0.0), NumericError);
    }
}
