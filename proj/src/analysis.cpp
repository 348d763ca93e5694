#include "zsl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

#include "zsl/linalg.hpp"

namespace zsl {

double distance_matrix_correlation(const Matrix& d1, const Matrix& d2) {
    if (d1.rows() != d2.rows() || d1.cols() != d2.cols())
        throw NumericError("distance_matrix_correlation: shape mismatch");
    if (d1.rows() < 3)
        throw NumericError("distance_matrix_correlation: need at least 3 rows");
    double sum = 0.0;
    for (Index r = 0; r < d1.rows(); ++r) {
        const RowVector x = d1.row(r).array() - d1.row(r).mean();
        const RowVector y = d2.row(r).array() - d2.row(r).mean();
        const double sx = x.norm();
        const double sy = y.norm();
        if (sx <= 0.0 || sy <= 0.0)
            throw NumericError("distance_matrix_correlation: zero-variance row " +
                               std::to_string(r));
        sum += x.dot(y) / (sx * sy);
    }
    return sum / double(d1.rows());
}

namespace {

std::vector<Index> k_nearest(const Matrix& d, Index row, Index k) {
    std::vector<Index> order;
    for (Index j = 0; j < d.cols(); ++j)
        if (j != row) order.push_back(j);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return d(row, a) < d(row, b); });
    order.resize(static_cast<std::size_t>(k));
    return order;
}

} // namespace

double knn_overlap(const Matrix& a1, const Matrix& a2, Index k) {
    const Index u = a1.rows();
    if (a2.rows() != u) throw NumericError("knn_overlap: row counts differ");
    if (k < 1 || k > u - 1) throw NumericError("knn_overlap: k outside [1, U-1]");
    const Matrix d1 = sq_euclidean_cross(a1, a1);
    const Matrix d2 = sq_euclidean_cross(a2, a2);
    double sum = 0.0;
    for (Index i = 0; i < u; ++i) {
        const auto n1 = k_nearest(d1, i, k);
        const auto n2 = k_nearest(d2, i, k);
        Index overlap = 0;
        for (Index a : n1)
            if (std::find(n2.begin(), n2.end(), a) != n2.end()) ++overlap;
        sum += 100.0 * double(overlap) / double(k);
    }
    return sum / double(u);
}

double classifier_variance_profile(const Matrix& w, double threshold) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw NumericError("classifier_variance_profile: threshold outside (0,1)");
    const Matrix centered = w.rowwise() - w.colwise().mean();
    Eigen::BDCSVD<Matrix> svd(centered);
    const Vector sv = svd.singularValues();
    const double total = sv.squaredNorm();
    if (total <= 0.0)
        throw NumericError("classifier_variance_profile: degenerate all-zero matrix");
    double cum = 0.0;
    const Index limit = std::min(w.rows(), w.cols());
    for (Index m = 0; m < sv.size(); ++m) {
        cum += sv(m) * sv(m);
        if (cum / total >= threshold) return 100.0 * double(m + 1) / double(limit);
    }
    return 100.0;
}

} // namespace zsl
