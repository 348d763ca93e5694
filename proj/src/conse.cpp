#include "zsl/conse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zsl/linalg.hpp"

namespace zsl {

namespace {

// Row-wise softmax of x * w^T + bias^T.
Matrix softmax_scores(const Matrix& weights, const Vector& bias, const Matrix& x) {
    Matrix logits = x * weights.transpose();
    logits.rowwise() += bias.transpose();
    const Vector row_max = logits.rowwise().maxCoeff();
    Matrix p = (logits.colwise() - row_max).array().exp();
    const Vector z = p.rowwise().sum();
    return p.array().colwise() / z.array();
}

} // namespace

Matrix conse_probabilities(const ConseModel& model, const Matrix& x) {
    return softmax_scores(model.weights, model.bias, x);
}

ConseObjective conse_objective(const Matrix& weights, const Vector& bias, const Matrix& x,
                               const std::vector<Index>& y, double reg) {
    const Index n = x.rows();
    const Matrix p = softmax_scores(weights, bias, x);

    ConseObjective obj;
    for (Index i = 0; i < n; ++i)
        obj.loss -= std::log(std::max(p(i, y[static_cast<std::size_t>(i)]), 1e-300));
    obj.loss = obj.loss / double(n) + 0.5 * reg * weights.squaredNorm();

    Matrix delta = p; // p - one_hot(y)
    for (Index i = 0; i < n; ++i) delta(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    obj.grad_weights = delta.transpose() * x / double(n) + reg * weights;
    obj.grad_bias = delta.colwise().sum().transpose() / double(n);
    return obj;
}

ConseModel train_conse(const Dataset& dataset, const SemanticMatrix& semantics_seen,
                       const ConseConfig& config) {
    if (config.reg <= 0.0) throw NumericError("train_conse: reg must be positive");
    const auto& seen = dataset.split.seen;
    const Index s = static_cast<Index>(seen.size());
    if (config.top_t < 1 || config.top_t > s)
        throw NumericError("train_conse: top_t outside [1, S]");

    std::vector<Index> seen_pos(static_cast<std::size_t>(dataset.id_map.size()), -1);
    for (Index c = 0; c < s; ++c) seen_pos[static_cast<std::size_t>(seen[c])] = c;

    std::vector<Index> rows;
    std::vector<Index> y;
    for (Index i = 0; i < dataset.num_samples(); ++i) {
        const Index pos = seen_pos[static_cast<std::size_t>(dataset.labels[i])];
        if (pos >= 0) {
            rows.push_back(i);
            y.push_back(pos);
        }
    }
    Matrix x(static_cast<Index>(rows.size()), dataset.num_dims());
    for (Index i = 0; i < x.rows(); ++i) x.row(i) = dataset.features.row(rows[i]);

    ConseModel model;
    model.seen_ids = seen;
    model.top_t = config.top_t;
    if (semantics_seen.rows_for(seen, model.semantics_seen) != s)
        throw DataError("train_conse: semantics missing for a seen class");

    model.weights = Matrix::Zero(s, dataset.num_dims());
    model.bias = Vector::Zero(s);

    double step = 1.0;
    double prev = conse_objective(model.weights, model.bias, x, y, config.reg).loss;
    for (Index it = 0; it < config.max_iterations; ++it) {
        const ConseObjective obj = conse_objective(model.weights, model.bias, x, y, config.reg);
        // Backtracking line search on the full-batch gradient.
        const double g2 = obj.grad_weights.squaredNorm() + obj.grad_bias.squaredNorm();
        Matrix w_new;
        Vector b_new;
        double loss_new = obj.loss;
        while (step > 1e-12) {
            w_new = model.weights - step * obj.grad_weights;
            b_new = model.bias - step * obj.grad_bias;
            loss_new = conse_objective(w_new, b_new, x, y, config.reg).loss;
            if (loss_new <= obj.loss - 1e-4 * step * g2) break;
            step *= 0.5;
        }
        if (step <= 1e-12) break;
        model.weights = w_new;
        model.bias = b_new;
        step *= 2.0;
        if (std::abs(prev - loss_new) <= config.tolerance * std::max(std::abs(prev), 1.0)) {
            model.converged = true;
            break;
        }
        prev = loss_new;
    }
    return model;
}

Prediction predict_conse(const ConseModel& model, const SemanticMatrix& semantics_target,
                         const Matrix& x, const std::vector<ClassId>& restrict_ids) {
    if (restrict_ids.empty()) throw DataError("predict_conse: empty candidate set");
    Matrix a_cand;
    if (semantics_target.rows_for(restrict_ids, a_cand) !=
        static_cast<Index>(restrict_ids.size()))
        throw DataError("predict_conse: semantics missing for a candidate class");

    const Matrix p = conse_probabilities(model, x);
    const Index n = x.rows();
    const Index t = model.top_t;

    Prediction pred;
    pred.candidates = restrict_ids;
    pred.scores.resize(n, static_cast<Index>(restrict_ids.size()));
    pred.labels.resize(static_cast<std::size_t>(n));

    for (Index i = 0; i < n; ++i) {
        // Top-T seen classes by probability, ties to the smaller index.
        std::vector<Index> order(static_cast<std::size_t>(p.cols()));
        std::iota(order.begin(), order.end(), Index(0));
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index b) { return p(i, a) > p(i, b); });

        RowVector embed = RowVector::Zero(model.semantics_seen.cols());
        double mass = 0.0;
        for (Index j = 0; j < t; ++j) {
            const Index c = order[static_cast<std::size_t>(j)];
            embed += p(i, c) * model.semantics_seen.row(c);
            mass += p(i, c);
        }
        embed /= mass; // convex combination of the top-T semantics

        if (semantics_target.exemplar_space) {
            // Exemplar space is not norm-normalized; score by closeness.
            for (Index c = 0; c < a_cand.rows(); ++c)
                pred.scores(i, c) = -(embed - a_cand.row(c)).norm();
        } else {
            const double enorm = embed.norm();
            if (enorm <= 0.0) throw NumericError("predict_conse: zero embedding vector");
            embed /= enorm;
            for (Index c = 0; c < a_cand.rows(); ++c) {
                const double cnorm = a_cand.row(c).norm();
                if (cnorm <= 0.0)
                    throw NumericError("predict_conse: zero candidate semantic vector");
                pred.scores(i, c) = embed.dot(a_cand.row(c)) / cnorm;
            }
        }
        Index best;
        pred.scores.row(i).maxCoeff(&best);
        ClassId best_id = restrict_ids[static_cast<std::size_t>(best)];
        for (Index c = 0; c < pred.scores.cols(); ++c)
            if (pred.scores(i, c) == pred.scores(i, best) &&
                restrict_ids[static_cast<std::size_t>(c)] < best_id)
                best_id = restrict_ids[static_cast<std::size_t>(c)];
        pred.labels[static_cast<std::size_t>(i)] = best_id;
    }
    return pred;
}

} // namespace zsl
