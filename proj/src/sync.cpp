#include "zsl/sync.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "zsl/linalg.hpp"

namespace zsl {

SyncLoss sync_loss_from_string(const std::string& s) {
    if (s == "one-vs-other" || s == "ovo") return SyncLoss::OneVsOther;
    if (s == "crammer-singer" || s == "cs") return SyncLoss::CrammerSinger;
    if (s == "structured") return SyncLoss::Structured;
    throw DataError("unknown loss variant: " + s);
}

std::string to_string(SyncLoss loss) {
    switch (loss) {
        case SyncLoss::OneVsOther: return "one-vs-other";
        case SyncLoss::CrammerSinger: return "crammer-singer";
        case SyncLoss::Structured: return "structured";
    }
    return "?";
}

Matrix similarity_weights(const Matrix& a, const Matrix& phantoms_b, double sigma) {
    if (sigma <= 0.0) throw NumericError("similarity_weights: sigma must be positive");
    Matrix logits = sq_euclidean_cross(a, phantoms_b) * (-1.0 / (sigma * sigma));
    for (Index r = 0; r < logits.rows(); ++r) {
        const double m = logits.row(r).maxCoeff();
        RowVector e = (logits.row(r).array() - m).exp();
        logits.row(r) = e / e.sum();
    }
    return logits;
}

Matrix synthesize_classifiers(const Matrix& s, const Matrix& v) {
    if (s.cols() != v.rows())
        throw NumericError("synthesize_classifiers: inner dimensions do not match");
    return s * v;
}

namespace {

struct SeenProblem {
    Matrix x;                  // training samples from seen classes
    std::vector<Index> y;      // index into the seen-class list
    Matrix a_seen;             // S x A seen semantic vectors
    Matrix delta;              // S x S structured-loss margins
};

SeenProblem build_seen_problem(const Dataset& dataset, const SemanticMatrix& semantics,
                               SyncLoss loss) {
    SeenProblem p;
    const auto& seen = dataset.split.seen;
    std::unordered_map<ClassId, Index> seen_pos;
    for (Index i = 0; i < static_cast<Index>(seen.size()); ++i) seen_pos[seen[i]] = i;

    std::vector<Index> rows;
    for (Index n = 0; n < dataset.num_samples(); ++n)
        if (seen_pos.count(dataset.labels[n])) rows.push_back(n);
    p.x.resize(static_cast<Index>(rows.size()), dataset.num_dims());
    p.y.resize(rows.size());
    for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
        p.x.row(i) = dataset.features.row(rows[i]);
        p.y[i] = seen_pos[dataset.labels[rows[i]]];
    }

    semantics.rows_for(seen, p.a_seen);

    const Index s = p.a_seen.rows();
    if (loss == SyncLoss::Structured) {
        p.delta = sq_euclidean_cross(p.a_seen, p.a_seen).cwiseSqrt();
    } else {
        p.delta = Matrix::Ones(s, s) - Matrix::Identity(s, s);
    }
    return p;
}

// Loss over seen data plus gradient with respect to the class scores,
// returned as the gradient with respect to W (S x D).
double loss_and_grad_w(const SeenProblem& p, const Matrix& w, SyncLoss loss, Matrix& grad_w) {
    const Index n = p.x.rows();
    const Index s = w.rows();
    Matrix scores = p.x * w.transpose(); // N x S
    Matrix g_scores = Matrix::Zero(n, s);
    double value = 0.0;

    if (loss == SyncLoss::OneVsOther) {
        for (Index i = 0; i < n; ++i) {
            for (Index c = 0; c < s; ++c) {
                const double ind = (p.y[i] == c) ? 1.0 : -1.0;
                const double margin = 1.0 - ind * scores(i, c);
                if (margin > 0.0) {
                    value += margin * margin;
                    g_scores(i, c) = -2.0 * margin * ind;
                }
            }
        }
    } else {
        for (Index i = 0; i < n; ++i) {
            const Index yi = p.y[i];
            double best = 0.0;
            Index best_c = -1; // -1 encodes the zero branch of the outer max
            for (Index c = 0; c < s; ++c) {
                if (c == yi) continue;
                const double val = p.delta(c, yi) + scores(i, c) - scores(i, yi);
                if (val > best) {
                    best = val;
                    best_c = c;
                }
            }
            if (best_c >= 0) {
                value += best;
                g_scores(i, best_c) += 1.0;
                g_scores(i, yi) -= 1.0;
            }
        }
    }
    grad_w = g_scores.transpose() * p.x;
    return value;
}

// Full training objective (loss + regularizer) and gradient in v, with the
// similarity weights held fixed.
double objective_grad_v(const SeenProblem& p, const Matrix& s_weights, const Matrix& v,
                        const SyncConfig& cfg, Matrix& grad_v) {
    const Matrix w = s_weights * v;
    Matrix grad_w;
    double value = loss_and_grad_w(p, w, cfg.loss_variant, grad_w);
    if (cfg.regularize_bases) {
        value += 0.5 * cfg.lambda * v.squaredNorm();
        grad_v = s_weights.transpose() * grad_w + cfg.lambda * v;
    } else {
        value += 0.5 * cfg.lambda * w.squaredNorm();
        grad_v = s_weights.transpose() * (grad_w + cfg.lambda * w);
    }
    return value;
}

double objective_only_v(const SeenProblem& p, const Matrix& s_weights, const Matrix& v,
                        const SyncConfig& cfg) {
    Matrix grad;
    return objective_grad_v(p, s_weights, v, cfg, grad);
}

void train_v(const SeenProblem& p, const Matrix& s_weights, const SyncConfig& cfg, Matrix& v,
             double& final_obj, Index& iters, bool& converged) {
    converged = false;
    if (cfg.loss_variant == SyncLoss::OneVsOther) {
        // Smooth objective: gradient descent with Armijo backtracking.
        Matrix grad;
        double obj = objective_grad_v(p, s_weights, v, cfg, grad);
        double step = 1.0;
        Index t = 0;
        for (; t < cfg.max_iterations; ++t) {
            const double g2 = grad.squaredNorm();
            if (g2 == 0.0) {
                converged = true;
                break;
            }
            double next_obj = obj;
            Matrix next_v;
            while (true) {
                next_v = v - step * grad;
                next_obj = objective_only_v(p, s_weights, next_v, cfg);
                if (next_obj <= obj - 1e-4 * step * g2) break;
                step *= 0.5;
                if (step < 1e-16) break;
            }
            if (step < 1e-16) break;
            const double rel = std::abs(obj - next_obj) / std::max(1.0, std::abs(obj));
            v = next_v;
            Matrix new_grad;
            obj = objective_grad_v(p, s_weights, v, cfg, new_grad);
            grad = new_grad;
            step *= 2.0;
            if (rel < cfg.tolerance) {
                converged = true;
                ++t;
                break;
            }
        }
        final_obj = obj;
        iters = t;
    } else {
        // Nonsmooth: subgradient method with diminishing step and
        // best-iterate tracking.
        Matrix grad;
        double obj = objective_grad_v(p, s_weights, v, cfg, grad);
        Matrix best_v = v;
        double best_obj = obj;
        double last_check = obj;
        Index t = 1;
        for (; t <= cfg.max_iterations; ++t) {
            const double gnorm = grad.norm();
            if (gnorm == 0.0) {
                converged = true;
                break;
            }
            const double step = cfg.subgradient_step / (std::sqrt(double(t)) * gnorm);
            v -= step * grad;
            obj = objective_grad_v(p, s_weights, v, cfg, grad);
            if (obj < best_obj) {
                best_obj = obj;
                best_v = v;
            }
            if (t % 100 == 0) {
                const double rel =
                    std::abs(last_check - best_obj) / std::max(1.0, std::abs(last_check));
                if (rel < cfg.tolerance) {
                    converged = true;
                    break;
                }
                last_check = best_obj;
            }
        }
        v = best_v;
        final_obj = best_obj;
        iters = std::min(t, cfg.max_iterations);
    }
}

Matrix kmeans_centroids(const Matrix& rows, Index k, std::uint64_t seed,
                        std::vector<Index>* assignment_out) {
    const Index n = rows.rows();
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return double(rng() >> 11) * (1.0 / 9007199254740992.0); // [0,1)
    };

    // k-means++ seeding.
    std::vector<Index> centers;
    centers.push_back(static_cast<Index>(uniform() * n));
    Vector dist2 = (rows.rowwise() - rows.row(centers[0])).rowwise().squaredNorm();
    while (static_cast<Index>(centers.size()) < k) {
        const double total = dist2.sum();
        Index pick = 0;
        if (total > 0.0) {
            double target = uniform() * total;
            for (Index i = 0; i < n; ++i) {
                target -= dist2(i);
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Index>(uniform() * n);
        }
        centers.push_back(pick);
        Vector d = (rows.rowwise() - rows.row(pick)).rowwise().squaredNorm();
        dist2 = dist2.cwiseMin(d);
    }

    Matrix centroids(k, rows.cols());
    for (Index c = 0; c < k; ++c) centroids.row(c) = rows.row(centers[c]);

    std::vector<Index> assign(n, -1);
    for (int round = 0; round < 200; ++round) {
        bool changed = false;
        Matrix d2 = sq_euclidean_cross(rows, centroids);
        for (Index i = 0; i < n; ++i) {
            Index best;
            d2.row(i).minCoeff(&best);
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        Matrix sums = Matrix::Zero(k, rows.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Index i = 0; i < n; ++i) {
            sums.row(assign[i]) += rows.row(i);
            counts(assign[i]) += 1;
        }
        for (Index c = 0; c < k; ++c)
            if (counts(c) > 0) centroids.row(c) = sums.row(c) / counts(c);
        if (!changed) break;
    }
    if (assignment_out) *assignment_out = assign;
    return centroids;
}

} // namespace

PhantomSet init_phantoms(const Matrix& semantics_seen, Index r, PhantomInit strategy,
                         std::uint64_t seed) {
    const Index s = semantics_seen.rows();
    if (r < 1) throw NumericError("init_phantoms: need r >= 1");
    PhantomSet out;
    Matrix beta; // b = beta * semantics_seen

    switch (strategy) {
        case PhantomInit::Identity:
            if (r != s) throw NumericError("init_phantoms: identity strategy requires r == S");
            beta = Matrix::Identity(s, s);
            break;
        case PhantomInit::KMeans: {
            if (r >= s) throw NumericError("init_phantoms: kmeans strategy requires r < S");
            std::vector<Index> assign;
            kmeans_centroids(semantics_seen, r, seed, &assign);
            beta = Matrix::Zero(r, s);
            Eigen::VectorXi counts = Eigen::VectorXi::Zero(r);
            for (Index i = 0; i < s; ++i) counts(assign[i]) += 1;
            for (Index i = 0; i < s; ++i)
                beta(assign[i], i) = 1.0 / counts(assign[i]);
            break;
        }
        case PhantomInit::Mixed: {
            if (r <= s) throw NumericError("init_phantoms: mixed strategy requires r > S");
            beta = Matrix::Zero(r, s);
            beta.topRows(s) = Matrix::Identity(s, s);
            std::mt19937_64 rng(seed);
            for (Index i = s; i < r; ++i) {
                double total = 0.0;
                for (Index c = 0; c < s; ++c) {
                    const double wgt = double(rng() >> 11) * (1.0 / 9007199254740992.0);
                    beta(i, c) = wgt;
                    total += wgt;
                }
                beta.row(i) /= total;
            }
            break;
        }
    }

    Matrix b = beta * semantics_seen;
    for (Index i = 0; i < r; ++i) {
        const double n = b.row(i).norm();
        if (n == 0.0) throw NumericError("init_phantoms: degenerate zero phantom");
        b.row(i) /= n;
        beta.row(i) /= n;
    }
    out.b = std::move(b);
    out.beta = std::move(beta);
    return out;
}

SyncModel train_sync(const Dataset& dataset, const SemanticMatrix& semantics,
                     const SyncConfig& config) {
    if (config.sigma <= 0.0 || config.lambda <= 0.0)
        throw NumericError("train_sync: sigma and lambda must be positive");
    SeenProblem p = build_seen_problem(dataset, semantics, config.loss_variant);
    const Index s = p.a_seen.rows();

    SyncModel model;
    model.config = config;
    const Index r = config.phantom_count > 0 ? config.phantom_count : s;
    PhantomInit strategy = config.init;
    if (config.phantom_count == 0) strategy = PhantomInit::Identity;
    model.phantoms = init_phantoms(p.a_seen, r, strategy, config.seed);
    model.phantoms.v = Matrix::Zero(r, dataset.num_dims());

    const Matrix s_weights = similarity_weights(p.a_seen, model.phantoms.b, config.sigma);
    train_v(p, s_weights, config, model.phantoms.v, model.final_objective, model.iterations,
            model.converged);
    return model;
}

ObjectiveValue sync_objective_and_gradient(const SyncModel& model, const Dataset& dataset,
                                           const SemanticMatrix& semantics) {
    if (model.phantoms.b.size() == 0)
        throw NumericError("sync_objective_and_gradient: phantoms not initialized");
    SeenProblem p = build_seen_problem(dataset, semantics, model.config.loss_variant);
    const Matrix s_weights =
        similarity_weights(p.a_seen, model.phantoms.b, model.config.sigma);
    ObjectiveValue out;
    out.objective =
        objective_grad_v(p, s_weights, model.phantoms.v, model.config, out.grad_v);
    return out;
}

double sync_phantom_objective(const SyncModel& model, const Dataset& dataset,
                              const SemanticMatrix& semantics, const Matrix& beta) {
    SeenProblem p = build_seen_problem(dataset, semantics, model.config.loss_variant);
    const Matrix b = beta * p.a_seen;
    const Matrix s_weights = similarity_weights(p.a_seen, b, model.config.sigma);
    double value = objective_only_v(p, s_weights, model.phantoms.v, model.config);
    value += model.config.eta * beta.cwiseAbs().sum();
    const double h2 = model.config.norm_target * model.config.norm_target;
    for (Index r = 0; r < b.rows(); ++r) {
        const double excess = b.row(r).squaredNorm() - h2;
        value += 0.5 * model.config.gamma_reg * excess * excess;
    }
    return value;
}

namespace {

// Gradient of the smooth part of the phantom objective with respect to beta
// (chain rule through the similarity softmax and b = beta * A_seen).
Matrix beta_smooth_gradient(const SeenProblem& p, const Matrix& beta, const Matrix& v,
                            const SyncConfig& cfg) {
    const Matrix b = beta * p.a_seen;                       // R x A
    const Matrix s_w = similarity_weights(p.a_seen, b, cfg.sigma); // C x R
    const Matrix w = s_w * v;

    Matrix grad_w;
    loss_and_grad_w(p, w, cfg.loss_variant, grad_w);
    if (!cfg.regularize_bases) grad_w += cfg.lambda * w;

    const Matrix g_s = grad_w * v.transpose(); // C x R, d f / d s
    Matrix g_e(g_s.rows(), g_s.cols());        // d f / d logits
    for (Index c = 0; c < g_s.rows(); ++c) {
        const double dot = s_w.row(c).dot(g_s.row(c));
        g_e.row(c) = s_w.row(c).array() * (g_s.row(c).array() - dot);
    }
    const Matrix g_d = g_e * (-1.0 / (cfg.sigma * cfg.sigma)); // d f / d dist^2

    // d dist^2(c,r) / d b_r = 2 (b_r - a_c)
    const Vector col_sums = g_d.colwise().sum();
    Matrix g_b = 2.0 * (col_sums.asDiagonal() * b - g_d.transpose() * p.a_seen);

    const double h2 = cfg.norm_target * cfg.norm_target;
    for (Index r = 0; r < b.rows(); ++r)
        g_b.row(r) += 2.0 * cfg.gamma_reg * (b.row(r).squaredNorm() - h2) * b.row(r);

    return g_b * p.a_seen.transpose(); // R x S
}

Matrix soft_threshold(const Matrix& m, double level) {
    return m.unaryExpr([level](double x) {
        if (x > level) return x - level;
        if (x < -level) return x + level;
        return 0.0;
    });
}

} // namespace

SyncModel learn_phantom_semantics(const Dataset& dataset, const SemanticMatrix& semantics,
                                  const SyncConfig& config) {
    SeenProblem p = build_seen_problem(dataset, semantics, config.loss_variant);

    SyncModel model = train_sync(dataset, semantics, config);
    if (!model.phantoms.beta)
        throw NumericError("learn_phantom_semantics: missing beta initialization");
    Matrix beta = *model.phantoms.beta;

    double joint = sync_phantom_objective(model, dataset, semantics, beta);
    double ista_step = 1.0;

    for (Index outer = 0; outer < config.outer_iterations; ++outer) {
        // Beta step: ISTA with soft-thresholding and backtracking on the
        // full objective.
        for (Index it = 0; it < config.beta_iterations; ++it) {
            const Matrix grad = beta_smooth_gradient(p, beta, model.phantoms.v, config);
            Matrix candidate;
            double cand_obj = joint;
            bool accepted = false;
            while (ista_step > 1e-14) {
                candidate = soft_threshold(beta - ista_step * grad, ista_step * config.eta);
                cand_obj = sync_phantom_objective(model, dataset, semantics, candidate);
                if (cand_obj <= joint) {
                    accepted = true;
                    break;
                }
                ista_step *= 0.5;
            }
            if (!accepted) break;
            beta = candidate;
            joint = cand_obj;
            ista_step *= 2.0;
        }
        model.phantoms.b = beta * p.a_seen;
        model.phantoms.beta = beta;

        // V step on the updated phantoms, warm-started.
        const Matrix s_w = similarity_weights(p.a_seen, model.phantoms.b, config.sigma);
        double v_obj;
        Index v_iters;
        bool v_conv;
        train_v(p, s_w, config, model.phantoms.v, v_obj, v_iters, v_conv);
        model.iterations += v_iters;
        model.converged = v_conv;

        const double new_joint = sync_phantom_objective(model, dataset, semantics, beta);
        const double rel = std::abs(joint - new_joint) / std::max(1.0, std::abs(joint));
        joint = new_joint;
        model.final_objective = joint;
        if (rel < config.outer_tolerance) break;
    }
    model.final_objective = joint;
    return model;
}

Prediction predict_sync(const SyncModel& model, const SemanticMatrix& semantics_target,
                        const Matrix& x, const std::vector<ClassId>& restrict_ids) {
    if (restrict_ids.empty()) throw NumericError("predict_sync: empty candidate set");
    std::vector<ClassId> candidates = restrict_ids;
    std::sort(candidates.begin(), candidates.end());

    Matrix a_target;
    semantics_target.rows_for(candidates, a_target);
    const Matrix s_w = similarity_weights(a_target, model.phantoms.b, model.config.sigma);
    const Matrix w = synthesize_classifiers(s_w, model.phantoms.v);

    Prediction out;
    out.candidates = candidates;
    out.scores = x * w.transpose();
    out.labels.resize(x.rows());
    for (Index n = 0; n < x.rows(); ++n) {
        Index best;
        out.scores.row(n).maxCoeff(&best); // Eigen keeps the first maximum
        out.labels[n] = candidates[best];
    }
    return out;
}

} // namespace zsl
