#include "zsl/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zsl {

Vector SvrModel::predict(const Matrix& inputs) const {
    if (inputs.cols() != training_inputs.cols())
        throw NumericError("SvrModel::predict: dimension mismatch");
    const Matrix k = rbf_kernel(inputs, training_inputs, kernel);
    return (k * support_coefficients).array() + bias;
}

SvrModel train_nu_svr(const Matrix& inputs, const Vector& targets, double lambda, double nu,
                      const KernelSpec& kernel, const SvrOptions& options) {
    const Index s = inputs.rows();
    if (s < 2) throw NumericError("train_nu_svr: need at least 2 training points");
    if (targets.size() != s) throw NumericError("train_nu_svr: target count mismatch");
    if (nu <= 0.0 || nu > 1.0) throw NumericError("train_nu_svr: nu must be in (0,1]");
    if (lambda <= 0.0) throw NumericError("train_nu_svr: lambda must be positive");

    SvrModel model;
    model.kernel = kernel;
    model.training_inputs = inputs;
    model.c_box = lambda / double(s);

    const Matrix k = rbf_kernel(inputs, inputs, kernel);
    const double c = model.c_box;

    // Feasible start: both coefficient vectors share the budget lambda*nu/2.
    Vector alpha = Vector::Zero(s);      // upper-side multipliers
    Vector alpha_star = Vector::Zero(s); // lower-side multipliers
    double remaining = lambda * nu / 2.0;
    for (Index i = 0; i < s; ++i) {
        const double take = std::min(remaining, c);
        alpha(i) = alpha_star(i) = take;
        remaining -= take;
    }

    Vector net = alpha - alpha_star; // all zero at start
    Vector o = k * net;

    const double tol = options.kkt_tolerance;
    const Index cap = options.max_iterations_per_point * s;
    Index iter = 0;
    for (; iter < cap; ++iter) {
        // Max-violating pair in the alpha set (gradient z - o) and in the
        // alpha* set (gradient o - z); pairs must stay within one set to
        // preserve both equality constraints.
        auto select = [&](const Vector& coeff, double sign, Index& i_up, Index& i_low,
                          double& violation) {
            double best_up = -std::numeric_limits<double>::infinity();
            double best_low = std::numeric_limits<double>::infinity();
            i_up = i_low = -1;
            for (Index i = 0; i < s; ++i) {
                const double g = sign * (targets(i) - o(i));
                if (coeff(i) < c - 1e-15 && g > best_up) {
                    best_up = g;
                    i_up = i;
                }
                if (coeff(i) > 1e-15 && g < best_low) {
                    best_low = g;
                    i_low = i;
                }
            }
            violation = (i_up >= 0 && i_low >= 0)
                            ? best_up - best_low
                            : -std::numeric_limits<double>::infinity();
        };

        Index iu, il, ju, jl;
        double viol_a, viol_b;
        select(alpha, +1.0, iu, il, viol_a);
        select(alpha_star, -1.0, ju, jl, viol_b);
        if (std::max(viol_a, viol_b) < tol) {
            model.converged = true;
            break;
        }

        const bool use_alpha = viol_a >= viol_b;
        const Index i = use_alpha ? iu : ju;
        const Index j = use_alpha ? il : jl;
        Vector& coeff = use_alpha ? alpha : alpha_star;
        const double sign = use_alpha ? 1.0 : -1.0;

        const double eta = std::max(k(i, i) + k(j, j) - 2.0 * k(i, j), 1e-12);
        const double g_diff = sign * ((targets(i) - o(i)) - (targets(j) - o(j)));
        double delta = g_diff / eta; // move coeff(i) up, coeff(j) down
        delta = std::min(delta, c - coeff(i));
        delta = std::min(delta, coeff(j));
        if (delta <= 0.0) {
            model.converged = true; // numerically stuck at the boundary
            break;
        }
        coeff(i) += delta;
        coeff(j) -= delta;
        const double net_delta = sign * delta;
        net(i) += net_delta;
        net(j) -= net_delta;
        o += net_delta * (k.col(i) - k.col(j));
    }

    model.support_coefficients = net;
    model.dual_objective = 0.5 * net.dot(k * net) - targets.dot(net);

    // Recover bias and tube width from KKT conditions: z - o = b + eps at
    // free alpha, z - o = b - eps at free alpha*.
    auto recover = [&](const Vector& coeff, double lo_at_bound, double hi_at_bound) {
        double free_sum = 0.0;
        Index free_count = 0;
        double lb = -std::numeric_limits<double>::infinity();
        double ub = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < s; ++i) {
            const double v = targets(i) - o(i);
            if (coeff(i) > 1e-12 && coeff(i) < c - 1e-12) {
                free_sum += v;
                ++free_count;
            } else if (coeff(i) <= 1e-12) {
                if (lo_at_bound > 0) lb = std::max(lb, v);
                else ub = std::min(ub, v);
            } else {
                if (hi_at_bound > 0) lb = std::max(lb, v);
                else ub = std::min(ub, v);
            }
        }
        if (free_count > 0) return free_sum / free_count;
        if (std::isfinite(lb) && std::isfinite(ub)) return 0.5 * (lb + ub);
        if (std::isfinite(lb)) return lb;
        if (std::isfinite(ub)) return ub;
        return 0.0;
    };
    // alpha set: zero coeffs bound r1 from below, capped coeffs from above.
    const double r1 = recover(alpha, +1.0, -1.0);
    // alpha* set: capped coeffs bound r2 from below, zero coeffs from above.
    const double r2 = recover(alpha_star, -1.0, +1.0);
    model.bias = 0.5 * (r1 + r2);
    model.epsilon = std::max(0.5 * (r1 - r2), 0.0);

    // Identical inputs cannot separate distinct targets.
    const double input_spread = sq_euclidean_cross(inputs, inputs).maxCoeff();
    const double target_spread = targets.maxCoeff() - targets.minCoeff();
    if (input_spread < 1e-20 && target_spread > 1e-12) model.degenerate = true;

    return model;
}

double svr_primal_objective(const SvrModel& model, const Vector& targets, double lambda,
                            double nu) {
    const Matrix k = rbf_kernel(model.training_inputs, model.training_inputs, model.kernel);
    const Vector& net = model.support_coefficients;
    const Vector o = k * net;
    const Index s = targets.size();
    double slack = 0.0;
    for (Index i = 0; i < s; ++i) {
        const double f = o(i) + model.bias;
        slack += std::max(0.0, targets(i) - f - model.epsilon);
        slack += std::max(0.0, f - targets(i) - model.epsilon);
    }
    return 0.5 * net.dot(o) + lambda * (nu * model.epsilon + slack / double(s));
}

} // namespace zsl
