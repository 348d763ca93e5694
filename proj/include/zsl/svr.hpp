#pragma once

#include "zsl/linalg.hpp"
#include "zsl/types.hpp"

namespace zsl {

/// Kernel nu-SVR trained on one scalar target per training class.
/// Primal: min 1/2 ||q||^2 + lambda * (nu * eps + (1/S) * sum(xi + xi')).
struct SvrModel {
    Vector support_coefficients; // alpha_c - alpha_c^*, one per training row
    double bias = 0.0;
    double epsilon = 0.0; // tube half-width recovered at the optimum
    KernelSpec kernel;
    Matrix training_inputs; // S x A
    bool converged = false;
    bool degenerate = false; // identical inputs with distinct targets

    double c_box = 0.0; // per-point dual bound lambda / S
    double dual_objective = 0.0;

    Vector predict(const Matrix& inputs) const;
};

struct SvrOptions {
    double kkt_tolerance = 1e-3;
    Index max_iterations_per_point = 100000; // cap = this * S
};

/// Solves the nu-SVR dual with SMO-style two-coordinate updates and
/// max-violating-pair selection.
SvrModel train_nu_svr(const Matrix& inputs, const Vector& targets, double lambda, double nu,
                      const KernelSpec& kernel, const SvrOptions& options = {});

/// Primal objective of a trained model (for weak-duality checks).
double svr_primal_objective(const SvrModel& model, const Vector& targets, double lambda,
                            double nu);

} // namespace zsl
