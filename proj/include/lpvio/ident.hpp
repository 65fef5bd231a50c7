#pragma once

#include <string>
#include <variant>

#include "lpvio/datagen.hpp"
#include "lpvio/stabparam.hpp"

namespace lpvio {

/// Either the stability-guaranteed model or an unrestricted one; the flat
/// parameter vector is the network/coefficient parameters, followed by
/// (xw.d, xw.off) for the stable variant.
using IdentModel = std::variant<StableLpvIoModel, LpvIoModel>;

Eigen::Index n_params(const IdentModel& m);
Vector get_parameters(const IdentModel& m);
void set_parameters(IdentModel& m, const Vector& phi);

/// Output-error prediction problem: minimize the RMS of y - y_hat(phi) where
/// y_hat is the model simulated over the dataset from zero initial conditions.
struct IdentProblem {
    Dataset data;
    IdentModel model;

    IdentProblem(Dataset d, IdentModel m);
};

struct LmOptions {
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 10.0;
    int max_iters = 200;
    double fd_step = 1e-6;  // relative central-difference step
    double grad_tol = 1e-8;
    double step_tol = 1e-10;
    double loss_tol = 1e-12;
    std::uint64_t seed = 1;
};

struct IterationRecord {
    int iter = 0;
    double loss = 0.0;  // RMS after this iteration
    double lambda = 0.0;
    bool accepted = true;
};

struct IdentResult {
    Vector phi_star;
    double v_n = 0.0;
    std::vector<IterationRecord> loss_trace;  // entry 0 is the initial loss
    std::vector<XwFactor> xw_trace;           // aligned with loss_trace (stable models)
    int iterations = 0;
    std::string termination;
};

/// r_k = y_k - y_hat_k(phi); sets phi on the problem's model (refreshing the
/// stability certificate) before simulating.
Vector residuals(IdentProblem& problem, const Vector& phi);

/// V_N(phi) = sqrt( (1/N) sum r_k^2 ).
double loss(IdentProblem& problem, const Vector& phi);

/// Central differences, column j stepped by fd_step * (1 + |phi_j|). Columns
/// are computed in parallel on cloned problems; STABLE_LPV_THREADS caps the
/// worker count.
Matrix fd_jacobian(IdentProblem& problem, const Vector& phi, double fd_step = 1e-6);

/// Marquardt-scaled damping: solve (J^T J + lambda diag(J^T J)) delta = -J^T r,
/// accept when the loss decreases (lambda /= lambda_down), otherwise reject
/// and retry with lambda *= lambda_up.
IdentResult lm_fit(IdentProblem& problem, const LmOptions& options);

/// Loss of a fitted parameter vector on a held-out dataset, no refitting.
double validate(const IdentModel& model, const Vector& phi_star, const Dataset& dataset);

}  // namespace lpvio
