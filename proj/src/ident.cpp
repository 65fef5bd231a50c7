#include "lpvio/ident.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "lpvio/errors.hpp"

namespace lpvio {

namespace {

int thread_budget(Eigen::Index n_columns) {
    int n = 0;
    if (const char* env = std::getenv("STABLE_LPV_THREADS")) {
        n = std::atoi(env);
        if (n < 1) n = 1;
    } else {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n < 1) n = 1;
    }
    return static_cast<int>(std::min<Eigen::Index>(n, n_columns));
}

Vector simulate_current(const IdentModel& model, const Dataset& data,
                        const std::vector<SchedulingPoint>& sched) {
    return std::visit(
        [&](const auto& m) { return simulate_io(m, data.u, sched).samples; }, model);
}

}  // namespace

Eigen::Index n_params(const IdentModel& m) {
    return std::visit(
        [](const auto& model) -> Eigen::Index {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, StableLpvIoModel>)
                return n_params(model);
            else
                return model.coeffs.n_params();
        },
        m);
}

Vector get_parameters(const IdentModel& m) {
    return std::visit(
        [](const auto& model) -> Vector {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, StableLpvIoModel>)
                return get_parameters(model);
            else
                return get_params(model.coeffs);
        },
        m);
}

void set_parameters(IdentModel& m, const Vector& phi) {
    std::visit(
        [&](auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, StableLpvIoModel>)
                set_parameters(model, phi);
            else
                set_params(model.coeffs, phi);
        },
        m);
}

IdentProblem::IdentProblem(Dataset d, IdentModel m) : data(std::move(d)), model(std::move(m)) {
    if (data.size() < 1) throw std::invalid_argument("IdentProblem: dataset must be nonempty");
    if (data.size() != data.y.size() || data.size() != data.rho.size())
        throw std::invalid_argument("IdentProblem: dataset sequences must have equal length");
}

Vector residuals(IdentProblem& problem, const Vector& phi) {
    set_parameters(problem.model, phi);
    const auto sched = problem.data.scheduling_points();
    return problem.data.y - simulate_current(problem.model, problem.data, sched);
}

double loss(IdentProblem& problem, const Vector& phi) {
    const Vector r = residuals(problem, phi);
    return std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
}

Matrix fd_jacobian(IdentProblem& problem, const Vector& phi, double fd_step) {
    const Eigen::Index n = problem.data.size();
    const Eigen::Index np = phi.size();
    Matrix jac(n, np);

    const int workers = thread_budget(np);
    auto column_range = [&](IdentProblem& local, Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index j = begin; j < end; ++j) {
            const double h = fd_step * (1.0 + std::abs(phi[j]));
            Vector p = phi;
            p[j] += h;
            const Vector rp = residuals(local, p);
            p[j] = phi[j] - h;
            const Vector rm = residuals(local, p);
            jac.col(j) = (rp - rm) / (2.0 * h);
        }
    };

    if (workers <= 1) {
        column_range(problem, 0, np);
        return jac;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const Eigen::Index chunk = (np + workers - 1) / workers;
    std::vector<IdentProblem> clones(static_cast<std::size_t>(workers), problem);
    for (int t = 0; t < workers; ++t) {
        const Eigen::Index begin = t * chunk;
        const Eigen::Index end = std::min(np, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, t, begin, end] {
            column_range(clones[static_cast<std::size_t>(t)], begin, end);
        });
    }
    for (auto& th : pool) th.join();
    return jac;
}

IdentResult lm_fit(IdentProblem& problem, const LmOptions& options) {
    const Eigen::Index n = problem.data.size();
    const Eigen::Index np = n_params(problem.model);
    const double rms_scale = 1.0 / static_cast<double>(n);

    Vector phi = get_parameters(problem.model);
    if (phi.size() != np) throw std::logic_error("lm_fit: inconsistent parameter layout");

    auto rms_of = [&](const Vector& r) { return std::sqrt(r.squaredNorm() * rms_scale); };

    IdentResult result;
    Vector r = residuals(problem, phi);
    double v = rms_of(r);
    double lambda = options.lambda0;

    auto snapshot = [&](int iter, bool accepted) {
        result.loss_trace.push_back({iter, v, lambda, accepted});
        if (const auto* stable = std::get_if<StableLpvIoModel>(&problem.model))
            result.xw_trace.push_back(stable->xw());
    };
    snapshot(0, true);

    std::string termination = "max_iters";
    int iter = 0;
    for (iter = 1; iter <= options.max_iters; ++iter) {
        const Matrix jac = fd_jacobian(problem, phi, options.fd_step);
        const Vector grad = jac.transpose() * r;
        if (grad.norm() <= options.grad_tol) {
            termination = "gradient_tolerance";
            break;
        }
        const Matrix jtj = jac.transpose() * jac;
        Vector damping_scale = jtj.diagonal();
        const double diag_floor = 1e-14 * damping_scale.maxCoeff();
        damping_scale = damping_scale.cwiseMax(diag_floor > 0.0 ? diag_floor : 1e-300);

        bool accepted = false;
        Vector step;
        while (lambda <= 1e14) {
            Matrix lhs = jtj;
            lhs.diagonal() += lambda * damping_scale;
            Eigen::LDLT<Matrix> ldlt(lhs);
            if (ldlt.info() != Eigen::Success) {
                lambda *= options.lambda_up;
                continue;
            }
            step = ldlt.solve(-grad);
            if (!step.allFinite()) {
                lambda *= options.lambda_up;
                continue;
            }
            double v_try = std::numeric_limits<double>::infinity();
            Vector r_try;
            try {
                r_try = residuals(problem, phi + step);
                if (r_try.allFinite()) v_try = rms_of(r_try);
            } catch (const NumericError&) {
                // overflow in simulation or Riccati: treat as a rejected step
            }
            if (v_try < v) {
                const double decrease = v - v_try;
                phi += step;
                r = std::move(r_try);
                v = v_try;
                lambda /= options.lambda_down;
                accepted = true;
                snapshot(iter, true);
                if (decrease <= options.loss_tol) termination = "loss_tolerance";
                break;
            }
            lambda *= options.lambda_up;
        }
        if (!accepted) {
            if (lambda > 1e14)
                termination = "damping_overflow";
            else
                termination = "normal_equation_failure";
            break;
        }
        if (termination == "loss_tolerance") break;
        if (step.norm() <= options.step_tol) {
            termination = "step_tolerance";
            break;
        }
    }

    // leave the problem's model at the optimum
    set_parameters(problem.model, phi);
    result.phi_star = phi;
    result.v_n = v;
    result.iterations = std::min(iter, options.max_iters);
    result.termination = termination;
    return result;
}

double validate(const IdentModel& model, const Vector& phi_star, const Dataset& dataset) {
    if (dataset.size() < 1) throw std::invalid_argument("validate: dataset must be nonempty");
    IdentProblem scratch(dataset, model);
    return loss(scratch, phi_star);
}

}  // namespace lpvio
