#include "lpvio/stabparam.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "lpvio/errors.hpp"

namespace lpvio {

namespace {

Matrix shift_chain(int n) {
    Matrix f = Matrix::Zero(n, n);
    if (n > 1) f.block(1, 0, n - 1, n - 1).setIdentity();
    return f;
}

double min_eigenvalue(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

Matrix XwFactor::matrix() const {
    const int n = dim();
    if (off.size() != static_cast<Eigen::Index>(n) * (n - 1) / 2)
        throw std::invalid_argument("XwFactor: off has wrong length for dimension");
    Matrix x = Matrix::Zero(n, n);
    Eigen::Index at = 0;
    for (int i = 0; i < n; ++i) {
        x(i, i) = std::exp(d[i]);
        for (int j = i + 1; j < n; ++j) x(i, j) = off[at++];
    }
    return x;
}

Matrix XwFactor::gram() const {
    const Matrix x = matrix();
    return x.transpose() * x;
}

XwFactor XwFactor::identity(int n) {
    return XwFactor{Vector::Zero(n), Vector::Zero(static_cast<Eigen::Index>(n) * (n - 1) / 2)};
}

RiccatiSolution solve_structured_riccati(const Matrix& W) {
    const Eigen::Index n = W.rows();
    if (n < 1 || W.cols() != n)
        throw std::invalid_argument("solve_structured_riccati: W must be square and nonempty");
    if (!W.isApprox(W.transpose(), 1e-12))
        throw std::invalid_argument("solve_structured_riccati: W must be symmetric");
    Eigen::LLT<Matrix> llt(W);
    if (llt.info() != Eigen::Success)
        throw NumericError("solve_structured_riccati: W is not positive definite");

    const Matrix F = shift_chain(static_cast<int>(n));
    const double w_norm = W.norm();
    const double tol = 1e-14 * w_norm;

    RiccatiSolution sol;
    Matrix P = W;
    int it = 0;
    for (; it < 10000; ++it) {
        // G picks the first row/column, so G^T P F is row 0 of P F and
        // F^T P G is its transpose by symmetry of P.
        const Matrix PF = P * F;
        const RowVector gpf = PF.row(0);
        const double q = P(0, 0);
        Matrix next = F.transpose() * PF - gpf.transpose() * gpf / q + W;
        next = 0.5 * (next + next.transpose()).eval();
        const double diff = (next - P).norm();
        P = next;
        if (diff < tol) break;
    }
    if (it >= 10000) {
        const Matrix PF = P * F;
        const RowVector gpf = PF.row(0);
        const double res =
            (P - F.transpose() * PF + gpf.transpose() * gpf / P(0, 0) - W).norm();
        throw NumericError("solve_structured_riccati: no convergence after 10000 iterations, "
                           "last residual " + std::to_string(res));
    }

    sol.P = P;
    sol.q = P(0, 0);
    sol.x_q = std::sqrt(sol.q);
    sol.center = (P.row(0) * F) / sol.q;
    const Matrix PF = P * F;
    const RowVector gpf = PF.row(0);
    sol.residual_norm = (P - F.transpose() * PF + gpf.transpose() * gpf / sol.q - W).norm();
    sol.iterations = it + 1;
    return sol;
}

Matrix riccati_closed_form_2x2(const Matrix& W) {
    if (W.rows() != 2 || W.cols() != 2)
        throw std::invalid_argument("riccati_closed_form_2x2: W must be 2x2");
    const double s = W(0, 0) + W(1, 1);
    const double disc = s * s - 4.0 * W(0, 1) * W(0, 1);
    if (disc < 0.0)
        throw std::logic_error("riccati_closed_form_2x2: negative discriminant; W not PD");
    Matrix P(2, 2);
    P(0, 0) = 0.5 * (s + std::sqrt(disc));
    P(0, 1) = P(1, 0) = W(0, 1);
    P(1, 1) = W(1, 1);
    return P;
}

RowVector cayley_row(double x_m, const Vector& z_m) {
    if (x_m == 0.0) throw std::invalid_argument("cayley_row: x_m must be nonzero");
    const double n = x_m * x_m + z_m.squaredNorm();
    RowVector m(1 + z_m.size());
    m[0] = (1.0 - n) / (1.0 + n);
    if (z_m.size() > 0) m.tail(z_m.size()) = -2.0 * z_m.transpose() / (1.0 + n);
    return m;
}

RowVector k_from_m(const RowVector& M, const RiccatiSolution& sol, const XwFactor& xw) {
    return sol.center + (M * xw.matrix()) / sol.x_q;
}

StableLpvIoModel::StableLpvIoModel(LpvIoStructure st, CoefficientFunction net, XwFactor xw)
    : structure_(st), net_(std::move(net)), xw_(std::move(xw)) {
    if (structure_.n_a < 1)
        throw std::invalid_argument("StableLpvIoModel: n_a must be >= 1");
    if (net_.output_dim() != structure_.n_a + structure_.n_b)
        throw std::invalid_argument(
            "StableLpvIoModel: network must produce n_a + n_b outputs "
            "(raw_x_m, z_m, l, b0)");
    if (xw_.dim() != structure_.n_a)
        throw std::invalid_argument("StableLpvIoModel: X_W dimension must equal n_a");
    refresh_certificate(*this);
}

void StableLpvIoModel::set_xw(XwFactor xw) {
    if (xw.dim() != structure_.n_a)
        throw std::invalid_argument("StableLpvIoModel::set_xw: dimension mismatch");
    xw_ = std::move(xw);
    fresh_ = false;
}

const RiccatiSolution& StableLpvIoModel::certificate() const {
    if (!fresh_)
        throw std::logic_error("StableLpvIoModel: certificate is stale; call refresh_certificate");
    return cert_;
}

const RiccatiSolution& refresh_certificate(StableLpvIoModel& m) {
    m.cert_ = solve_structured_riccati(m.xw_.gram());
    m.fresh_ = true;
    return m.cert_;
}

TransformedCoeffs transformed_coeffs(const StableLpvIoModel& m, const SchedulingPoint& rho) {
    const int na = m.structure().n_a;
    const int nb = m.structure().n_b;
    const Vector out = forward(m.net(), rho);
    TransformedCoeffs t;
    t.x_m = std::exp(out[0]);
    t.z_m = out.segment(1, na - 1);
    t.l = out.segment(na, nb - 1);
    t.b0 = out[na + nb - 1];
    return t;
}

CoefficientVector eval_stable_coeffs(const StableLpvIoModel& m, const SchedulingPoint& rho) {
    const TransformedCoeffs t = transformed_coeffs(m, rho);
    const RowVector M = cayley_row(t.x_m, t.z_m);
    const RowVector K = k_from_m(M, m.certificate(), m.xw());
    CoefficientVector c;
    c.a = K.transpose();
    c.b.resize(m.structure().n_b);
    c.b[0] = t.b0;
    if (t.l.size() > 0) c.b.tail(t.l.size()) = t.l;
    return c;
}

Eigen::Index n_params(const StableLpvIoModel& m) {
    return m.net().n_params() + m.xw().n_params();
}

Vector get_parameters(const StableLpvIoModel& m) {
    Vector phi(n_params(m));
    phi.head(m.net().n_params()) = get_params(m.net());
    phi.segment(m.net().n_params(), m.xw().d.size()) = m.xw().d;
    phi.tail(m.xw().off.size()) = m.xw().off;
    return phi;
}

void set_parameters(StableLpvIoModel& m, const Vector& phi) {
    if (phi.size() != n_params(m))
        throw std::invalid_argument("set_parameters: parameter vector length mismatch");
    set_params(m.net(), phi.head(m.net().n_params()));
    XwFactor xw = m.xw();
    xw.d = phi.segment(m.net().n_params(), xw.d.size());
    xw.off = phi.tail(xw.off.size());
    m.set_xw(std::move(xw));
    refresh_certificate(m);
}

CoefficientMap coefficient_map(const StableLpvIoModel& m) {
    return [m](const SchedulingPoint& rho) { return eval_stable_coeffs(m, rho); };
}

std::function<RowVector(const SchedulingPoint&)> k_function(const StableLpvIoModel& m) {
    return [m](const SchedulingPoint& rho) {
        return RowVector(eval_stable_coeffs(m, rho).a.transpose());
    };
}

std::function<RowVector(const SchedulingPoint&)> l_function(const StableLpvIoModel& m) {
    return [m](const SchedulingPoint& rho) {
        const CoefficientVector c = eval_stable_coeffs(m, rho);
        return RowVector(c.b.tail(m.structure().n_b - 1).transpose());
    };
}

SignalSequence simulate_io(const StableLpvIoModel& m, const SignalSequence& u,
                           const std::vector<SchedulingPoint>& rho, const Vector& y_init,
                           const Vector& u_init) {
    return simulate_io(m.structure(), coefficient_map(m), u, rho, y_init, u_init);
}

MaxStateSpace build_max_ss(const StableLpvIoModel& m) {
    return build_max_ss(m.structure(), coefficient_map(m));
}

Matrix full_lyapunov(const RiccatiSolution& sol,
                     const std::function<RowVector(const SchedulingPoint&)>& K,
                     const std::function<RowVector(const SchedulingPoint&)>& L,
                     const LpvIoStructure& st, const std::vector<SchedulingPoint>& grid) {
    if (st.n_b == 1) return sol.P;
    if (grid.empty()) throw std::invalid_argument("full_lyapunov: grid must be nonempty");

    const int na = st.n_a;
    const int nb1 = st.n_b - 1;
    const Matrix F = shift_chain(na);
    const Matrix Fb = shift_chain(nb1);
    Vector G = Vector::Zero(na);
    G[0] = 1.0;
    Vector Gb = Vector::Zero(nb1);
    Gb[0] = 1.0;
    const Matrix& P = sol.P;

    // Bounds over the grid: with the off-diagonal block of the certificate set
    // to zero, Q12(rho) = -(F - G K)^T P G L(rho) and the Schur complement
    // needs P22 - Fb^T P22 Fb to dominate lambda + kappa-coupling.
    double kappa = 0.0, lambda_b = 0.0, mu = 0.0;
    for (const auto& p : grid) {
        const RowVector k = K(p);
        const RowVector l = L(p);
        const Matrix acl = F - G * k;
        const Matrix q11 = P - acl.transpose() * P * acl;
        const double lmin = min_eigenvalue(q11);
        if (lmin <= 0.0)
            throw NumericError("full_lyapunov: P does not certify the output recursion at a "
                               "grid point (min eigenvalue " + std::to_string(lmin) + ")");
        mu = std::max(mu, 1.0 / lmin);
        const Matrix q12 = -acl.transpose() * (P * G) * l;
        kappa = std::max(kappa, spectral_norm(q12));
        lambda_b = std::max(lambda_b, sol.q * l.squaredNorm());
    }

    auto assemble = [&](double alpha) {
        Matrix p22 = Matrix::Zero(nb1, nb1);
        for (int i = 0; i < nb1; ++i) p22(i, i) = alpha * (nb1 - i);
        Matrix pf = Matrix::Zero(na + nb1, na + nb1);
        pf.topLeftCorner(na, na) = P;
        pf.bottomRightCorner(nb1, nb1) = p22;
        return pf;
    };
    auto certifies = [&](const Matrix& pf) {
        for (const auto& p : grid) {
            Matrix a = Matrix::Zero(na + nb1, na + nb1);
            a.topLeftCorner(na, na) = F - G * K(p);
            a.topRightCorner(na, nb1) = G * L(p);
            a.bottomRightCorner(nb1, nb1) = Fb;
            if (min_eigenvalue(pf - a.transpose() * pf * a) <= 0.0) return false;
        }
        return true;
    };

    Matrix pf = assemble(1.01 * (lambda_b + kappa * kappa / mu));
    if (certifies(pf)) return pf;
    // retry once with the enlarged bound that provably dominates the coupling
    pf = assemble(1.01 * (lambda_b + kappa * kappa * (mu + 1.0 / mu)));
    if (certifies(pf)) return pf;
    throw NumericError("full_lyapunov: grid check failed after enlarging the buffer block");
}

}  // namespace lpvio
