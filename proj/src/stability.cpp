#include "lpvio/stability.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "lpvio/rng.hpp"

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

QsCertificate grid_margin(const std::function<Matrix(const SchedulingPoint&)>& a,
                          const Matrix& P, const std::vector<SchedulingPoint>& grid) {
    QsCertificate cert;
    cert.P = P;
    cert.grid = grid;
    cert.positive_definite = min_eigenvalue(P) > 0.0;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& p : grid) {
        const Matrix ap = a(p);
        margin = std::min(margin, min_eigenvalue(P - ap.transpose() * P * ap));
    }
    cert.min_margin = margin;
    return cert;
}

// Discrete Lyapunov solve A^T X A - X = -I by vectorization; returns an empty
// matrix when A is not Schur (or the linear system is singular).
Matrix dlyap_or_empty(const Matrix& a) {
    const Eigen::Index n = a.rows();
    Matrix at = a.transpose();
    Matrix sys = Matrix::Identity(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                for (Eigen::Index l = 0; l < n; ++l)
                    sys(i * n + j, k * n + l) -= at(i, k) * at(j, l);
    Vector rhs = Vector::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) rhs[i * n + i] = 1.0;
    Eigen::FullPivLU<Matrix> lu(sys);
    if (!lu.isInvertible()) return Matrix();
    Vector x = lu.solve(rhs);
    Matrix p(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) p(i, j) = x[i * n + j];
    p = 0.5 * (p + p.transpose()).eval();
    if (min_eigenvalue(p) <= 0.0) return Matrix();
    return p;
}

// Nelder-Mead feasibility search: stops as soon as a point with f < 0 is seen.
struct NmResult {
    Vector x;
    double f = std::numeric_limits<double>::infinity();
};

NmResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                     double step, int max_iters) {
    const Eigen::Index n = x0.size();
    std::vector<Vector> xs;
    std::vector<double> fs;
    xs.reserve(n + 1);
    xs.push_back(x0);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector x = x0;
        x[i] += step;
        xs.push_back(x);
    }
    for (const auto& x : xs) {
        fs.push_back(f(x));
        if (fs.back() < 0.0) return {x, fs.back()};
    }

    auto order = [&] {
        for (std::size_t i = 1; i < xs.size(); ++i)
            for (std::size_t j = i; j > 0 && fs[j] < fs[j - 1]; --j) {
                std::swap(fs[j], fs[j - 1]);
                std::swap(xs[j], xs[j - 1]);
            }
    };
    order();

    for (int it = 0; it < max_iters; ++it) {
        if (fs.back() - fs.front() < 1e-12) break;
        Vector centroid = Vector::Zero(n);
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) centroid += xs[i];
        centroid /= static_cast<double>(n);

        auto try_point = [&](double coef) {
            Vector x = centroid + coef * (xs.back() - centroid);
            return std::pair<Vector, double>(std::move(x), 0.0);
        };
        auto [xr, _] = try_point(-1.0);
        const double fr = f(xr);
        if (fr < 0.0) return {xr, fr};
        if (fr < fs.front()) {
            auto [xe, __] = try_point(-2.0);
            const double fe = f(xe);
            if (fe < 0.0) return {xe, fe};
            if (fe < fr) {
                xs.back() = xe;
                fs.back() = fe;
            } else {
                xs.back() = xr;
                fs.back() = fr;
            }
        } else if (fr < fs[fs.size() - 2]) {
            xs.back() = xr;
            fs.back() = fr;
        } else {
            auto [xc, __] = try_point(fr < fs.back() ? -0.5 : 0.5);
            const double fc = f(xc);
            if (fc < 0.0) return {xc, fc};
            if (fc < std::min(fr, fs.back())) {
                xs.back() = xc;
                fs.back() = fc;
            } else {
                for (std::size_t i = 1; i < xs.size(); ++i) {
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = f(xs[i]);
                    if (fs[i] < 0.0) return {xs[i], fs[i]};
                }
            }
        }
        order();
    }
    return {xs.front(), fs.front()};
}

}  // namespace

QsCertificate qs_grid_check(const CoeffRowFunc& K, const Matrix& P,
                            const std::vector<SchedulingPoint>& grid) {
    if (grid.empty()) throw std::invalid_argument("qs_grid_check: grid must be nonempty");
    if (!P.isApprox(P.transpose(), 1e-10))
        throw std::invalid_argument("qs_grid_check: P must be symmetric");
    const int na = static_cast<int>(P.rows());
    const Matrix F = shift_chain(na);
    Vector G = Vector::Zero(na);
    G[0] = 1.0;
    return grid_margin([&](const SchedulingPoint& p) { return Matrix(F - G * K(p)); }, P, grid);
}

QsCertificate qs_full_check(const MaxStateSpace& ss, const Matrix& P,
                            const std::vector<SchedulingPoint>& grid) {
    if (grid.empty()) throw std::invalid_argument("qs_full_check: grid must be nonempty");
    if (P.rows() != ss.structure.state_dim())
        throw std::invalid_argument("qs_full_check: P dimension mismatch");
    return grid_margin([&](const SchedulingPoint& p) { return ss.A(p); }, P, grid);
}

bool lti_triangle_contains(double a1, double a2) {
    return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2;
}

CoeffSetEllipse coeff_set_boundary(const RiccatiSolution& sol, const XwFactor& xw,
                                   int n_points) {
    if (xw.dim() != 2)
        throw std::invalid_argument("coeff_set_boundary: planar sets need n_a = 2");
    if (n_points < 1)
        throw std::invalid_argument("coeff_set_boundary: n_points must be >= 1");
    CoeffSetEllipse e;
    e.center = Eigen::Vector2d(sol.center[0], sol.center[1]);
    e.boundary.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double theta = 2.0 * 3.14159265358979323846 * i / n_points;
        RowVector m(2);
        m << std::cos(theta), std::sin(theta);
        const RowVector k = k_from_m(m, sol, xw);
        e.boundary.emplace_back(k[0], k[1]);
    }
    return e;
}

std::vector<std::complex<double>> frozen_roots(const Vector& a) {
    const Eigen::Index n = a.size();
    if (n == 0) return {};
    Matrix companion = Matrix::Zero(n, n);
    companion.row(0) = -a.transpose();
    if (n > 1) companion.block(1, 0, n - 1, n - 1).setIdentity();
    Eigen::EigenSolver<Matrix> es(companion, false);
    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
    return roots;
}

bool frozen_roots_stable(const Vector& a) {
    for (const auto& r : frozen_roots(a))
        if (std::abs(r) >= 1.0) return false;
    return true;
}

std::optional<QsCertificate> qs_certificate_search(const CoeffRowFunc& K,
                                                   const std::vector<SchedulingPoint>& grid,
                                                   std::uint64_t seed) {
    if (grid.empty())
        throw std::invalid_argument("qs_certificate_search: grid must be nonempty");
    const int na = static_cast<int>(K(grid.front()).size());
    if (na < 1 || na > 4)
        throw std::invalid_argument("qs_certificate_search: supported for 1 <= n_a <= 4");

    const Matrix F = shift_chain(na);
    Vector G = Vector::Zero(na);
    G[0] = 1.0;
    const int dim = na * (na + 1) / 2;

    std::vector<Matrix> acl;
    acl.reserve(grid.size());
    for (const auto& p : grid) acl.push_back(F - G * K(p));

    auto materialize = [&](const Vector& v) {
        Matrix r = Matrix::Zero(na, na);
        Eigen::Index at = na;
        for (int i = 0; i < na; ++i) {
            r(i, i) = std::exp(v[i]);
            for (int j = i + 1; j < na; ++j) r(i, j) = v[at++];
        }
        Matrix p = r.transpose() * r;
        p *= static_cast<double>(na) / p.trace();
        return p;
    };
    auto objective = [&](const Vector& v) {
        if ((v.array().abs() > 100.0).any()) return 1e30;
        const Matrix p = materialize(v);
        if (!p.allFinite()) return 1e30;
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& a : acl) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * p * a - p,
                                                     Eigen::EigenvaluesOnly);
            worst = std::max(worst, es.eigenvalues().maxCoeff());
        }
        const double f = worst + 1e-6;
        return std::isfinite(f) ? f : 1e30;
    };

    // Starts: identity factor, a frozen discrete-Lyapunov factor at the grid
    // midpoint, then seeded random factors.
    std::vector<Vector> starts;
    starts.push_back(Vector::Zero(dim));
    {
        const Matrix p = dlyap_or_empty(acl[acl.size() / 2]);
        if (p.size() > 0) {
            Eigen::LLT<Matrix> llt(p);
            if (llt.info() == Eigen::Success) {
                const Matrix r = Matrix(llt.matrixU());
                Vector v(dim);
                Eigen::Index at = na;
                for (int i = 0; i < na; ++i) {
                    v[i] = std::log(std::max(r(i, i), 1e-150));
                    for (int j = i + 1; j < na; ++j) v[at++] = r(i, j);
                }
                starts.push_back(v);
            }
        }
    }
    Rng rng(seed);
    while (starts.size() < 8) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-2.0, 2.0);
        starts.push_back(v);
    }

    for (const auto& s : starts) {
        const NmResult best = nelder_mead(objective, s, 0.5, 250 * dim);
        if (best.f < 0.0) {
            QsCertificate cert = qs_grid_check(K, materialize(best.x), grid);
            if (cert.valid()) return cert;
        }
    }
    return std::nullopt;
}

}  // namespace lpvio
