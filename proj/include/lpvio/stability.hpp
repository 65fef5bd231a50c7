#pragma once

#include <complex>
#include <optional>

#include "lpvio/stabparam.hpp"

namespace lpvio {

using CoeffRowFunc = std::function<RowVector(const SchedulingPoint&)>;

/// Result of a grid-based quadratic-stability check. The certificate is valid
/// iff P is positive definite and the smallest eigenvalue of
/// P - A^T(rho) P A(rho) over the grid is strictly positive.
struct QsCertificate {
    Matrix P;
    std::vector<SchedulingPoint> grid;
    double min_margin = 0.0;
    bool positive_definite = false;

    bool valid() const { return positive_definite && min_margin > 0.0; }
};

/// Checks P against the output recursion A_cl(rho) = F - G K(rho) on the grid.
QsCertificate qs_grid_check(const CoeffRowFunc& K, const Matrix& P,
                            const std::vector<SchedulingPoint>& grid);

/// Checks a full-order certificate against A(rho) of a buffer realization.
QsCertificate qs_full_check(const MaxStateSpace& ss, const Matrix& P,
                            const std::vector<SchedulingPoint>& grid);

/// Schur condition for z^2 + a1 z + a2: |a2| < 1 and |a1| < 1 + a2.
bool lti_triangle_contains(double a1, double a2);

/// Planar image of the unit ball of transformed coefficients under
/// m -> center + x_q^{-1} m X_W, sampled on the unit circle.
struct CoeffSetEllipse {
    Eigen::Vector2d center;
    std::vector<Eigen::Vector2d> boundary;
};

/// Samples m = (cos theta_i, sin theta_i), theta_i = 2 pi i / n_points.
/// Requires n_a = 2.
CoeffSetEllipse coeff_set_boundary(const RiccatiSolution& sol, const XwFactor& xw,
                                   int n_points);

/// Roots of z^{n_a} + a_1 z^{n_a-1} + ... + a_{n_a} via the companion matrix.
std::vector<std::complex<double>> frozen_roots(const Vector& a);

/// True iff all frozen roots lie strictly inside the unit circle.
bool frozen_roots_stable(const Vector& a);

/// Derivative-free search for a quadratic certificate of an externally given
/// coefficient row function: P is parameterized through a triangular factor,
/// the worst-grid-point eigenvalue of (F-GK)^T P (F-GK) - P + eps I
/// (eps = 1e-6) is minimized by Nelder-Mead from 8 deterministic starts.
/// Failure is inconclusive, not a proof of instability. Requires n_a <= 4.
std::optional<QsCertificate> qs_certificate_search(const CoeffRowFunc& K,
                                                   const std::vector<SchedulingPoint>& grid,
                                                   std::uint64_t seed);

}  // namespace lpvio
