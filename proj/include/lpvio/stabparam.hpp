#pragma once

#include "lpvio/model.hpp"

namespace lpvio {

/// Unconstrained storage of an upper-triangular full-rank factor X_W: the
/// diagonal is exp(d) and the strict upper triangle is stored row-major in
/// off. Any finite (d, off) materializes a valid factor.
struct XwFactor {
    Vector d;
    Vector off;

    int dim() const { return static_cast<int>(d.size()); }
    Eigen::Index n_params() const { return d.size() + off.size(); }

    Matrix matrix() const;
    Matrix gram() const;  // W = X_W^T X_W

    static XwFactor identity(int n);
};

/// Positive-definite solution of the structured Riccati equation
///   P - F^T P F + F^T P G (G^T P G)^{-1} G^T P F = W
/// for the shift chain F and first unit vector G, together with the derived
/// quantities used by the coefficient transform:
///   q = G^T P G (the (1,1) entry of P), x_q = sqrt(q),
///   center = (G^T P G)^{-1} G^T P F.
struct RiccatiSolution {
    Matrix P;
    double q = 0.0;
    double x_q = 0.0;
    RowVector center;
    double residual_norm = 0.0;
    int iterations = 0;
};

/// Fixed-point iteration P <- F^T P F - F^T P G (G^T P G)^{-1} G^T P F + W
/// from P_0 = W, stopping when successive iterates differ by less than
/// 1e-14 * ||W||_F (10,000 iteration cap). W must be symmetric positive
/// definite (checked by Cholesky).
RiccatiSolution solve_structured_riccati(const Matrix& W);

/// Closed form for n_a = 2: the structure forces P_12 = W_12, P_22 = W_22 and
/// P_11 = ((W_11 + W_22) + sqrt((W_11 + W_22)^2 - 4 W_12^2)) / 2.
Matrix riccati_closed_form_2x2(const Matrix& W);

/// Cayley transform of the scalar-plus-tail pair (x_m, z_m) into a row M with
/// ||M|| < 1 strictly: N = x_m^2 + ||z_m||^2,
/// M = [ (1-N)/(1+N), -2 z_m^T/(1+N) ]. Requires x_m != 0.
RowVector cayley_row(double x_m, const Vector& z_m);

/// K(rho) = center + x_q^{-1} M(rho) X_W. Any ||M|| < 1 yields a K for which
/// P certifies the contraction of F - G K.
RowVector k_from_m(const RowVector& M, const RiccatiSolution& sol, const XwFactor& xw);

/// Transformed coefficients produced by the network at one scheduling point.
struct TransformedCoeffs {
    double x_m = 1.0;
    Vector z_m;
    Vector l;
    double b0 = 0.0;
};

/// LPV-IO model that is quadratically stable for every parameter value.
/// The network maps rho to (raw_x_m, z_m, l, b0); x_m = exp(raw_x_m) keeps the
/// Cayley input away from zero, and the cached Riccati solution (a function of
/// X_W only) turns the transformed coefficients into a_i(rho), b_i(rho).
class StableLpvIoModel {
   public:
    StableLpvIoModel(LpvIoStructure st, CoefficientFunction net, XwFactor xw);

    const LpvIoStructure& structure() const { return structure_; }
    const CoefficientFunction& net() const { return net_; }
    CoefficientFunction& net() { return net_; }
    const XwFactor& xw() const { return xw_; }

    /// Replacing the factor invalidates the cached certificate; call
    /// refresh_certificate before evaluating coefficients again.
    void set_xw(XwFactor xw);

    const RiccatiSolution& certificate() const;
    bool certificate_fresh() const { return fresh_; }

    friend const RiccatiSolution& refresh_certificate(StableLpvIoModel& m);

   private:
    LpvIoStructure structure_;
    CoefficientFunction net_;
    XwFactor xw_;
    RiccatiSolution cert_;
    bool fresh_ = false;
};

/// Recomputes W = X_W^T X_W, solves the Riccati equation and caches it.
const RiccatiSolution& refresh_certificate(StableLpvIoModel& m);

TransformedCoeffs transformed_coeffs(const StableLpvIoModel& m, const SchedulingPoint& rho);

/// a_i = K_i(rho) through the Cayley/Riccati pipeline, b = (b0, l).
CoefficientVector eval_stable_coeffs(const StableLpvIoModel& m, const SchedulingPoint& rho);

/// Flat parameter vector: network parameters, then xw.d, then xw.off.
Eigen::Index n_params(const StableLpvIoModel& m);
Vector get_parameters(const StableLpvIoModel& m);
void set_parameters(StableLpvIoModel& m, const Vector& phi);

CoefficientMap coefficient_map(const StableLpvIoModel& m);
std::function<RowVector(const SchedulingPoint&)> k_function(const StableLpvIoModel& m);
std::function<RowVector(const SchedulingPoint&)> l_function(const StableLpvIoModel& m);

SignalSequence simulate_io(const StableLpvIoModel& m, const SignalSequence& u,
                           const std::vector<SchedulingPoint>& rho,
                           const Vector& y_init = Vector(), const Vector& u_init = Vector());

MaxStateSpace build_max_ss(const StableLpvIoModel& m);

/// Extends a certificate P for the output recursion to the full buffer state:
/// 𝒫 = blkdiag(P, alpha * diag(n_b-1, ..., 1)) with alpha sized from grid
/// bounds on the coupling terms so that 𝒫 - A^T(rho) 𝒫 A(rho) > 0 on the
/// grid. For n_b = 1 the certificate is P itself.
Matrix full_lyapunov(const RiccatiSolution& sol,
                     const std::function<RowVector(const SchedulingPoint&)>& K,
                     const std::function<RowVector(const SchedulingPoint&)>& L,
                     const LpvIoStructure& st, const std::vector<SchedulingPoint>& grid);

}  // namespace lpvio
