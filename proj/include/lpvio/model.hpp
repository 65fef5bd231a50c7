#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "lpvio/coeff.hpp"
#include "lpvio/types.hpp"

namespace lpvio {

/// Orders of the difference equation: n_a past outputs, n_b input taps
/// (b_0 .. b_{n_b-1}).
struct LpvIoStructure {
    int n_a = 0;
    int n_b = 1;

    LpvIoStructure(int na, int nb) : n_a(na), n_b(nb) {
        if (n_a < 0) throw std::invalid_argument("LpvIoStructure: n_a must be >= 0");
        if (n_b < 1) throw std::invalid_argument("LpvIoStructure: n_b must be >= 1");
    }

    /// State dimension of the buffer realization (past outputs + past inputs).
    int state_dim() const { return n_a + n_b - 1; }
};

/// Pointwise coefficient values: a = (a_1..a_{n_a}), b = (b_0..b_{n_b-1}).
struct CoefficientVector {
    Vector a;
    Vector b;
};

/// Map from a scheduling point to the coefficient values at that point.
using CoefficientMap = std::function<CoefficientVector(const SchedulingPoint&)>;

struct SignalSequence {
    Vector samples;
    double t_s = 1.0;

    Eigen::Index size() const { return samples.size(); }
};

/// Difference-equation model whose coefficient stack
/// (a_1..a_{n_a}, b_0..b_{n_b-1}) is produced by a parameterized function.
struct LpvIoModel {
    LpvIoStructure structure;
    CoefficientFunction coeffs;

    LpvIoModel(LpvIoStructure st, CoefficientFunction f);

    CoefficientVector coefficients(const SchedulingPoint& rho) const;
    CoefficientMap coefficient_map() const;
};

/// y_k = -sum_i a_i(rho_k) y_{k-i} + sum_i b_i(rho_k) u_{k-i}.
/// Initial buffers hold the most recent past first: y_init = (y_-1..y_-n_a),
/// u_init = (u_-1..u_-{n_b-1}); empty vectors mean zero initial conditions.
/// Aborts with NumericError once |y_k| exceeds 1e12 or turns non-finite.
SignalSequence simulate_io(const LpvIoStructure& st, const CoefficientMap& coeffs,
                           const SignalSequence& u, const std::vector<SchedulingPoint>& rho,
                           const Vector& y_init = Vector(), const Vector& u_init = Vector());

SignalSequence simulate_io(const LpvIoModel& model, const SignalSequence& u,
                           const std::vector<SchedulingPoint>& rho,
                           const Vector& y_init = Vector(), const Vector& u_init = Vector());

/// Buffer realization x_{k+1} = A(rho_k) x_k + B(rho_k) u_k,
/// y_k = C(rho_k) x_k + D(rho_k) u_k with state
/// x_k = (y_{k-1}..y_{k-n_a}, u_{k-1}..u_{k-n_b+1}).
struct MaxStateSpace {
    LpvIoStructure structure;
    CoefficientMap coeffs;

    Matrix F;    // n_a x n_a shift chain
    Vector G;    // first unit vector, length n_a
    Matrix F_b;  // (n_b-1) x (n_b-1) shift chain
    Vector G_b;  // first unit vector, length n_b-1

    RowVector K(const SchedulingPoint& rho) const;  // (a_1 .. a_{n_a})
    RowVector L(const SchedulingPoint& rho) const;  // (b_1 .. b_{n_b-1})

    Matrix A(const SchedulingPoint& rho) const;
    Vector B(const SchedulingPoint& rho) const;
    RowVector C(const SchedulingPoint& rho) const;
    double D(const SchedulingPoint& rho) const;
};

/// Requires n_a >= 1; the stability machinery is vacuous for pure FIR models.
MaxStateSpace build_max_ss(const LpvIoStructure& st, CoefficientMap coeffs);
MaxStateSpace build_max_ss(const LpvIoModel& model);

SignalSequence simulate_ss(const MaxStateSpace& ss, const SignalSequence& u,
                           const std::vector<SchedulingPoint>& rho, const Vector& x0);

struct FrequencyResponsePoint {
    double magnitude_db = 0.0;
    double phase_deg = 0.0;
};

/// Frozen transfer function b(z)/a(z) with a(z) = 1 + sum a_i z^-i,
/// b(z) = sum b_i z^-i at z = exp(j 2 pi f t_s). Frequencies must satisfy
/// 0 < f <= 1/(2 t_s); a zero of a(z) is reported as +inf magnitude.
std::vector<FrequencyResponsePoint> frozen_response(const CoefficientVector& coeffs,
                                                    const Vector& freqs_hz, double t_s);

std::vector<FrequencyResponsePoint> frozen_response(const LpvIoModel& model,
                                                    const SchedulingPoint& rho,
                                                    const Vector& freqs_hz, double t_s);

}  // namespace lpvio
