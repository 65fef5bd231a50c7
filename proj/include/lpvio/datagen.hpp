#pragma once

#include <optional>
#include <string>

#include "lpvio/model.hpp"

namespace lpvio {

/// Backward-difference discretized mass-damper-spring system with
/// position-varying stiffness k(rho) = 1 - 1/(1 + exp(-7 rho + 7)).
struct MdsParams {
    double m = 1.0;
    double c = 0.1;
    double t_s = 1.0;

    double stiffness(double rho) const { return 1.0 - 1.0 / (1.0 + std::exp(-7.0 * rho + 7.0)); }
};

/// Second-order coefficients at a frozen rho in [0, 1]:
/// a_1 = -(2m + c)/D, a_2 = m/D, b_0 = 1/D with D = m + c + k(rho).
CoefficientVector mds_coefficients(const MdsParams& p, double rho);

/// Coefficient map of the true system for simulation (n_a = 2, n_b = 1).
CoefficientMap mds_coefficient_map(const MdsParams& p);

/// u_k = sum_i sin(2 pi f_i k / t_s + phase_i), k = 1..N, with f_i linearly
/// spaced over [f_low, f_high] (f_1 = f_low when n_components = 1).
SignalSequence multisine(int n_samples, double f_low = 0.01, double f_high = 0.1,
                         int n_components = 10, double t_s = 1.0,
                         const Vector& phases = Vector());

/// rho_k = 1 - k/N for k = 1..N.
std::vector<SchedulingPoint> linear_scheduling(int n_samples);

struct Dataset {
    SignalSequence u;
    Vector y;        // noisy measurement
    Vector y_clean;  // noise-free response
    Vector v;        // noise realization, y = y_clean + v
    Vector rho;
    double t_s = 1.0;
    double sigma_v = 0.0;
    std::uint64_t seed = 0;

    Eigen::Index size() const { return u.size(); }
    std::vector<SchedulingPoint> scheduling_points() const;
};

/// Simulates the true system over a multisine + linear scheduling run and adds
/// seeded i.i.d. Gaussian noise.
Dataset generate_dataset(const MdsParams& p, int n_samples = 1000,
                         double sigma_v = 0.31622776601683794, std::uint64_t seed = 1,
                         const Vector& phases = Vector());

/// Same construction with seeded uniform random phases on each multisine
/// component and an independent noise realization from the same stream.
Dataset generate_validation_dataset(const MdsParams& p, int n_samples = 1000,
                                    double sigma_v = 0.31622776601683794,
                                    std::uint64_t seed = 2);

/// CSV with header "k,u,y,y_clean,v,rho" (17 significant digits) plus a JSON
/// metadata sidecar at sidecar_path(path).
void save_dataset(const Dataset& ds, const std::string& csv_path);
Dataset load_dataset(const std::string& csv_path);

/// train.csv -> train.meta.json (appends when there is no .csv suffix).
std::string sidecar_path(const std::string& csv_path);

}  // namespace lpvio
