#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace lpvio {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct SchedulingPoint;

/// Box domain P for the scheduling signal, one [lo, hi] interval per coordinate.
struct SchedulingDomain {
    Vector lo;
    Vector hi;

    SchedulingDomain(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size() || lo.size() == 0)
            throw std::invalid_argument("SchedulingDomain: bound vectors must have equal nonzero size");
        if ((lo.array() > hi.array()).any())
            throw std::invalid_argument("SchedulingDomain: lo must not exceed hi");
    }

    /// Scalar domain [lo, hi].
    static SchedulingDomain interval(double lo_, double hi_) {
        return SchedulingDomain(Vector::Constant(1, lo_), Vector::Constant(1, hi_));
    }

    /// The unit interval [0, 1], the domain of every experiment in this project.
    static SchedulingDomain unit() { return interval(0.0, 1.0); }

    Eigen::Index dim() const { return lo.size(); }

    bool contains(const Vector& v) const {
        return v.size() == lo.size() && (v.array() >= lo.array()).all() &&
               (v.array() <= hi.array()).all();
    }

    SchedulingPoint point(Vector v) const;
    SchedulingPoint point(double v) const;

    /// Uniform grid over a scalar domain, endpoints included.
    std::vector<SchedulingPoint> grid(int n_points) const;
};

/// A validated scheduling value rho inside its box domain.
struct SchedulingPoint {
    Vector value;

    SchedulingPoint(Vector v, const SchedulingDomain& domain) : value(std::move(v)) {
        if (!domain.contains(value))
            throw std::invalid_argument("SchedulingPoint: value outside the scheduling domain");
    }

    double scalar() const {
        if (value.size() != 1)
            throw std::logic_error("SchedulingPoint::scalar: point is not one-dimensional");
        return value[0];
    }
};

inline SchedulingPoint SchedulingDomain::point(Vector v) const {
    return SchedulingPoint(std::move(v), *this);
}

inline SchedulingPoint SchedulingDomain::point(double v) const {
    return SchedulingPoint(Vector::Constant(1, v), *this);
}

inline std::vector<SchedulingPoint> SchedulingDomain::grid(int n_points) const {
    if (dim() != 1)
        throw std::invalid_argument("SchedulingDomain::grid: only scalar domains are gridded");
    if (n_points < 1) throw std::invalid_argument("SchedulingDomain::grid: n_points must be >= 1");
    std::vector<SchedulingPoint> pts;
    pts.reserve(static_cast<std::size_t>(n_points));
    if (n_points == 1) {
        pts.push_back(point(0.5 * (lo[0] + hi[0])));
        return pts;
    }
    for (int i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / (n_points - 1);
        pts.push_back(point(lo[0] + t * (hi[0] - lo[0])));
    }
    return pts;
}

}  // namespace lpvio
