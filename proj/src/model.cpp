#include "lpvio/model.hpp"

#include <cmath>

#include "lpvio/errors.hpp"

namespace lpvio {

namespace {

constexpr double kOverflowLimit = 1e12;

Matrix shift_chain(int n) {
    Matrix f = Matrix::Zero(n, n);
    if (n > 1) f.block(1, 0, n - 1, n - 1).setIdentity();
    return f;
}

Vector first_unit(int n) {
    Vector g = Vector::Zero(n);
    if (n > 0) g[0] = 1.0;
    return g;
}

Vector checked_init(const Vector& given, Eigen::Index required, const char* name) {
    if (given.size() == 0) return Vector::Zero(required);
    if (given.size() != required)
        throw std::invalid_argument(std::string("simulate_io: ") + name + " has wrong length");
    return given;
}

}  // namespace

LpvIoModel::LpvIoModel(LpvIoStructure st, CoefficientFunction f)
    : structure(st), coeffs(std::move(f)) {
    if (coeffs.output_dim() != structure.n_a + structure.n_b)
        throw std::invalid_argument(
            "LpvIoModel: coefficient function must produce n_a + n_b outputs");
}

CoefficientVector LpvIoModel::coefficients(const SchedulingPoint& rho) const {
    const Vector out = forward(coeffs, rho);
    CoefficientVector c;
    c.a = out.head(structure.n_a);
    c.b = out.tail(structure.n_b);
    return c;
}

CoefficientMap LpvIoModel::coefficient_map() const {
    return [*this](const SchedulingPoint& rho) { return coefficients(rho); };
}

SignalSequence simulate_io(const LpvIoStructure& st, const CoefficientMap& coeffs,
                           const SignalSequence& u, const std::vector<SchedulingPoint>& rho,
                           const Vector& y_init, const Vector& u_init) {
    const Eigen::Index n = u.size();
    if (static_cast<Eigen::Index>(rho.size()) != n)
        throw std::invalid_argument("simulate_io: u and rho must have equal length");
    const Vector y0 = checked_init(y_init, st.n_a, "y_init");
    const Vector u0 = checked_init(u_init, st.n_b - 1, "u_init");

    SignalSequence y;
    y.t_s = u.t_s;
    y.samples.resize(n);

    // buffers store the most recent past first: y_past[0] = y_{k-1}
    auto y_at = [&](Eigen::Index k, int lag) {
        const Eigen::Index idx = k - lag;
        return idx >= 0 ? y.samples[idx] : y0[lag - static_cast<int>(k) - 1];
    };
    auto u_at = [&](Eigen::Index k, int lag) {
        const Eigen::Index idx = k - lag;
        return idx >= 0 ? u.samples[idx] : u0[lag - static_cast<int>(k) - 1];
    };

    for (Eigen::Index k = 0; k < n; ++k) {
        const CoefficientVector c = coeffs(rho[static_cast<std::size_t>(k)]);
        if (c.a.size() != st.n_a || c.b.size() != st.n_b)
            throw std::invalid_argument("simulate_io: coefficient map returned wrong sizes");
        double acc = 0.0;
        for (int i = 1; i <= st.n_a; ++i) acc -= c.a[i - 1] * y_at(k, i);
        for (int i = 0; i < st.n_b; ++i) acc += c.b[i] * u_at(k, i);
        if (!std::isfinite(acc) || std::abs(acc) > kOverflowLimit)
            throw NumericError("simulate_io: output overflow at step " + std::to_string(k) +
                               "; coefficient function is unstable or invalid");
        y.samples[k] = acc;
    }
    return y;
}

SignalSequence simulate_io(const LpvIoModel& model, const SignalSequence& u,
                           const std::vector<SchedulingPoint>& rho, const Vector& y_init,
                           const Vector& u_init) {
    return simulate_io(model.structure, model.coefficient_map(), u, rho, y_init, u_init);
}

RowVector MaxStateSpace::K(const SchedulingPoint& rho) const {
    return coeffs(rho).a.transpose();
}

RowVector MaxStateSpace::L(const SchedulingPoint& rho) const {
    return coeffs(rho).b.tail(structure.n_b - 1).transpose();
}

Matrix MaxStateSpace::A(const SchedulingPoint& rho) const {
    const int na = structure.n_a;
    const int nb1 = structure.n_b - 1;
    const CoefficientVector c = coeffs(rho);
    Matrix a = Matrix::Zero(na + nb1, na + nb1);
    a.topLeftCorner(na, na) = F - G * c.a.transpose();
    if (nb1 > 0) {
        a.topRightCorner(na, nb1) = G * c.b.tail(nb1).transpose();
        a.bottomRightCorner(nb1, nb1) = F_b;
    }
    return a;
}

Vector MaxStateSpace::B(const SchedulingPoint& rho) const {
    const int nb1 = structure.n_b - 1;
    const CoefficientVector c = coeffs(rho);
    Vector b(structure.state_dim());
    b.head(structure.n_a) = G * c.b[0];
    if (nb1 > 0) b.tail(nb1) = G_b;
    return b;
}

RowVector MaxStateSpace::C(const SchedulingPoint& rho) const {
    const int nb1 = structure.n_b - 1;
    const CoefficientVector c = coeffs(rho);
    RowVector row(structure.state_dim());
    row.head(structure.n_a) = -c.a.transpose();
    if (nb1 > 0) row.tail(nb1) = c.b.tail(nb1).transpose();
    return row;
}

double MaxStateSpace::D(const SchedulingPoint& rho) const { return coeffs(rho).b[0]; }

MaxStateSpace build_max_ss(const LpvIoStructure& st, CoefficientMap coeffs) {
    if (st.n_a < 1)
        throw std::invalid_argument(
            "build_max_ss: n_a = 0 is unsupported (no autoregressive state)");
    MaxStateSpace ss{st, std::move(coeffs), shift_chain(st.n_a), first_unit(st.n_a),
                     shift_chain(st.n_b - 1), first_unit(st.n_b - 1)};
    return ss;
}

MaxStateSpace build_max_ss(const LpvIoModel& model) {
    return build_max_ss(model.structure, model.coefficient_map());
}

SignalSequence simulate_ss(const MaxStateSpace& ss, const SignalSequence& u,
                           const std::vector<SchedulingPoint>& rho, const Vector& x0) {
    const Eigen::Index n = u.size();
    if (static_cast<Eigen::Index>(rho.size()) != n)
        throw std::invalid_argument("simulate_ss: u and rho must have equal length");
    if (x0.size() != ss.structure.state_dim())
        throw std::invalid_argument("simulate_ss: x0 has wrong dimension");

    SignalSequence y;
    y.t_s = u.t_s;
    y.samples.resize(n);
    Vector x = x0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const SchedulingPoint& p = rho[static_cast<std::size_t>(k)];
        const double yk = ss.C(p).dot(x) + ss.D(p) * u.samples[k];
        if (!std::isfinite(yk) || std::abs(yk) > kOverflowLimit)
            throw NumericError("simulate_ss: output overflow at step " + std::to_string(k));
        y.samples[k] = yk;
        x = (ss.A(p) * x + ss.B(p) * u.samples[k]).eval();
    }
    return y;
}

std::vector<FrequencyResponsePoint> frozen_response(const CoefficientVector& coeffs,
                                                    const Vector& freqs_hz, double t_s) {
    if (t_s <= 0.0) throw std::invalid_argument("frozen_response: t_s must be positive");
    const double nyquist = 0.5 / t_s;
    std::vector<FrequencyResponsePoint> out;
    out.reserve(static_cast<std::size_t>(freqs_hz.size()));
    for (Eigen::Index i = 0; i < freqs_hz.size(); ++i) {
        const double f = freqs_hz[i];
        if (f <= 0.0 || f > nyquist * (1.0 + 1e-12))
            throw std::invalid_argument("frozen_response: frequency outside (0, 1/(2 t_s)]");
        const std::complex<double> zinv =
            std::polar(1.0, -2.0 * 3.14159265358979323846 * f * t_s);
        std::complex<double> den(1.0, 0.0);
        std::complex<double> zp(1.0, 0.0);
        for (Eigen::Index j = 0; j < coeffs.a.size(); ++j) {
            zp *= zinv;
            den += coeffs.a[j] * zp;
        }
        std::complex<double> num(0.0, 0.0);
        zp = std::complex<double>(1.0, 0.0);
        for (Eigen::Index j = 0; j < coeffs.b.size(); ++j) {
            num += coeffs.b[j] * zp;
            zp *= zinv;
        }
        FrequencyResponsePoint pt;
        if (std::abs(den) == 0.0) {
            pt.magnitude_db = std::numeric_limits<double>::infinity();
            pt.phase_deg = 0.0;
        } else {
            const std::complex<double> h = num / den;
            pt.magnitude_db = 20.0 * std::log10(std::abs(h));
            pt.phase_deg = std::arg(h) * 180.0 / 3.14159265358979323846;
        }
        out.push_back(pt);
    }
    return out;
}

std::vector<FrequencyResponsePoint> frozen_response(const LpvIoModel& model,
                                                    const SchedulingPoint& rho,
                                                    const Vector& freqs_hz, double t_s) {
    return frozen_response(model.coefficients(rho), freqs_hz, t_s);
}

}  // namespace lpvio
