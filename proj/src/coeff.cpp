#include "lpvio/coeff.hpp"

#include <cmath>
#include <stdexcept>

#include "lpvio/rng.hpp"

namespace lpvio {

CoefficientFunction CoefficientFunction::affine(int n_in, int n_out) {
    if (n_in < 1 || n_out < 1)
        throw std::invalid_argument("CoefficientFunction::affine: dimensions must be positive");
    CoefficientFunction f;
    f.variant_ = CoeffVariant::Affine;
    f.n_in_ = n_in;
    f.n_out_ = n_out;
    f.weights_ = {Matrix::Zero(n_out, n_in)};
    f.biases_ = {Vector::Zero(n_out)};
    return f;
}

CoefficientFunction CoefficientFunction::polynomial(int n_in, int n_out, int degree) {
    if (n_in < 1 || n_out < 1)
        throw std::invalid_argument("CoefficientFunction::polynomial: dimensions must be positive");
    if (degree < 1)
        throw std::invalid_argument("CoefficientFunction::polynomial: degree must be >= 1");
    CoefficientFunction f;
    f.variant_ = CoeffVariant::Polynomial;
    f.n_in_ = n_in;
    f.n_out_ = n_out;
    f.degree_ = degree;
    f.weights_.assign(static_cast<std::size_t>(degree), Matrix::Zero(n_out, n_in));
    f.biases_ = {Vector::Zero(n_out)};
    return f;
}

CoefficientFunction CoefficientFunction::mlp(std::vector<int> widths) {
    if (widths.size() < 2)
        throw std::invalid_argument("CoefficientFunction::mlp: need at least input and output widths");
    for (int w : widths)
        if (w < 1) throw std::invalid_argument("CoefficientFunction::mlp: widths must be positive");
    CoefficientFunction f;
    f.variant_ = CoeffVariant::Mlp;
    f.n_in_ = widths.front();
    f.n_out_ = widths.back();
    f.widths_ = std::move(widths);
    for (std::size_t l = 1; l < f.widths_.size(); ++l) {
        f.weights_.push_back(Matrix::Zero(f.widths_[l], f.widths_[l - 1]));
        f.biases_.push_back(Vector::Zero(f.widths_[l]));
    }
    return f;
}

Eigen::Index CoefficientFunction::n_params() const {
    Eigen::Index n = 0;
    for (const auto& w : weights_) n += w.size();
    for (const auto& b : biases_) n += b.size();
    return n;
}

Vector forward(const CoefficientFunction& f, const SchedulingPoint& rho) {
    const Vector& x = rho.value;
    if (x.size() != f.n_in_)
        throw std::invalid_argument("forward: scheduling dimension mismatch");
    switch (f.variant_) {
        case CoeffVariant::Affine:
            return f.weights_[0] * x + f.biases_[0];
        case CoeffVariant::Polynomial: {
            Vector out = f.biases_[0];
            Vector xp = x;
            for (int p = 0; p < f.degree_; ++p) {
                out += f.weights_[static_cast<std::size_t>(p)] * xp;
                if (p + 1 < f.degree_) xp = xp.cwiseProduct(x);
            }
            return out;
        }
        case CoeffVariant::Mlp: {
            Vector h = x;
            const std::size_t n_layers = f.weights_.size();
            for (std::size_t l = 0; l < n_layers; ++l) {
                h = f.weights_[l] * h + f.biases_[l];
                if (l + 1 < n_layers) h = h.array().tanh().matrix();
            }
            return h;
        }
    }
    throw std::logic_error("forward: unknown variant");
}

namespace {

// Layout: (E_1, c_1?, E_2, c_2?, ...) with biases interleaved for Mlp and the
// single bias trailing for Affine/Polynomial.
template <typename Fw, typename Fb>
void walk_params(const CoefficientFunction& f, Fw&& on_weight, Fb&& on_bias) {
    if (f.variant() == CoeffVariant::Mlp) {
        for (std::size_t l = 0; l < f.weight_matrices().size(); ++l) {
            on_weight(l);
            on_bias(l);
        }
    } else {
        for (std::size_t l = 0; l < f.weight_matrices().size(); ++l) on_weight(l);
        on_bias(0);
    }
}

}  // namespace

Vector get_params(const CoefficientFunction& f) {
    Vector phi(f.n_params());
    Eigen::Index at = 0;
    walk_params(
        f,
        [&](std::size_t l) {
            const Matrix& w = f.weights_[l];
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j) phi[at++] = w(i, j);
        },
        [&](std::size_t l) {
            const Vector& b = f.biases_[l];
            for (Eigen::Index i = 0; i < b.size(); ++i) phi[at++] = b[i];
        });
    return phi;
}

void set_params(CoefficientFunction& f, const Vector& phi) {
    if (phi.size() != f.n_params())
        throw std::invalid_argument("set_params: parameter vector length mismatch");
    Eigen::Index at = 0;
    walk_params(
        f,
        [&](std::size_t l) {
            Matrix& w = f.weights_[l];
            for (Eigen::Index i = 0; i < w.rows(); ++i)
                for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = phi[at++];
        },
        [&](std::size_t l) {
            Vector& b = f.biases_[l];
            for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = phi[at++];
        });
}

Vector init_params(const CoefficientFunction& f, std::uint64_t seed) {
    Rng rng(seed);
    Vector phi = Vector::Zero(f.n_params());
    Eigen::Index at = 0;
    walk_params(
        f,
        [&](std::size_t l) {
            const Matrix& w = f.weight_matrices()[l];
            const double s = 1.0 / std::sqrt(static_cast<double>(w.cols()));
            for (Eigen::Index i = 0; i < w.size(); ++i) phi[at++] = rng.uniform(-s, s);
        },
        [&](std::size_t l) { at += f.bias_vectors()[l].size(); });
    return phi;
}

}  // namespace lpvio
