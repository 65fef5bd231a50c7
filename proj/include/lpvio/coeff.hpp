#pragma once

#include <cstdint>
#include <vector>

#include "lpvio/types.hpp"

namespace lpvio {

enum class CoeffVariant { Affine, Polynomial, Mlp };

/// Parameterized map g(rho) from a scheduling point to a coefficient-like
/// output vector. Three families:
///   Affine:      E rho + c
///   Polynomial:  c + E_1 rho + E_2 rho^2 + ... + E_d rho^d   (elementwise powers)
///   Mlp:         E_L tanh( ... tanh(E_1 rho + c_1) ... ) + c_L
///
/// The flat parameter vector phi stacks, in order: each weight matrix in
/// row-major order, followed by its bias where the family has one per layer
/// (Mlp: E_1, c_1, ..., E_L, c_L; Affine: E, c; Polynomial: E_1..E_d, c).
class CoefficientFunction {
   public:
    static CoefficientFunction affine(int n_in, int n_out);
    static CoefficientFunction polynomial(int n_in, int n_out, int degree);
    static CoefficientFunction mlp(std::vector<int> widths);

    CoeffVariant variant() const { return variant_; }
    int input_dim() const { return n_in_; }
    int output_dim() const { return n_out_; }
    int degree() const { return degree_; }
    const std::vector<int>& widths() const { return widths_; }

    Eigen::Index n_params() const;

    const std::vector<Matrix>& weight_matrices() const { return weights_; }
    const std::vector<Vector>& bias_vectors() const { return biases_; }

   private:
    CoefficientFunction() = default;

    CoeffVariant variant_ = CoeffVariant::Affine;
    int n_in_ = 0;
    int n_out_ = 0;
    int degree_ = 1;             // Polynomial only
    std::vector<int> widths_;    // Mlp only: [n_in, hidden..., n_out]
    std::vector<Matrix> weights_;
    std::vector<Vector> biases_;

    friend Vector forward(const CoefficientFunction&, const SchedulingPoint&);
    friend Vector get_params(const CoefficientFunction&);
    friend void set_params(CoefficientFunction&, const Vector&);
};

/// Evaluates g(rho).
Vector forward(const CoefficientFunction& f, const SchedulingPoint& rho);

/// Round-trip parameter access in the documented flattening order.
Vector get_params(const CoefficientFunction& f);
void set_params(CoefficientFunction& f, const Vector& phi);

/// Weights drawn uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] in flattening
/// order, biases zero.
Vector init_params(const CoefficientFunction& f, std::uint64_t seed);

}  // namespace lpvio
