#pragma once

#include <string>
#include <string_view>

#include "dnc/linalg.hpp"

namespace dnc {

/// Scalar activation with its declared Lipschitz constant and value at 0.
class Activation {
public:
    enum class Kind { ReLU, LeakyReLU, PReLU, ELU, SELU, Sigmoid, Tanh, Identity };

    static Activation relu();
    static Activation leaky_relu(double alpha = 0.01);
    static Activation prelu(double alpha);
    static Activation elu(double alpha = 1.0);
    static Activation selu(double lambda = 1.0507, double alpha = 1.67326);
    static Activation sigmoid();
    static Activation tanh();
    static Activation identity();

    /// Name as used in configs: relu, leaky_relu, prelu, elu, selu, sigmoid, tanh, identity.
    /// Parameters not used by the kind are ignored.
    static Activation from_name(std::string_view name, double alpha, double lambda);

    Kind kind() const noexcept { return kind_; }
    double alpha() const noexcept { return alpha_; }
    double lambda() const noexcept { return lambda_; }
    double lipschitz() const noexcept { return lipschitz_; }
    double sigma0() const noexcept { return sigma0_; }
    std::string name() const;

    double eval(double x) const;

private:
    Activation(Kind kind, double alpha, double lambda, double lipschitz);
    Kind kind_;
    double alpha_;
    double lambda_;
    double lipschitz_;
    double sigma0_;
};

Vec apply_vec(const Activation& a, const Vec& x);
EventuallyConstSeq apply_seq(const Activation& a, const EventuallyConstSeq& x);

struct Grid {
    double lo;
    double hi;
    std::size_t points;
};

/// Largest difference quotient over adjacent grid points. Test oracle only.
double empirical_lipschitz(const Activation& a, const Grid& grid);

}  // namespace dnc
