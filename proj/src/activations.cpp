#include "dnc/activations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnc {

namespace {

void require_slope(double alpha, const char* who)
{
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument(std::string(who) + ": alpha must be finite and >= 0");
    }
}

}  // namespace

Activation::Activation(Kind kind, double alpha, double lambda, double lipschitz)
    : kind_(kind), alpha_(alpha), lambda_(lambda), lipschitz_(lipschitz), sigma0_(0.0)
{
    sigma0_ = eval(0.0);
}

Activation Activation::relu() { return {Kind::ReLU, 0.0, 1.0, 1.0}; }

Activation Activation::leaky_relu(double alpha)
{
    require_slope(alpha, "leaky_relu");
    return {Kind::LeakyReLU, alpha, 1.0, std::max(alpha, 1.0)};
}

Activation Activation::prelu(double alpha)
{
    require_slope(alpha, "prelu");
    return {Kind::PReLU, alpha, 1.0, std::max(alpha, 1.0)};
}

Activation Activation::elu(double alpha)
{
    require_slope(alpha, "elu");
    return {Kind::ELU, alpha, 1.0, std::max(alpha, 1.0)};
}

Activation Activation::selu(double lambda, double alpha)
{
    require_slope(alpha, "selu");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("selu: lambda must be > 0");
    return {Kind::SELU, alpha, lambda, lambda * std::max(alpha, 1.0)};
}

Activation Activation::sigmoid() { return {Kind::Sigmoid, 0.0, 1.0, 0.25}; }

Activation Activation::tanh() { return {Kind::Tanh, 0.0, 1.0, 1.0}; }

Activation Activation::identity() { return {Kind::Identity, 0.0, 1.0, 1.0}; }

Activation Activation::from_name(std::string_view name, double alpha, double lambda)
{
    if (name == "relu") return relu();
    if (name == "leaky_relu") return leaky_relu(alpha);
    if (name == "prelu") return prelu(alpha);
    if (name == "elu") return elu(alpha);
    if (name == "selu") return selu(lambda, alpha);
    if (name == "sigmoid") return sigmoid();
    if (name == "tanh") return tanh();
    if (name == "identity") return identity();
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string Activation::name() const
{
    switch (kind_) {
    case Kind::ReLU: return "relu";
    case Kind::LeakyReLU: return "leaky_relu";
    case Kind::PReLU: return "prelu";
    case Kind::ELU: return "elu";
    case Kind::SELU: return "selu";
    case Kind::Sigmoid: return "sigmoid";
    case Kind::Tanh: return "tanh";
    case Kind::Identity: return "identity";
    }
    return "?";
}

double Activation::eval(double x) const
{
    switch (kind_) {
    case Kind::ReLU: return x > 0.0 ? x : 0.0;
    case Kind::LeakyReLU:
    case Kind::PReLU: return x >= 0.0 ? x : alpha_ * x;
    case Kind::ELU: return x >= 0.0 ? x : alpha_ * std::expm1(x);
    case Kind::SELU: return x >= 0.0 ? lambda_ * x : lambda_ * alpha_ * std::expm1(x);
    case Kind::Sigmoid:
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        else {
            const double e = std::exp(x);
            return e / (1.0 + e);
        }
    case Kind::Tanh: return std::tanh(x);
    case Kind::Identity: return x;
    }
    return x;
}

Vec apply_vec(const Activation& a, const Vec& x)
{
    std::vector<double> out(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) out[i] = a.eval(x[i]);
    return Vec(std::move(out));
}

EventuallyConstSeq apply_seq(const Activation& a, const EventuallyConstSeq& x)
{
    std::vector<double> head(x.head_size());
    for (std::size_t i = 0; i < head.size(); ++i) head[i] = a.eval(x.head()[i]);
    return {std::move(head), a.eval(x.tail())};
}

double empirical_lipschitz(const Activation& a, const Grid& grid)
{
    if (grid.points < 2 || !(grid.hi > grid.lo)) throw std::invalid_argument("empirical_lipschitz: bad grid");
    const double h = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);
    double best = 0.0;
    double x0 = grid.lo;
    double y0 = a.eval(x0);
    for (std::size_t i = 1; i < grid.points; ++i) {
        const double x1 = grid.lo + h * static_cast<double>(i);
        const double y1 = a.eval(x1);
        best = std::max(best, std::abs(y1 - y0) / (x1 - x0));
        x0 = x1;
        y0 = y1;
    }
    return best;
}

}  // namespace dnc
