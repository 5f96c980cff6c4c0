#include "dnc/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dnc {

PoolingOp PoolingOp::from_name(std::string_view name, std::size_t mu)
{
    if (name == "identity" || name == "none") {
        if (mu != 0) throw std::invalid_argument("identity pooling requires mu = 0");
        return identity();
    }
    if (name == "average") return average(mu);
    if (name == "max") return max(mu);
    throw std::invalid_argument("unknown pooling '" + std::string(name) + "'");
}

std::string PoolingOp::name() const
{
    switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Average: return "average";
    case Kind::Max: return "max";
    }
    return "?";
}

Vec pool(const PoolingOp& op, const Vec& x)
{
    if (op.kind() == PoolingOp::Kind::Identity) return x;
    const std::size_t mu = op.mu();
    if (x.dim() < mu + 1) {
        throw std::invalid_argument("pool: dimension " + std::to_string(x.dim()) + " too small for mu = " +
                                    std::to_string(mu));
    }
    std::vector<double> out(x.dim() - mu);
    const double width = static_cast<double>(mu + 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (op.kind() == PoolingOp::Kind::Average) {
            double s = 0.0;
            for (std::size_t j = 0; j <= mu; ++j) s += x[i + j];
            out[i] = s / width;
        } else {
            double m = x[i];
            for (std::size_t j = 1; j <= mu; ++j) m = std::max(m, x[i + j]);
            out[i] = m;
        }
    }
    return Vec(std::move(out));
}

double pool_lipschitz(const PoolingOp& op, PNorm p)
{
    if (op.kind() != PoolingOp::Kind::Max || p.is_inf()) return 1.0;
    if (p.kind() == PNorm::Kind::One) return static_cast<double>(op.mu() + 1);
    return std::pow(static_cast<double>(op.mu() + 1), 1.0 / p.exponent());
}

}  // namespace dnc
