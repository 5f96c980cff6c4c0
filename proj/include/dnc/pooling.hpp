#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "dnc/linalg.hpp"

namespace dnc {

/// Stride-1 pooling from dimension l + mu down to l.
class PoolingOp {
public:
    enum class Kind { Identity, Average, Max };

    static PoolingOp identity() { return {Kind::Identity, 0}; }
    static PoolingOp average(std::size_t mu) { return {Kind::Average, mu}; }
    static PoolingOp max(std::size_t mu) { return {Kind::Max, mu}; }
    /// "identity" / "none", "average", "max".
    static PoolingOp from_name(std::string_view name, std::size_t mu);

    Kind kind() const noexcept { return kind_; }
    std::size_t mu() const noexcept { return mu_; }
    std::string name() const;

    friend bool operator==(const PoolingOp&, const PoolingOp&) = default;

private:
    PoolingOp(Kind kind, std::size_t mu) : kind_(kind), mu_(mu) {}
    Kind kind_;
    std::size_t mu_;
};

Vec pool(const PoolingOp& op, const Vec& x);

/// 1 for identity and average pooling, (mu+1)^(1/p) for max pooling.
double pool_lipschitz(const PoolingOp& op, PNorm p);

}  // namespace dnc
