#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnc/linalg.hpp"
#include "dnc/network.hpp"

namespace dnc {

enum class Family { Constant, ExpDecay, Harmonic, RandomConvergent, CnnMasks, DivergingControl, Scalar };
enum class MaskProfile { VanishingGeometric, VanishingHarmonic, ConvergentToLimit, HarmonicToLimit };

Family family_from_name(std::string_view name);
std::string family_name(Family f);
MaskProfile mask_profile_from_name(std::string_view name);
std::string mask_profile_name(MaskProfile m);

struct WidthSchedule {
    enum class Kind { Fixed, Cyclic, Cnn };
    Kind kind = Kind::Fixed;
    /// Fixed: one entry. Cyclic: m_n = widths[(n-1) mod size].
    std::vector<std::size_t> widths{1};
    /// Cnn: mask length minus one.
    std::size_t tau = 0;

    static WidthSchedule fixed(std::size_t l) { return {Kind::Fixed, {l}, 0}; }
    static WidthSchedule cyclic(std::vector<std::size_t> w) { return {Kind::Cyclic, std::move(w), 0}; }
    static WidthSchedule cnn(std::size_t tau) { return {Kind::Cnn, {}, tau}; }
};

struct GenSpec {
    Family family = Family::Constant;
    std::size_t s = 1;
    WidthSchedule widths;
    double r = 0.5;  // decay ratio for exponential families
    double c = 1.0;  // perturbation size: ||W_n - W*|| = c r^n or c / n
    std::uint64_t seed = 1;
    /// ||W*||_p for matrix families, sum |w*_k| for masks converging to a limit.
    /// For diverging_control it is the Perron root of W*. Zero is allowed for
    /// the constant family and gives all-zero weights.
    double norm_target = 0.5;
    PNorm p = PNorm::two();
    std::size_t pool_mu = 0;  // W_n gets l + mu rows
    MaskProfile mask_profile = MaskProfile::VanishingGeometric;
    double bias_scale = 0.1;  // ||b*||_p; perturbations scale with c as for weights
    /// Scalar family only: W_n = [scalar_weight], b_n = [scalar_bias].
    double scalar_weight = 0.4;
    double scalar_bias = 0.0;
};

struct Generated {
    LayerSeq seq;
    std::optional<MaskSeq> masks;
};

/// Deterministic in the spec: equal specs give bitwise-equal layers.
Generated build(const GenSpec& spec);

/// W * (target / ||W||_p).
Mat rescale_to_norm(const Mat& w, PNorm p, double target);
Vec rescale_to_norm(const Vec& v, PNorm p, double target);

/// s = 1, W_n = [weight], b_n = [bias] for every n, with the limits declared.
LayerSeq scalar_net(double weight, double bias);

/// Matrix with entries uniform on [-1, 1) from the documented generator.
Mat random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);
Vec random_vector(std::size_t dim, std::uint64_t seed);

}  // namespace dnc
