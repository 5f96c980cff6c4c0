#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dnc {

/// Dense real vector of dimension >= 1 with finite entries.
class Vec {
public:
    explicit Vec(std::vector<double> entries);
    Vec(std::initializer_list<double> entries);

    static Vec zeros(std::size_t dim);
    static Vec filled(std::size_t dim, double value);

    std::size_t dim() const noexcept { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }
    double at(std::size_t i) const;
    std::span<const double> entries() const noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    friend bool operator==(const Vec&, const Vec&) = default;

private:
    std::vector<double> data_;
};

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double c, const Vec& a);

/// Dense row-major real matrix; rows, cols >= 1 and all entries finite.
class Mat {
public:
    Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat zeros(std::size_t rows, std::size_t cols);
    static Mat identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const;
    const std::vector<double>& data() const noexcept { return data_; }

    Mat transpose() const;
    /// Top-left `rows x cols` block.
    Mat block(std::size_t rows, std::size_t cols) const;

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Vec operator*(const Mat& a, const Vec& x);
Mat operator*(const Mat& a, const Mat& b);
Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(double c, const Mat& a);

/// Choice of l_p norm. `General` carries an exponent 1 < p < inf and only
/// ever yields upper bounds for induced matrix norms.
class PNorm {
public:
    enum class Kind { One, Two, Inf, General };

    static PNorm one() { return PNorm(Kind::One, 1.0); }
    static PNorm two() { return PNorm(Kind::Two, 2.0); }
    static PNorm inf();
    static PNorm general(double p);
    /// Accepts "1", "2", "inf" and any real > 1 (mapped onto One/Two when exact).
    static PNorm parse(std::string_view text);

    Kind kind() const noexcept { return kind_; }
    /// The exponent p; +inf for `Inf`.
    double exponent() const noexcept { return p_; }
    bool is_inf() const noexcept { return kind_ == Kind::Inf; }
    /// True when induced matrix norms can be computed (One, Two, Inf).
    bool has_exact_induced() const noexcept { return kind_ != Kind::General; }
    std::string name() const;

    friend bool operator==(const PNorm&, const PNorm&) = default;

private:
    PNorm(Kind kind, double p) : kind_(kind), p_(p) {}
    Kind kind_;
    double p_;
};

double norm(std::span<const double> v, PNorm p);
inline double norm(const Vec& v, PNorm p) { return norm(v.entries(), p); }

/// Exact induced norm for p in {1, 2, inf}. The 2-norm is the largest singular
/// value from one-sided Jacobi. Throws for `General`; use norm_upper_bound.
double induced_norm(const Mat& a, PNorm p);

/// Interpolation bound ||A||_1^(1/p) ||A||_inf^(1-1/p), always >= the induced p-norm.
double norm_upper_bound(const Mat& a, PNorm p);

/// Induced norm when exact is available, interpolation upper bound otherwise.
double matrix_norm(const Mat& a, PNorm p);

double spectral_norm(const Mat& a);

Mat zero_pad_matrix(const Mat& w, std::size_t rows, std::size_t cols);
/// `l x l` extension with `w` in the top-left block.
Mat zero_pad_matrix(const Mat& w, std::size_t l);
Vec zero_pad_vector(const Vec& b, std::size_t l);

/// Semi-infinite vector: `head` followed by the constant `tail` forever.
class EventuallyConstSeq {
public:
    EventuallyConstSeq(std::vector<double> head, double tail);
    static EventuallyConstSeq zero_extended(const Vec& v) { return {v.data(), 0.0}; }

    std::span<const double> head() const noexcept { return head_; }
    std::size_t head_size() const noexcept { return head_.size(); }
    double tail() const noexcept { return tail_; }
    double at(std::size_t i) const { return i < head_.size() ? head_[i] : tail_; }

    /// First `count` entries (count >= 1).
    Vec truncate(std::size_t count) const;

    /// Norm in l_p(N): +inf for p < inf whenever the tail is non-zero.
    double norm(PNorm p) const;
    /// Norm in R^ambient (ambient >= head size) or l_p(N) when ambient is empty.
    double norm(PNorm p, std::optional<std::size_t> ambient) const;

    friend bool operator==(const EventuallyConstSeq&, const EventuallyConstSeq&) = default;

private:
    std::vector<double> head_;
    double tail_;
};

EventuallyConstSeq operator-(const EventuallyConstSeq& a, const EventuallyConstSeq& b);

/// Lower-triangular banded Toeplitz operator generated by a filter mask
/// [w_0..w_tau]: entry (i, j) = w_{i-j} for 0 <= i - j <= tau.
class BandedToeplitz {
public:
    static BandedToeplitz finite(Vec mask, std::size_t in_cols);
    static BandedToeplitz semi_infinite(Vec mask);

    const Vec& mask() const noexcept { return mask_; }
    std::size_t tau() const noexcept { return mask_.dim() - 1; }
    bool is_semi_infinite() const noexcept { return !in_cols_.has_value(); }
    std::size_t in_cols() const;
    std::size_t out_rows() const;
    double entry(std::size_t i, std::size_t j) const;

    /// Dense `(in_cols + tau) x in_cols` form; finite operators only.
    Mat to_dense() const;
    /// Convolution of `x` (dim in_cols) with the mask; finite operators only.
    Vec apply(const Vec& x) const;

private:
    BandedToeplitz(Vec mask, std::optional<std::size_t> in_cols)
        : mask_(std::move(mask)), in_cols_(in_cols) {}
    Vec mask_;
    std::optional<std::size_t> in_cols_;
};

BandedToeplitz toeplitz_from_mask(const Vec& mask, std::size_t in_cols);

/// Induced norm of the semi-infinite form: sum |w_k| (exact for p in {1, inf},
/// an upper bound otherwise). Finite operators must go through induced_norm.
double toeplitz_norm(const BandedToeplitz& t, PNorm p);

/// Exact action of a semi-infinite banded Toeplitz operator on an
/// eventually-constant sequence. The head grows by tau and the new tail is
/// (sum_k w_k) * x.tail.
EventuallyConstSeq apply_banded(const BandedToeplitz& t, const EventuallyConstSeq& x);

}  // namespace dnc
