#include "dnc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dnc {

namespace {

void require_finite(std::span<const double> values, const char* what)
{
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": entries must be finite");
        }
    }
}

void require_same_dim(const Vec& a, const Vec& b)
{
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("vector dimension mismatch: " + std::to_string(a.dim()) +
                                    " vs " + std::to_string(b.dim()));
    }
}

void require_same_shape(const Mat& a, const Mat& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix shape mismatch");
    }
}

double max_col_abs_sum(const Mat& a)
{
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

double max_row_abs_sum(const Mat& a)
{
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double v : a.row(i)) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

double l2(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------- Vec

Vec::Vec(std::vector<double> entries) : data_(std::move(entries))
{
    if (data_.empty()) throw std::invalid_argument("Vec: dimension must be >= 1");
    require_finite(data_, "Vec");
}

Vec::Vec(std::initializer_list<double> entries) : Vec(std::vector<double>(entries)) {}

Vec Vec::zeros(std::size_t dim) { return Vec(std::vector<double>(dim, 0.0)); }

Vec Vec::filled(std::size_t dim, double value) { return Vec(std::vector<double>(dim, value)); }

double Vec::at(std::size_t i) const
{
    if (i >= data_.size()) throw std::out_of_range("Vec::at");
    return data_[i];
}

Vec operator+(const Vec& a, const Vec& b)
{
    require_same_dim(a, b);
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
    return Vec(std::move(out));
}

Vec operator-(const Vec& a, const Vec& b)
{
    require_same_dim(a, b);
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
    return Vec(std::move(out));
}

Vec operator*(double c, const Vec& a)
{
    std::vector<double> out(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) out[i] = c * a[i];
    return Vec(std::move(out));
}

// ---------------------------------------------------------------- Mat

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major))
{
    if (rows == 0 || cols == 0) throw std::invalid_argument("Mat: rows and cols must be >= 1");
    if (data_.size() != rows * cols) {
        throw std::invalid_argument("Mat: expected " + std::to_string(rows * cols) +
                                    " entries, got " + std::to_string(data_.size()));
    }
    require_finite(data_, "Mat");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size()), cols_(0)
{
    if (rows_ == 0) throw std::invalid_argument("Mat: rows and cols must be >= 1");
    cols_ = rows.begin()->size();
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("Mat: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    if (cols_ == 0) throw std::invalid_argument("Mat: rows and cols must be >= 1");
    require_finite(data_, "Mat");
}

Mat Mat::zeros(std::size_t rows, std::size_t cols)
{
    return Mat(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Mat Mat::identity(std::size_t n)
{
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
    return Mat(n, n, std::move(d));
}

std::span<const double> Mat::row(std::size_t i) const
{
    return std::span<const double>(data_).subspan(i * cols_, cols_);
}

Mat Mat::transpose() const
{
    std::vector<double> d(rows_ * cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) d[j * rows_ + i] = (*this)(i, j);
    return Mat(cols_, rows_, std::move(d));
}

Mat Mat::block(std::size_t rows, std::size_t cols) const
{
    if (rows > rows_ || cols > cols_) throw std::invalid_argument("Mat::block: block exceeds matrix");
    std::vector<double> d(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) d[i * cols + j] = (*this)(i, j);
    return Mat(rows, cols, std::move(d));
}

Vec operator*(const Mat& a, const Vec& x)
{
    if (a.cols() != x.dim()) {
        throw std::invalid_argument("matrix-vector shape mismatch: " + std::to_string(a.cols()) +
                                    " columns vs dimension " + std::to_string(x.dim()));
    }
    std::vector<double> out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        out[i] = s;
    }
    return Vec(std::move(out));
}

Mat operator*(const Mat& a, const Mat& b)
{
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix-matrix shape mismatch");
    std::vector<double> d(a.rows() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            d[i * b.cols() + j] = s;
        }
    return Mat(a.rows(), b.cols(), std::move(d));
}

Mat operator+(const Mat& a, const Mat& b)
{
    require_same_shape(a, b);
    std::vector<double> d(a.data().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] + b.data()[i];
    return Mat(a.rows(), a.cols(), std::move(d));
}

Mat operator-(const Mat& a, const Mat& b)
{
    require_same_shape(a, b);
    std::vector<double> d(a.data().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] - b.data()[i];
    return Mat(a.rows(), a.cols(), std::move(d));
}

Mat operator*(double c, const Mat& a)
{
    std::vector<double> d(a.data().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = c * a.data()[i];
    return Mat(a.rows(), a.cols(), std::move(d));
}

// ---------------------------------------------------------------- PNorm

PNorm PNorm::inf() { return PNorm(Kind::Inf, std::numeric_limits<double>::infinity()); }

PNorm PNorm::general(double p)
{
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw std::invalid_argument("PNorm::general requires 1 < p < inf, got " + std::to_string(p));
    }
    return PNorm(Kind::General, p);
}

PNorm PNorm::parse(std::string_view text)
{
    if (text == "inf" || text == "Inf" || text == "infinity") return inf();
    std::size_t used = 0;
    double p = 0.0;
    try {
        p = std::stod(std::string(text), &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse norm '" + std::string(text) + "'");
    }
    if (used != text.size()) throw std::invalid_argument("cannot parse norm '" + std::string(text) + "'");
    if (p == 1.0) return one();
    if (p == 2.0) return two();
    if (std::isinf(p) && p > 0) return inf();
    return general(p);
}

std::string PNorm::name() const
{
    switch (kind_) {
    case Kind::One: return "1";
    case Kind::Two: return "2";
    case Kind::Inf: return "inf";
    case Kind::General: break;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", p_);
    return buf;
}

double norm(std::span<const double> v, PNorm p)
{
    switch (p.kind()) {
    case PNorm::Kind::One: {
        double s = 0.0;
        for (double x : v) s += std::abs(x);
        return s;
    }
    case PNorm::Kind::Two: return l2(v);
    case PNorm::Kind::Inf: {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    case PNorm::Kind::General: break;
    }
    const double e = p.exponent();
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), e);
    return std::pow(s, 1.0 / e);
}

// ---------------------------------------------------------------- induced norms

double spectral_norm(const Mat& a)
{
    // One-sided Jacobi: rotate column pairs until all columns are mutually
    // orthogonal; the largest column norm is then the largest singular value.
    // Works on the orientation with fewer columns.
    const bool flip = a.cols() > a.rows();
    const std::size_t rows = flip ? a.cols() : a.rows();
    const std::size_t cols = flip ? a.rows() : a.cols();
    std::vector<std::vector<double>> c(cols, std::vector<double>(rows));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) (flip ? c[i][j] : c[j][i]) = a(i, j);

    constexpr int max_sweeps = 80;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t k = 0; k < rows; ++k) {
                    alpha += c[p][k] * c[p][k];
                    beta += c[q][k] * c[q][k];
                    gamma += c[p][k] * c[q][k];
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double cs = 1.0 / std::hypot(1.0, t);
                const double sn = cs * t;
                for (std::size_t k = 0; k < rows; ++k) {
                    const double x = c[p][k];
                    const double y = c[q][k];
                    c[p][k] = cs * x - sn * y;
                    c[q][k] = sn * x + cs * y;
                }
            }
        }
        if (!rotated) break;
    }
    double best = 0.0;
    for (const auto& col : c) best = std::max(best, l2(col));
    return best;
}

double induced_norm(const Mat& a, PNorm p)
{
    switch (p.kind()) {
    case PNorm::Kind::One: return max_col_abs_sum(a);
    case PNorm::Kind::Inf: return max_row_abs_sum(a);
    case PNorm::Kind::Two: return spectral_norm(a);
    case PNorm::Kind::General: break;
    }
    throw std::invalid_argument("induced_norm: exact induced p-norm unavailable for p = " + p.name() +
                                "; use norm_upper_bound");
}

double norm_upper_bound(const Mat& a, PNorm p)
{
    const double theta = p.is_inf() ? 0.0 : 1.0 / p.exponent();
    const double n1 = max_col_abs_sum(a);
    const double ninf = max_row_abs_sum(a);
    if (theta == 1.0) return n1;
    if (theta == 0.0) return ninf;
    return std::pow(n1, theta) * std::pow(ninf, 1.0 - theta);
}

double matrix_norm(const Mat& a, PNorm p)
{
    return p.has_exact_induced() ? induced_norm(a, p) : norm_upper_bound(a, p);
}

// ---------------------------------------------------------------- padding

Mat zero_pad_matrix(const Mat& w, std::size_t rows, std::size_t cols)
{
    if (rows < w.rows() || cols < w.cols()) {
        throw std::invalid_argument("zero_pad_matrix: target " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " smaller than " +
                                    std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
    }
    std::vector<double> d(rows * cols, 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) d[i * cols + j] = w(i, j);
    return Mat(rows, cols, std::move(d));
}

Mat zero_pad_matrix(const Mat& w, std::size_t l) { return zero_pad_matrix(w, l, l); }

Vec zero_pad_vector(const Vec& b, std::size_t l)
{
    if (l < b.dim()) {
        throw std::invalid_argument("zero_pad_vector: target " + std::to_string(l) +
                                    " smaller than dimension " + std::to_string(b.dim()));
    }
    std::vector<double> d(l, 0.0);
    std::copy(b.data().begin(), b.data().end(), d.begin());
    return Vec(std::move(d));
}

// ---------------------------------------------------------------- EventuallyConstSeq

EventuallyConstSeq::EventuallyConstSeq(std::vector<double> head, double tail)
    : head_(std::move(head)), tail_(tail)
{
    require_finite(head_, "EventuallyConstSeq");
    if (!std::isfinite(tail_)) throw std::invalid_argument("EventuallyConstSeq: tail must be finite");
}

Vec EventuallyConstSeq::truncate(std::size_t count) const
{
    std::vector<double> d(count);
    for (std::size_t i = 0; i < count; ++i) d[i] = at(i);
    return Vec(std::move(d));
}

double EventuallyConstSeq::norm(PNorm p) const { return norm(p, std::nullopt); }

double EventuallyConstSeq::norm(PNorm p, std::optional<std::size_t> ambient) const
{
    if (ambient && *ambient < head_.size()) {
        throw std::invalid_argument("EventuallyConstSeq::norm: ambient dimension below head size");
    }
    const double t = std::abs(tail_);
    if (p.is_inf()) {
        double m = dnc::norm(head_, p);
        if (!ambient || *ambient > head_.size()) m = std::max(m, t);
        return m;
    }
    if (!ambient) {
        if (t != 0.0) return std::numeric_limits<double>::infinity();
        return dnc::norm(head_, p);
    }
    const auto extra = static_cast<double>(*ambient - head_.size());
    switch (p.kind()) {
    case PNorm::Kind::One: {
        double s = 0.0;
        for (double x : head_) s += std::abs(x);
        return s + extra * t;
    }
    case PNorm::Kind::Two: {
        double s = 0.0;
        for (double x : head_) s += x * x;
        return std::sqrt(s + extra * t * t);
    }
    default: {
        const double e = p.exponent();
        double s = 0.0;
        for (double x : head_) s += std::pow(std::abs(x), e);
        return std::pow(s + extra * std::pow(t, e), 1.0 / e);
    }
    }
}

EventuallyConstSeq operator-(const EventuallyConstSeq& a, const EventuallyConstSeq& b)
{
    const std::size_t h = std::max(a.head_size(), b.head_size());
    std::vector<double> d(h);
    for (std::size_t i = 0; i < h; ++i) d[i] = a.at(i) - b.at(i);
    return {std::move(d), a.tail() - b.tail()};
}

// ---------------------------------------------------------------- Toeplitz

BandedToeplitz BandedToeplitz::finite(Vec mask, std::size_t in_cols)
{
    if (in_cols == 0) throw std::invalid_argument("toeplitz: in_cols must be >= 1");
    return BandedToeplitz(std::move(mask), in_cols);
}

BandedToeplitz BandedToeplitz::semi_infinite(Vec mask) { return BandedToeplitz(std::move(mask), std::nullopt); }

std::size_t BandedToeplitz::in_cols() const
{
    if (!in_cols_) throw std::logic_error("semi-infinite Toeplitz operator has no column count");
    return *in_cols_;
}

std::size_t BandedToeplitz::out_rows() const { return in_cols() + tau(); }

double BandedToeplitz::entry(std::size_t i, std::size_t j) const
{
    if (in_cols_ && (j >= *in_cols_ || i >= out_rows())) throw std::out_of_range("toeplitz entry");
    if (i < j || i - j > tau()) return 0.0;
    return mask_[i - j];
}

Mat BandedToeplitz::to_dense() const
{
    const std::size_t rows = out_rows();
    const std::size_t cols = in_cols();
    std::vector<double> d(rows * cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t k = 0; k <= tau(); ++k) d[(j + k) * cols + j] = mask_[k];
    return Mat(rows, cols, std::move(d));
}

Vec BandedToeplitz::apply(const Vec& x) const
{
    const std::size_t cols = in_cols();
    if (x.dim() != cols) {
        throw std::invalid_argument("toeplitz apply: expected dimension " + std::to_string(cols) +
                                    ", got " + std::to_string(x.dim()));
    }
    std::vector<double> out(out_rows(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= tau(); ++k) {
            if (k > i || i - k >= cols) continue;
            s += mask_[k] * x[i - k];
        }
        out[i] = s;
    }
    return Vec(std::move(out));
}

BandedToeplitz toeplitz_from_mask(const Vec& mask, std::size_t in_cols)
{
    return BandedToeplitz::finite(mask, in_cols);
}

double toeplitz_norm(const BandedToeplitz& t, PNorm /*p*/)
{
    if (!t.is_semi_infinite()) {
        throw std::invalid_argument("toeplitz_norm: finite operator; use induced_norm(to_dense())");
    }
    return norm(t.mask(), PNorm::one());
}

EventuallyConstSeq apply_banded(const BandedToeplitz& t, const EventuallyConstSeq& x)
{
    if (!t.is_semi_infinite()) throw std::invalid_argument("apply_banded: operator must be semi-infinite");
    const auto& w = t.mask();
    const std::size_t tau = t.tau();
    std::vector<double> head(x.head_size() + tau);
    for (std::size_t i = 0; i < head.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k <= tau && k <= i; ++k) s += w[k] * x.at(i - k);
        head[i] = s;
    }
    double mask_sum = 0.0;
    for (double v : w.entries()) mask_sum += v;
    return {std::move(head), mask_sum * x.tail()};
}

}  // namespace dnc
