#include "hdcos/linalg.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace hdcos {

std::size_t next_pow2(std::size_t d) {
    if (d <= 1) return 1;
    return std::bit_ceil(d);
}

void fwht(std::span<double> x) {
    const std::size_t d = x.size();
    if (!is_pow2(d)) throw std::invalid_argument("fwht: length must be a power of two");
    fwht_butterfly(x.data(), d);
    const double scale = 1.0 / std::sqrt(double(d));
    for (double& v : x) v *= scale;
}

Vec fwht(Vec x) {
    fwht(std::span<double>(x.data(), std::size_t(x.size())));
    return x;
}

Mat hadamard_naive(std::size_t d) {
    if (!is_pow2(d)) throw std::invalid_argument("hadamard_naive: order must be a power of two");
    Mat H(d, d);
    const double scale = 1.0 / std::sqrt(double(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            H(long(i), long(j)) = (std::popcount(i & j) & 1) ? -scale : scale;
    return H;
}

Vec hd_matvec(const Vec& diag, const Vec& x) {
    if (diag.size() != x.size()) throw std::invalid_argument("hd_matvec: shape mismatch");
    return fwht(Vec(diag.cwiseProduct(x)));
}

Vec lowrank_matvec(const Mat& V1, const Mat& V2, const Vec& x) {
    if (V2.cols() != x.size() || V1.rows() != V2.rows())
        throw std::invalid_argument("lowrank_matvec: shape mismatch");
    return V1.transpose() * (V2 * x);
}

Vec circulant_matvec(const Vec& first_col, const Vec& x) {
    const long d = first_col.size();
    if (x.size() != d) throw std::invalid_argument("circulant_matvec: shape mismatch");
    Vec y = Vec::Zero(d);
    for (long i = 0; i < d; ++i) {
        double acc = 0.0;
        for (long j = 0; j < d; ++j) acc += first_col[(i - j + d) % d] * x[j];
        y[i] = acc;
    }
    return y;
}

Vec phd_matvec(std::span<const int> p_cols, const Vec& p_vals, const Vec& diag, const Vec& x) {
    if (long(p_cols.size()) != p_vals.size())
        throw std::invalid_argument("phd_matvec: P shape mismatch");
    const Vec h = hd_matvec(diag, x);
    Vec y(long(p_cols.size()));
    for (std::size_t r = 0; r < p_cols.size(); ++r) {
        if (p_cols[r] < 0 || long(p_cols[r]) >= h.size())
            throw std::invalid_argument("phd_matvec: P column out of range");
        y[long(r)] = p_vals[long(r)] * h[p_cols[r]];
    }
    return y;
}

RffMap make_gaussian_rff(std::size_t d, std::size_t n_features, double sigma,
                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / sigma);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    RffMap map;
    map.W = Mat(n_features, d);
    map.b = Vec(long(n_features));
    for (std::size_t i = 0; i < n_features; ++i) {
        for (std::size_t j = 0; j < d; ++j) map.W(long(i), long(j)) = normal(rng);
        map.b[long(i)] = phase(rng);
    }
    map.scale = std::sqrt(2.0 / double(n_features));
    return map;
}

Mat rff_features(const Mat& X, const RffMap& map) {
    Mat Z = X * map.W.transpose();
    Z.rowwise() += map.b.transpose();
    return map.scale * Z.array().cos().matrix();
}

double gaussian_kernel(const Vec& x, const Vec& y, double sigma) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * sigma * sigma));
}

}  // namespace hdcos
