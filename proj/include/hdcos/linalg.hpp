#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

#include "hdcos/fixed_ring.hpp"

namespace hdcos {

using Vec = Eigen::VectorXd;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline bool is_pow2(std::size_t d) { return d != 0 && (d & (d - 1)) == 0; }
std::size_t next_pow2(std::size_t d);

// In-place unnormalized Walsh-Hadamard butterfly: d log2(d) adds/subs.
// Works over doubles and over ring shares (wrapping adds), which is what
// lets each party apply H to its own shares locally.
template <typename T>
void fwht_butterfly(T* data, std::size_t d) {
    for (std::size_t stride = 1; stride < d; stride <<= 1) {
        for (std::size_t base = 0; base < d; base += stride << 1) {
            for (std::size_t j = base; j < base + stride; ++j) {
                const T u = data[j];
                const T v = data[j + stride];
                data[j] = u + v;
                data[j + stride] = u - v;
            }
        }
    }
}

// Normalized fast Walsh-Hadamard transform, an involution (H H = I).
void fwht(std::span<double> x);
Vec fwht(Vec x);

// Explicit normalized Hadamard matrix; the test oracle for fwht.
Mat hadamard_naive(std::size_t d);

// Structured matvecs, all equal to the explicit-matrix product.
Vec hd_matvec(const Vec& diag, const Vec& x);                       // H (diag ⊙ x)
Vec lowrank_matvec(const Mat& V1, const Mat& V2, const Vec& x);     // V1^T (V2 x)
Vec circulant_matvec(const Vec& first_col, const Vec& x);
// P is one Gaussian nonzero per row: value p_vals[r] at column p_cols[r].
Vec phd_matvec(std::span<const int> p_cols, const Vec& p_vals, const Vec& diag, const Vec& x);

// Random Fourier feature map for a shift-invariant kernel: rows of W are
// frequency samples, phases uniform on [0, 2pi), phi(x) = scale * cos(Wx+b).
struct RffMap {
    Mat W;       // D x d
    Vec b;       // D
    double scale = 0.0;  // sqrt(2 / D)
};

// W ~ N(0, 1/sigma^2) gives the Gaussian kernel exp(-|x-y|^2 / (2 sigma^2)).
RffMap make_gaussian_rff(std::size_t d, std::size_t n_features, double sigma, std::uint64_t seed);
Mat rff_features(const Mat& X, const RffMap& map);  // n x D
double gaussian_kernel(const Vec& x, const Vec& y, double sigma);

}  // namespace hdcos
