#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hdcos/linalg.hpp"

using namespace hdcos;

namespace {
Vec random_vec(long n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, scale);
    Vec v(n);
    for (long i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
}
}  // namespace

TEST_CASE("fwht pinned values") {
    Vec x2(2);
    x2 << 1.0, 0.0;
    const Vec y2 = fwht(x2);
    CHECK(y2[0] == doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK(y2[1] == doctest::Approx(0.70710678).epsilon(1e-8));

    Vec x4 = Vec::Ones(4);
    const Vec y4 = fwht(x4);
    CHECK(y4[0] == doctest::Approx(2.0));
    for (int i = 1; i < 4; ++i) CHECK(y4[i] == doctest::Approx(0.0).scale(1.0));

    Vec bad(6);
    bad.setZero();
    CHECK_THROWS_AS((void)fwht(bad), std::invalid_argument);
}

TEST_CASE("fwht is an involution") {
    const Vec x = random_vec(256, 1);
    const Vec round_trip = fwht(fwht(x));
    CHECK((round_trip - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fwht equals the naive normalized Hadamard multiply for all d") {
    for (std::size_t d = 2; d <= 256; d *= 2) {
        const Mat H = hadamard_naive(d);
        const Vec x = random_vec(long(d), 17 + d);
        const Vec fast = fwht(x);
        const Vec slow = H * x;
        const double rel = (fast - slow).norm() / slow.norm();
        CHECK(rel < 1e-12);
    }
}

TEST_CASE("hadamard_naive: base cases and orthogonality") {
    const Mat H1 = hadamard_naive(1);
    CHECK(H1(0, 0) == 1.0);

    const Mat H2 = hadamard_naive(2);
    CHECK(H2.row(0).norm() == doctest::Approx(1.0));
    CHECK(H2.row(1).norm() == doctest::Approx(1.0));
    CHECK(H2.row(0).dot(H2.row(1)) == doctest::Approx(0.0).scale(1.0));

    for (std::size_t d : {16ul, 64ul, 256ul}) {
        const Mat H = hadamard_naive(d);
        const Mat I = Mat::Identity(long(d), long(d));
        CHECK(((H * H) - I).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(((H * H.transpose()) - I).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("structured matvecs match explicit matrices") {
    const long d = 16;
    const Vec diag = random_vec(d, 2);
    const Vec x = random_vec(d, 3);

    // hd with identity diagonal is the transform itself
    CHECK((hd_matvec(Vec::Ones(d), x) - fwht(x)).cwiseAbs().maxCoeff() < 1e-12);

    // explicit H * D oracle
    const Mat HD = hadamard_naive(std::size_t(d)) * diag.asDiagonal().toDenseMatrix();
    CHECK((hd_matvec(diag, x) - HD * x).cwiseAbs().maxCoeff() < 1e-10);

    // identity circulant
    Vec e1 = Vec::Zero(d);
    e1[0] = 1.0;
    CHECK((circulant_matvec(e1, x) - x).cwiseAbs().maxCoeff() < 1e-12);

    // random circulant against its dense expansion
    const Vec c = random_vec(d, 4);
    Mat C(d, d);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) C(i, j) = c[(i - j + d) % d];
    CHECK((circulant_matvec(c, x) - C * x).cwiseAbs().maxCoeff() < 1e-10);

    // low rank
    Mat V1(2, d), V2(2, d);
    V1.row(0) = random_vec(d, 5).transpose();
    V1.row(1) = random_vec(d, 6).transpose();
    V2.row(0) = random_vec(d, 7).transpose();
    V2.row(1) = random_vec(d, 8).transpose();
    const Mat W = V1.transpose() * V2;
    CHECK((lowrank_matvec(V1, V2, x) - W * x).cwiseAbs().maxCoeff() < 1e-10);

    // phd against P H D assembled densely
    std::vector<int> cols{3, 7, 0, 12, 9};
    Vec vals = random_vec(5, 9);
    Mat P = Mat::Zero(5, d);
    for (int r = 0; r < 5; ++r) P(r, cols[std::size_t(r)]) = vals[r];
    const Mat PHD = P * hadamard_naive(std::size_t(d)) * diag.asDiagonal().toDenseMatrix();
    CHECK((phd_matvec(cols, vals, diag, x) - PHD * x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hd_matvec is linear") {
    const long d = 64;
    const Vec diag = random_vec(d, 10);
    const Vec x = random_vec(d, 11), y = random_vec(d, 12);
    const Vec lhs = hd_matvec(diag, 2.5 * x - 0.5 * y);
    const Vec rhs = 2.5 * hd_matvec(diag, x) - 0.5 * hd_matvec(diag, y);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rff features approximate the Gaussian kernel") {
    const std::size_t d = 8;
    const double sigma = 1.0;
    const int pairs = 200;
    std::mt19937_64 rng(13);
    std::normal_distribution<double> nd(0.0, 0.5);
    Mat X(pairs, d), Y(pairs, d);
    for (int i = 0; i < pairs; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            X(i, long(j)) = nd(rng);
            Y(i, long(j)) = nd(rng);
        }

    // k(x, x) = 1 exactly
    CHECK(gaussian_kernel(X.row(0).transpose(), X.row(0).transpose(), sigma) == 1.0);

    const RffMap map = make_gaussian_rff(d, 4096, sigma, 99);
    CHECK(map.b.minCoeff() >= 0.0);
    CHECK(map.b.maxCoeff() < 2.0 * M_PI);

    const Mat FX = rff_features(X, map);
    const Mat FY = rff_features(Y, map);
    double mean = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const double approx = FX.row(i).dot(FY.row(i));
        const double exact = gaussian_kernel(X.row(i).transpose(), Y.row(i).transpose(), sigma);
        mean += std::fabs(approx - exact);
    }
    mean /= pairs;
    CHECK(mean < 0.05);
}

TEST_CASE("rff estimator is unbiased over independent maps") {
    const std::size_t d = 4;
    const double sigma = 1.0;
    const Vec x = random_vec(long(d), 21, 0.5);
    const Vec y = random_vec(long(d), 22, 0.5);
    const double exact = gaussian_kernel(x, y, sigma);

    const int maps = 50;
    std::vector<double> estimates;
    Mat X(1, long(d)), Y(1, long(d));
    X.row(0) = x.transpose();
    Y.row(0) = y.transpose();
    for (int m = 0; m < maps; ++m) {
        const RffMap map = make_gaussian_rff(d, 256, sigma, 3000 + std::uint64_t(m));
        estimates.push_back(rff_features(X, map).row(0).dot(rff_features(Y, map).row(0)));
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= maps;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= (maps - 1);
    const double stderr_mean = std::sqrt(var / maps);
    CHECK(std::fabs(mean - exact) <= 3.0 * stderr_mean);
}

TEST_CASE("rff error is non-increasing in the feature count") {
    const std::size_t d = 8;
    const double sigma = 1.0;
    const int pairs = 200;
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd(0.0, 0.5);
    Mat X(pairs, d), Y(pairs, d);
    for (int i = 0; i < pairs; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            X(i, long(j)) = nd(rng);
            Y(i, long(j)) = nd(rng);
        }
    double prev = 1e9;
    for (std::size_t D : {64ul, 256ul, 1024ul, 4096ul}) {
        const RffMap map = make_gaussian_rff(d, D, sigma, 500 + D);
        const Mat FX = rff_features(X, map);
        const Mat FY = rff_features(Y, map);
        double mean = 0.0;
        for (int i = 0; i < pairs; ++i)
            mean += std::fabs(FX.row(i).dot(FY.row(i)) -
                              gaussian_kernel(X.row(i).transpose(), Y.row(i).transpose(), sigma));
        mean /= pairs;
        CHECK(mean <= prev + 0.005);  // within run-to-run noise
        prev = mean;
    }
}
