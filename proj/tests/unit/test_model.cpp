#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mrst/core/errors.hpp"
#include "mrst/core/linalg.hpp"
#include "mrst/model/two_layer.hpp"
#include "support/oracles.hpp"

using namespace mrst;
using namespace mrst::testing;

namespace {

TwoLayerModel identity_model(int p) {
    return TwoLayerModel{Matrix::Identity(p, p), Matrix::Identity(p, p), 0.0, 0.0, 2};
}

TwoLayerModel random_model(std::mt19937_64& rng, int p) {
    return TwoLayerModel{random_orthogonal(rng, p), random_orthogonal(rng, p), 1.0, 1.0, 2};
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

// Eq. (4) style cost for W1 with the other blocks fixed.
double w1_cost(const Matrix& w1, const Matrix& w2, const Matrix& r1, const Matrix& z1, const Matrix& z2) {
    const Matrix r2 = w1 * r1 - z1;
    return r2.squaredNorm() + (w2 * r2 - z2).squaredNorm();
}

}  // namespace

TEST_CASE("sparse_code_layer1 fixed examples") {
    const TwoLayerModel m = identity_model(2);
    CHECK(sparse_code_layer1(vec({3, 1}), Matrix::Zero(2, 1), m, 2.0 * std::sqrt(2.0)) == Matrix(vec({3, 0})));
    CHECK(sparse_code_layer1(vec({2, 0}), vec({2, 0}), m, std::sqrt(2.0)) == Matrix(vec({1, 0})));
    CHECK_THROWS_AS(sparse_code_layer1(Matrix::Zero(3, 1), Matrix::Zero(2, 1), m, 1.0), ArgumentError);
    CHECK_THROWS_AS(sparse_code_layer1(vec({1, 1}), Matrix::Zero(2, 2), m, 1.0), ArgumentError);
    CHECK_THROWS_AS(sparse_code_layer1(vec({1, 1}), Matrix::Zero(2, 1), m, -1.0), ArgumentError);
}

TEST_CASE("sparse_code_layer1 matches support enumeration on random instances") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 60; ++t) {
        const int p = 2 + t % 2;
        const TwoLayerModel m = random_model(rng, p);
        const Matrix r1 = random_matrix(rng, p, 1, 2.0);
        const Matrix z2 = random_matrix(rng, p, 1, 1.0);
        const double theta = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        const Matrix z1 = sparse_code_layer1(r1, z2, m, theta);
        const double got = z1_cost(m.w1, m.w2, r1, z1, z2, theta);
        const double best = z1_brute_force(m.w1, m.w2, r1.col(0), z2.col(0), theta);
        CHECK(got <= best + 1e-10);
        CHECK(got >= best - 1e-10);
    }
}

TEST_CASE("sparse_code_layer2 fixed examples and brute force") {
    std::mt19937_64 rng(12);
    const TwoLayerModel rm = random_model(rng, 3);
    const Matrix r1 = random_matrix(rng, 3, 4);
    const Matrix exact = rm.w1 * r1;
    CHECK(sparse_code_layer2(r1, exact, rm, 0.5).isZero(1e-14));

    // W1 = W2 = I, residual [5; -1].
    const TwoLayerModel id = identity_model(2);
    CHECK(sparse_code_layer2(vec({5, -1}), Matrix::Zero(2, 1), id, 2.0) == Matrix(vec({5, 0})));

    for (int t = 0; t < 30; ++t) {
        const TwoLayerModel m = random_model(rng, 3);
        const Matrix x = random_matrix(rng, 3, 5, 2.0);
        const Matrix z1 = random_matrix(rng, 3, 5);
        const double theta = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        const Matrix z2 = sparse_code_layer2(x, z1, m, theta);
        const Matrix v = m.w2 * (m.w1 * x - z1);
        const double got = (v - z2).squaredNorm() + theta * theta * double(nnz(z2));
        CHECK(got == doctest::Approx(z2_brute_force(v, theta)).epsilon(1e-12));
    }
}

TEST_CASE("update_transform1 fixed examples") {
    std::mt19937_64 rng(13);
    const TwoLayerModel id = identity_model(3);
    const Matrix r1 = random_matrix(rng, 3, 10);
    const Matrix w = update_transform1(r1, r1, Matrix::Zero(3, 10), id);
    CHECK((w - Matrix::Identity(3, 3)).norm() < 1e-10);

    Matrix z1(2, 2);
    z1 << 2, 0, 0, -3;
    const Matrix wd = update_transform1(Matrix::Identity(2, 2), z1, Matrix::Zero(2, 2), identity_model(2));
    Matrix expect(2, 2);
    expect << 1, 0, 0, -1;
    CHECK((wd - expect).norm() < 1e-12);

    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const Matrix ws = update_transform1(Matrix::Identity(2, 2), swap, Matrix::Zero(2, 2), identity_model(2));
    CHECK((ws - swap).norm() < 1e-12);

    for (const Matrix& zz : {z1, swap}) {
        const double sweep = orthogonal_2x2_sweep([&](const Matrix& cand) {
            return w1_cost(cand, Matrix::Identity(2, 2), Matrix::Identity(2, 2), zz, Matrix::Zero(2, 2));
        });
        const Matrix got = update_transform1(Matrix::Identity(2, 2), zz, Matrix::Zero(2, 2), identity_model(2));
        CHECK(w1_cost(got, Matrix::Identity(2, 2), Matrix::Identity(2, 2), zz, Matrix::Zero(2, 2)) <= sweep + 1e-8);
    }
}

TEST_CASE("update_transform2 fixed examples") {
    std::mt19937_64 rng(14);
    TwoLayerModel m = random_model(rng, 3);
    m.w2 = Matrix::Identity(3, 3);
    const Matrix r1 = random_matrix(rng, 3, 12);
    const Matrix z1 = random_matrix(rng, 3, 12);
    const Matrix resid = m.w1 * r1 - z1;
    CHECK((update_transform2(r1, z1, resid, m) - Matrix::Identity(3, 3)).norm() < 1e-10);

    const TwoLayerModel keep = random_model(rng, 3);
    CHECK(update_transform2(r1, z1, Matrix::Zero(3, 12), keep) == keep.w2);
    CHECK(update_transform1(r1, Matrix::Zero(3, 12), Matrix::Zero(3, 12), keep) == keep.w1);
}

TEST_CASE("transform updates beat the 2x2 angle sweep") {
    std::mt19937_64 rng(15);
    for (int t = 0; t < 10; ++t) {
        const TwoLayerModel m = random_model(rng, 2);
        const Matrix r1 = random_matrix(rng, 2, 6, 2.0);
        const Matrix z1 = random_matrix(rng, 2, 6);
        const Matrix z2 = random_matrix(rng, 2, 6);
        const Matrix w1 = update_transform1(r1, z1, z2, m);
        const double s1 = orthogonal_2x2_sweep([&](const Matrix& c) { return w1_cost(c, m.w2, r1, z1, z2); });
        CHECK(w1_cost(w1, m.w2, r1, z1, z2) <= s1 + 1e-8);
        CHECK(orthogonality_error(w1) < 1e-10);

        const Matrix r2 = m.w1 * r1 - z1;
        const Matrix w2 = update_transform2(r1, z1, z2, m);
        const double s2 = orthogonal_2x2_sweep([&](const Matrix& c) { return (c * r2 - z2).squaredNorm(); });
        CHECK((w2 * r2 - z2).squaredNorm() <= s2 + 1e-8);
        CHECK(orthogonality_error(w2) < 1e-10);
    }
}

TEST_CASE("objective_p0 fixed examples and independent evaluation") {
    const TwoLayerModel id = identity_model(2);
    CHECK(objective_p0(Matrix::Zero(2, 3), {Matrix::Zero(2, 3), Matrix::Zero(2, 3)}, id, 1.0, 1.0) == 0.0);
    CHECK(objective_p0(vec({2, 0}), {vec({2, 0}), Matrix::Zero(2, 1)}, id, 1.0, 1.0) == 1.0);
    CHECK(objective_regularizer(vec({2, 0}), {vec({2, 0}), Matrix::Zero(2, 1)}, id, 1.0, 1.0) == 1.0);

    std::mt19937_64 rng(16);
    for (int t = 0; t < 10; ++t) {
        const TwoLayerModel m = random_model(rng, 4);
        const Matrix r1 = random_matrix(rng, 4, 9);
        const SparseCodes codes{hard_threshold(random_matrix(rng, 4, 9), 0.7), hard_threshold(random_matrix(rng, 4, 9), 0.7)};
        const double e1 = 0.3 + t;
        const double e2 = 1.1 * t;
        // Column-by-column evaluation straight from the formula.
        double expect = 0.0;
        for (int j = 0; j < 9; ++j) {
            const Vector a = m.w1 * r1.col(j) - codes.z1.col(j);
            const Vector b = m.w2 * a - codes.z2.col(j);
            expect += a.squaredNorm() + b.squaredNorm();
            for (int i = 0; i < 4; ++i) {
                if (codes.z1(i, j) != 0.0) expect += e1 * e1;
                if (codes.z2(i, j) != 0.0) expect += e2 * e2;
            }
        }
        CHECK(objective_p0(r1, codes, m, e1, e2) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK_THROWS_AS(objective_p0(vec({2, 0}), {Matrix::Zero(2, 2), Matrix::Zero(2, 1)}, id, 1.0, 1.0), ArgumentError);
}

TEST_CASE("each BCD sub-step never increases the training objective") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        const int p = 2 + t % 5;
        TwoLayerModel m = random_model(rng, p);
        const double e1 = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
        const double e2 = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
        const Matrix r1 = random_matrix(rng, p, 40, 2.0);
        SparseCodes c{hard_threshold(random_matrix(rng, p, 40), 1.0), hard_threshold(random_matrix(rng, p, 40), 1.0)};
        double prev = objective_p0(r1, c, m, e1, e2);
        auto step = [&](auto&& apply) {
            apply();
            const double now = objective_p0(r1, c, m, e1, e2);
            CHECK(now <= prev * (1.0 + 1e-9) + 1e-12);
            prev = now;
        };
        step([&] { c.z1 = sparse_code_layer1(r1, c.z2, m, e1); });
        step([&] { m.w1 = update_transform1(r1, c.z1, c.z2, m); });
        step([&] { c.z2 = sparse_code_layer2(r1, c.z1, m, e2); });
        step([&] { m.w2 = update_transform2(r1, c.z1, c.z2, m); });
        CHECK(orthogonality_error(m.w1) < 1e-10);
        CHECK(orthogonality_error(m.w2) < 1e-10);
    }
}

TEST_CASE("layer-1 coding reduces to single-layer thresholding when Z2 = 0 and W2 = I") {
    std::mt19937_64 rng(18);
    TwoLayerModel m = random_model(rng, 5);
    m.w2 = Matrix::Identity(5, 5);
    const Matrix x = random_matrix(rng, 5, 20, 3.0);
    const double gamma = 1.3;
    CHECK(sparse_code_layer1(x, Matrix::Zero(5, 20), m, gamma * std::sqrt(2.0)) ==
          hard_threshold(m.w1 * x, gamma * std::sqrt(2.0) / std::sqrt(2.0)));
    CHECK(sparse_code_single(x, m, gamma) == hard_threshold(m.w1 * x, gamma));
}

TEST_CASE("regularizer_gradient") {
    std::mt19937_64 rng(19);
    const Grid g{16, 16, 1.0, 1.0};
    const PatchConfig cfg{4, 4, 1, 1, Boundary::clip};
    const TwoLayerModel m = random_model(rng, 16);
    const Image x = random_image(rng, g, 0.0, 100.0);
    const Matrix xp = extract_patches(x, cfg).data;

    SUBCASE("stationary codes give zero gradient") {
        const SparseCodes c{m.w1 * xp, Matrix::Zero(16, xp.cols())};
        const Image grad = regularizer_gradient(x, c, m, 0.7, cfg);
        for (double v : grad.values()) CHECK(std::abs(v) < 1e-9);
    }

    SUBCASE("central differences") {
        const SparseCodes c{hard_threshold(m.w1 * xp, 30.0), hard_threshold(random_matrix(rng, 16, xp.cols(), 20.0), 10.0)};
        const double beta = 0.37;
        auto f = [&](const Image& z) {
            const Matrix zp = extract_patches(z, cfg).data;
            const Matrix r2 = m.w1 * zp - c.z1;
            return beta * (r2.squaredNorm() + (m.w2 * r2 - c.z2).squaredNorm());
        };
        const Image fd = central_difference_gradient(f, x, 1e-6 * 100.0);
        CHECK(relative_error(regularizer_gradient(x, c, m, beta, cfg), fd) < 1e-6);
    }

    SUBCASE("second difference along a pixel equals the majorizer diagonal") {
        const SparseCodes c{hard_threshold(m.w1 * xp, 30.0), hard_threshold(random_matrix(rng, 16, xp.cols(), 20.0), 10.0)};
        const double beta = 2.5;
        const Image d = regularizer_majorizer(m, beta, cfg, g);
        const Image cov = patch_coverage(cfg, g);
        const Image g0 = regularizer_gradient(x, c, m, beta, cfg);
        for (std::size_t i : {std::size_t{0}, std::size_t{17}, std::size_t{120}, std::size_t{255}}) {
            Image xe = x;
            xe[i] += 1.0;
            const Image g1 = regularizer_gradient(xe, c, m, beta, cfg);
            CHECK(g1[i] - g0[i] == doctest::Approx(4.0 * beta * cov[i]).epsilon(1e-9));
            CHECK(d[i] == doctest::Approx(4.0 * beta * cov[i]));
        }
    }
}

TEST_CASE("MRSTMDL1 round trip and unitarity check on load") {
    std::mt19937_64 rng(20);
    TwoLayerModel m = random_model(rng, 9);
    m.eta1 = 80.0;
    m.eta2 = 60.0;
    std::stringstream ss;
    write_model(ss, m);
    const std::string bytes = ss.str();
    CHECK(bytes.size() == 8 + 4 + 1 + 16 + 2 * 81 * 8);
    const TwoLayerModel back = read_model(ss);
    CHECK(back.w1 == m.w1);
    CHECK(back.w2 == m.w2);
    CHECK(back.layers == 2);
    CHECK(back.eta1 == 80.0);
    std::stringstream again;
    write_model(again, back);
    CHECK(again.str() == bytes);

    // Corrupt one W1 entry: unitarity check must reject it.
    std::string broken = bytes;
    broken[8 + 4 + 1 + 16 + 3] ^= 0x40;
    std::stringstream bs(broken);
    CHECK_THROWS_AS(read_model(bs), FormatError);

    m.w1(0, 0) += 1e-3;
    CHECK_THROWS_AS(validate_model(m), ArgumentError);
}
