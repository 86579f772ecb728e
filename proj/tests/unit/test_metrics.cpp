#include <doctest.h>

#include <cmath>
#include <random>

#include "mrst/core/errors.hpp"
#include "mrst/metrics/metrics.hpp"
#include "support/oracles.hpp"

using namespace mrst;
using namespace mrst::testing;

TEST_CASE("circular_roi") {
    const RoiMask c = circular_roi(3, 3, 0.34);
    CHECK(c.count == 1);
    CHECK(c.inside[4]);

    const RoiMask big = circular_roi(128, 128, 1.0);
    const double area = std::numbers::pi * 64.0 * 64.0;
    CHECK(std::abs(double(big.count) - area) / area < 0.01);

    for (int n : {7, 32, 33}) {
        const RoiMask m = circular_roi(n, n, 0.8);
        for (int r = 0; r < n; ++r)
            for (int col = 0; col < n; ++col)
                CHECK(m.inside[std::size_t(r * n + col)] == m.inside[std::size_t(col * n + (n - 1 - r))]);
    }
    std::size_t total = 0;
    const RoiMask rect = circular_roi(40, 20, 1.0);
    for (bool b : rect.inside) total += b;
    CHECK(total == rect.count);
    CHECK(rect.inside[std::size_t(10 * 40 + 20)]);
    CHECK(!rect.inside[std::size_t(10 * 40 + 5)]);

    CHECK_THROWS_AS(circular_roi(5, 5, 0.0), ArgumentError);
    CHECK_THROWS_AS(circular_roi(5, 5, 1.5), ArgumentError);
    CHECK_THROWS_AS(circular_roi(0, 5, 0.5), ArgumentError);
}

TEST_CASE("rmse and psnr") {
    std::mt19937_64 rng(61);
    const Grid g{32, 32, 1.0, 1.0};
    const Image x = random_image(rng, g, 0.0, 1500.0);
    const RoiMask roi = circular_roi(32, 32, 0.9);
    CHECK(rmse(x, x, roi) == 0.0);
    CHECK(std::isinf(psnr(x, x, roi)));
    CHECK(psnr(x, x, roi) > 0.0);

    for (double c : {-7.5, 3.0, 250.0}) {
        Image y = x;
        for (double& v : y.values()) v += c;
        CHECK(rmse(y, x, roi) == doctest::Approx(std::abs(c)).epsilon(1e-12));
    }

    // Independent evaluation over the ROI only.
    const Image y = random_image(rng, g, 0.0, 1500.0);
    double s = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!roi.inside[i]) continue;
        s += (y[i] - x[i]) * (y[i] - x[i]);
        peak = std::max(peak, x[i]);
    }
    const double e = std::sqrt(s / double(roi.count));
    CHECK(rmse(y, x, roi) == doctest::Approx(e).epsilon(1e-12));
    CHECK(std::abs(psnr(y, x, roi) - psnr_from_rmse(rmse(y, x, roi), peak)) < 1e-12);
    CHECK(psnr(y, x, roi) == doctest::Approx(20.0 * std::log10(peak / e)).epsilon(1e-12));
    CHECK(psnr(y, x, roi, 2000.0) == doctest::Approx(20.0 * std::log10(2000.0 / e)).epsilon(1e-12));

    // Differences outside the ROI are ignored.
    Image z = x;
    z[0] += 1e6;
    CHECK(!roi.inside[0]);
    CHECK(rmse(z, x, roi) == 0.0);

    CHECK(psnr_from_rmse(10.0, 10.0) == 0.0);
    CHECK(psnr_from_rmse(5.0, 10.0) - psnr_from_rmse(10.0, 10.0) == doctest::Approx(20.0 * std::log10(2.0)));
    double prev = 1e300;
    for (double r : {0.5, 1.0, 2.0, 40.0, 1000.0}) {
        CHECK(psnr_from_rmse(r, 1000.0) < prev);
        prev = psnr_from_rmse(r, 1000.0);
    }
    CHECK_THROWS_AS(psnr_from_rmse(1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(rmse(Image(Grid{31, 32, 1.0, 1.0}), x, roi), ArgumentError);
    CHECK_THROWS_AS(rmse(x, x, circular_roi(16, 16, 1.0)), ArgumentError);
    CHECK_THROWS_AS(rmse(x, x, RoiMask{32, 32, std::vector<bool>(1024, false), 0}), ArgumentError);
}

TEST_CASE("downsample_area") {
    Image img(Grid{4, 2, 0.5, 0.5});
    for (std::size_t i = 0; i < 8; ++i) img[i] = double(i);
    const Image d = downsample_area(img, 2);
    CHECK(d.width() == 2);
    CHECK(d.height() == 1);
    CHECK(d.grid().pixel_size_x == 1.0);
    CHECK(d[0] == (0 + 1 + 4 + 5) / 4.0);
    CHECK(d[1] == (2 + 3 + 6 + 7) / 4.0);
    CHECK(downsample_area(img, 1) == img);
    CHECK_THROWS_AS(downsample_area(img, 3), ArgumentError);
}
