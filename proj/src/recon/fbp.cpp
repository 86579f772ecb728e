#include "mrst/recon/fbp.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "mrst/core/errors.hpp"
#include "mrst/sim/simulate.hpp"

namespace mrst {

namespace {

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
    void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

int padded_length(int n) {
    int len = 1;
    while (len < 2 * n) len *= 2;
    return len;
}

}  // namespace

Image fbp_mu(const Projections& y, const Geometry& geom, const Grid& grid, FbpWindow window) {
    validate_geometry(geom);
    validate_grid(grid);
    if (geom.kind != GeometryKind::parallel)
        throw UnsupportedGeometryError("fbp: only parallel-beam geometry is supported");
    require(y.matches(geom), "fbp: sinogram shape does not match geometry");

    const int n = geom.n_det;
    const int len = padded_length(n);
    const int nfreq = len / 2 + 1;
    const double tau = geom.det_spacing;

    std::unique_ptr<double, FftwFree> buf(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
    std::unique_ptr<fftw_complex, FftwFree> spec(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nfreq)));
    Plan fwd(fftw_plan_dft_r2c_1d(len, buf.get(), spec.get(), FFTW_ESTIMATE));
    Plan inv(fftw_plan_dft_c2r_1d(len, spec.get(), buf.get(), FFTW_ESTIMATE));

    // Band-limited ramp: h[0] = 1/(4 tau^2), h[odd k] = -1/(k pi tau)^2, placed circularly.
    double* h = buf.get();
    for (int i = 0; i < len; ++i) {
        const int k = i <= len / 2 ? i : i - len;
        if (k == 0)
            h[i] = 1.0 / (4.0 * tau * tau);
        else if (k % 2 != 0)
            h[i] = -1.0 / (std::numbers::pi * std::numbers::pi * k * k * tau * tau);
        else
            h[i] = 0.0;
    }
    fftw_execute(fwd.get());
    std::vector<double> filter(static_cast<std::size_t>(nfreq));
    for (int f = 0; f < nfreq; ++f) {
        double win = 1.0;
        if (window == FbpWindow::hanning) win = 0.5 * (1.0 + std::cos(std::numbers::pi * f / (len / 2)));
        // tau from the discrete convolution, 1/len from the unnormalized inverse FFT.
        filter[static_cast<std::size_t>(f)] = spec.get()[f][0] * win * tau / len;
    }

    Projections q(geom.n_views, n);
    for (int v = 0; v < geom.n_views; ++v) {
        const auto row = y.row(v);
        for (int i = 0; i < len; ++i) buf.get()[i] = i < n ? row[i] : 0.0;
        fftw_execute(fwd.get());
        for (int f = 0; f < nfreq; ++f) {
            spec.get()[f][0] *= filter[static_cast<std::size_t>(f)];
            spec.get()[f][1] *= filter[static_cast<std::size_t>(f)];
        }
        fftw_execute(inv.get());
        auto out = q.row(v);
        for (int i = 0; i < n; ++i) out[i] = buf.get()[i];
    }

    std::vector<double> cs(static_cast<std::size_t>(geom.n_views));
    std::vector<double> sn(static_cast<std::size_t>(geom.n_views));
    for (int v = 0; v < geom.n_views; ++v) {
        cs[static_cast<std::size_t>(v)] = std::cos(geom.view_angle(v));
        sn[static_cast<std::size_t>(v)] = std::sin(geom.view_angle(v));
    }
    Image mu(grid);
    const double center = 0.5 * (n - 1);
    const double weight = std::numbers::pi / geom.n_views;
#pragma omp parallel for schedule(static)
    for (int row = 0; row < grid.height; ++row) {
        const double py = mu.pixel_y(row);
        for (int col = 0; col < grid.width; ++col) {
            const double px = mu.pixel_x(col);
            double acc = 0.0;
            for (int v = 0; v < geom.n_views; ++v) {
                const double s = px * cs[static_cast<std::size_t>(v)] + py * sn[static_cast<std::size_t>(v)];
                const double t = s / tau + center;
                const double fl = std::floor(t);
                const int i0 = static_cast<int>(fl);
                const double frac = t - fl;
                const auto qv = q.row(v);
                if (i0 >= 0 && i0 < n) acc += (1.0 - frac) * qv[i0];
                if (i0 + 1 >= 0 && i0 + 1 < n) acc += frac * qv[i0 + 1];
            }
            mu(col, row) = acc * weight;
        }
    }
    return mu;
}

Image fbp(const Sinogram& sino, const Grid& grid, FbpWindow window) {
    return mu_to_hu(fbp_mu(sino.y, sino.geometry, grid, window));
}

}  // namespace mrst
