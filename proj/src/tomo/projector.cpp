#include "mrst/tomo/projector.hpp"

#include <numeric>
#include <string>

#include "mrst/core/errors.hpp"

namespace mrst {

namespace {

// Back projection accumulates into a fixed number of per-chunk images merged in
// chunk order, independent of the worker count.
constexpr int kBackProjectChunks = 16;

std::vector<int> all_views(const Geometry& geom) {
    std::vector<int> v(static_cast<std::size_t>(geom.n_views));
    std::iota(v.begin(), v.end(), 0);
    return v;
}

void check_views(const Geometry& geom, std::span<const int> views) {
    for (int v : views) require(v >= 0 && v < geom.n_views, "view index out of range");
}

template <bool Squared>
Image back_project_impl(const Projections& sino, const Geometry& geom, const Grid& grid, std::span<const int> views) {
    validate_geometry(geom);
    validate_grid(grid);
    require(sino.matches(geom), "sinogram shape does not match geometry");
    check_views(geom, views);
    const int n = static_cast<int>(views.size());
    const int chunks = std::min(kBackProjectChunks, std::max(n, 1));
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
    for (int c = 0; c < chunks; ++c) {
        auto& acc = partial[static_cast<std::size_t>(c)];
        acc.assign(grid.size(), 0.0);
        const int begin = static_cast<int>(static_cast<long>(n) * c / chunks);
        const int end = static_cast<int>(static_cast<long>(n) * (c + 1) / chunks);
        for (int k = begin; k < end; ++k) {
            const int view = views[static_cast<std::size_t>(k)];
            for (int bin = 0; bin < geom.n_det; ++bin) {
                const double u = sino(view, bin);
                if (u == 0.0) continue;
                trace_ray(grid, geom, view, bin, [&](std::size_t j, double a) {
                    if constexpr (Squared)
                        acc[j] += a * a * u;
                    else
                        acc[j] += a * u;
                });
            }
        }
    }
    Image out(grid);
    for (const auto& acc : partial)
        for (std::size_t j = 0; j < acc.size(); ++j) out[j] += acc[j];
    return out;
}

}  // namespace

void forward_project(const Image& mu, const Geometry& geom, std::span<const int> views, Projections& out) {
    validate_geometry(geom);
    require(out.matches(geom), "projection buffer does not match geometry");
    check_views(geom, views);
    const Grid& grid = mu.grid();
    const auto& px = mu.raw();
    const int n = static_cast<int>(views.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < n; ++k) {
        const int view = views[static_cast<std::size_t>(k)];
        for (int bin = 0; bin < geom.n_det; ++bin) {
            double sum = 0.0;
            trace_ray(grid, geom, view, bin, [&](std::size_t j, double a) { sum += a * px[j]; });
            out(view, bin) = sum;
        }
    }
}

Projections forward_project(const Image& mu, const Geometry& geom) {
    validate_geometry(geom);
    Projections out(geom.n_views, geom.n_det);
    const auto views = all_views(geom);
    forward_project(mu, geom, views, out);
    return out;
}

Image back_project(const Projections& sino, const Geometry& geom, const Grid& grid, std::span<const int> views) {
    return back_project_impl<false>(sino, geom, grid, views);
}

Image back_project(const Projections& sino, const Geometry& geom, const Grid& grid) {
    const auto views = all_views(geom);
    return back_project_impl<false>(sino, geom, grid, views);
}

Image back_project_squared(const Projections& u, const Geometry& geom, const Grid& grid) {
    const auto views = all_views(geom);
    return back_project_impl<true>(u, geom, grid, views);
}

Image data_majorizer(const Geometry& geom, const Projections& weights, const Grid& grid) {
    require(weights.matches(geom), "weights do not match geometry");
    for (double w : weights.values()) require(w >= 0.0, "statistical weights must be nonnegative");
    Projections a1 = forward_project(Image(grid, 1.0), geom);
    for (std::size_t i = 0; i < a1.size(); ++i) a1[i] *= weights[i];
    return back_project(a1, geom, grid);
}

std::vector<std::vector<int>> ordered_subsets(int n_views, int subsets) {
    require(subsets >= 1 && subsets <= n_views, "subset count must be in [1, n_views]");
    std::vector<std::vector<int>> out(static_cast<std::size_t>(subsets));
    for (int v = 0; v < n_views; ++v) out[static_cast<std::size_t>(v % subsets)].push_back(v);
    return out;
}

namespace serial {

Projections forward_project(const Image& mu, const Geometry& geom) {
    validate_geometry(geom);
    Projections out(geom.n_views, geom.n_det);
    for (int view = 0; view < geom.n_views; ++view)
        for (int bin = 0; bin < geom.n_det; ++bin) {
            double sum = 0.0;
            trace_ray(mu.grid(), geom, view, bin, [&](std::size_t j, double a) { sum += a * mu[j]; });
            out(view, bin) = sum;
        }
    return out;
}

Image back_project(const Projections& sino, const Geometry& geom, const Grid& grid) {
    validate_geometry(geom);
    require(sino.matches(geom), "sinogram shape does not match geometry");
    Image out(grid);
    for (int view = 0; view < geom.n_views; ++view)
        for (int bin = 0; bin < geom.n_det; ++bin) {
            const double u = sino(view, bin);
            trace_ray(grid, geom, view, bin, [&](std::size_t j, double a) { out[j] += a * u; });
        }
    return out;
}

}  // namespace serial
}  // namespace mrst
