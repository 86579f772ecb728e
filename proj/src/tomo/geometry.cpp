#include "mrst/tomo/geometry.hpp"

#include <cmath>
#include <numbers>

#include "mrst/core/errors.hpp"

namespace mrst {

double Geometry::view_angle(int v) const {
    const double span = kind == GeometryKind::parallel ? std::numbers::pi : 2.0 * std::numbers::pi;
    return span * v / n_views;
}

void validate_geometry(const Geometry& g) {
    require(g.kind == GeometryKind::parallel || g.kind == GeometryKind::fan_equidistant, "unknown geometry kind");
    require(g.n_views >= 1 && g.n_det >= 1, "geometry needs n_views >= 1 and n_det >= 1");
    require(g.det_spacing > 0.0 && std::isfinite(g.det_spacing), "detector spacing must be positive");
    if (g.kind == GeometryKind::fan_equidistant) {
        require(g.dso > 0.0 && g.dsd > g.dso && std::isfinite(g.dsd),
                "fan beam needs 0 < source-to-isocenter < source-to-detector");
    }
}

Geometry parallel_geometry(int n_views, int n_det, double det_spacing) {
    Geometry g{GeometryKind::parallel, n_views, n_det, det_spacing, 0.0, 0.0};
    validate_geometry(g);
    return g;
}

Geometry fan_geometry(int n_views, int n_det, double det_spacing, double dso, double dsd) {
    Geometry g{GeometryKind::fan_equidistant, n_views, n_det, det_spacing, dso, dsd};
    validate_geometry(g);
    return g;
}

Projections::Projections(int n_views, int n_det, double fill) : n_views_(n_views), n_det_(n_det) {
    require(n_views >= 1 && n_det >= 1, "projection array needs positive dimensions");
    data_.assign(static_cast<std::size_t>(n_views) * static_cast<std::size_t>(n_det), fill);
}

double dot(const Projections& a, const Projections& b) {
    require(a.n_views() == b.n_views() && a.n_det() == b.n_det(), "projection shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace mrst
