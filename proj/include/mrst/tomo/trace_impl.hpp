#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace mrst::detail {

struct Segment {
    double x0, y0, x1, y1;
};

inline Segment ray_segment(const Grid& grid, const Geometry& geom, int view, int bin) {
    const double beta = geom.view_angle(view);
    const double c = std::cos(beta);
    const double s = std::sin(beta);
    const double t = geom.det_coord(bin);
    if (geom.kind == GeometryKind::parallel) {
        // Ray { t (cos b, sin b) + u (-sin b, cos b) }, long enough to span the grid.
        const double reach = 0.5 * std::hypot(grid.width * grid.pixel_size_x, grid.height * grid.pixel_size_y) + 1.0;
        const double cx = t * c;
        const double cy = t * s;
        return {cx + reach * s, cy - reach * c, cx - reach * s, cy + reach * c};
    }
    // Source at dso (cos b, sin b); flat detector centred at (dso - dsd)(cos b, sin b).
    const double det = geom.dso - geom.dsd;
    return {geom.dso * c, geom.dso * s, det * c - t * s, det * s + t * c};
}

// Crossings of one family of grid lines, visited in increasing ray parameter.
class PlaneWalker {
public:
    PlaneWalker(double origin, double delta, double lo, double spacing, int cells, double a_start)
        : origin_(origin), delta_(delta), lo_(lo), spacing_(spacing), cells_(cells) {
        if (delta_ == 0.0) {
            index_ = -1;
            return;
        }
        step_ = delta_ > 0.0 ? 1 : -1;
        const double pos = (origin_ + a_start * delta_ - lo_) / spacing_;
        index_ = step_ > 0 ? static_cast<int>(std::floor(pos)) + 1 : static_cast<int>(std::ceil(pos)) - 1;
        index_ = std::clamp(index_, 0, cells_);
        while (valid() && alpha() <= a_start) index_ += step_;
        while (index_ - step_ >= 0 && index_ - step_ <= cells_ && alpha_at(index_ - step_) > a_start) index_ -= step_;
    }

    double next() const { return valid() ? alpha() : std::numeric_limits<double>::infinity(); }
    void advance() { index_ += step_; }

private:
    bool valid() const { return index_ >= 0 && index_ <= cells_ && delta_ != 0.0; }
    double alpha_at(int i) const { return (lo_ + i * spacing_ - origin_) / delta_; }
    double alpha() const { return alpha_at(index_); }

    double origin_, delta_, lo_, spacing_;
    int cells_;
    int index_ = -1;
    int step_ = 0;
};

template <typename Visit>
void trace_segment(const Grid& grid, const Segment& seg, Visit&& visit) {
    const double xmin = -0.5 * grid.width * grid.pixel_size_x;
    const double ymin = -0.5 * grid.height * grid.pixel_size_y;
    const double xmax = -xmin;
    const double ymax = -ymin;
    const double dx = seg.x1 - seg.x0;
    const double dy = seg.y1 - seg.y0;

    double a_min = 0.0;
    double a_max = 1.0;
    auto clip = [&](double p0, double d, double lo, double hi) {
        if (d == 0.0) return p0 >= lo && p0 < hi;
        double a0 = (lo - p0) / d;
        double a1 = (hi - p0) / d;
        if (a0 > a1) std::swap(a0, a1);
        a_min = std::max(a_min, a0);
        a_max = std::min(a_max, a1);
        return true;
    };
    if (!clip(seg.x0, dx, xmin, xmax) || !clip(seg.y0, dy, ymin, ymax) || a_max <= a_min) return;

    const double length = std::hypot(dx, dy);
    PlaneWalker xs(seg.x0, dx, xmin, grid.pixel_size_x, grid.width, a_min);
    PlaneWalker ys(seg.y0, dy, ymin, grid.pixel_size_y, grid.height, a_min);

    // Pieces of one pixel split by nearly coincident crossings are merged, so
    // each pixel is reported once with its full intersection length.
    std::size_t pending = 0;
    double pending_len = 0.0;
    bool has_pending = false;
    double cur = a_min;
    while (cur < a_max) {
        const double nx = xs.next();
        const double ny = ys.next();
        const double next = std::min({nx, ny, a_max});
        if (next > cur) {
            const double mid = 0.5 * (cur + next);
            int col = static_cast<int>(std::floor((seg.x0 + mid * dx - xmin) / grid.pixel_size_x));
            int up = static_cast<int>(std::floor((seg.y0 + mid * dy - ymin) / grid.pixel_size_y));
            col = std::clamp(col, 0, grid.width - 1);
            up = std::clamp(up, 0, grid.height - 1);
            const int row = grid.height - 1 - up;
            const std::size_t idx =
                static_cast<std::size_t>(row) * static_cast<std::size_t>(grid.width) + static_cast<std::size_t>(col);
            if (has_pending && idx == pending) {
                pending_len += (next - cur) * length;
            } else {
                if (has_pending) visit(pending, pending_len);
                pending = idx;
                pending_len = (next - cur) * length;
                has_pending = true;
            }
        }
        cur = next;
        if (nx == next) xs.advance();
        if (ny == next) ys.advance();
    }
    if (has_pending) visit(pending, pending_len);
}

}  // namespace mrst::detail

namespace mrst {

template <typename Visit>
void trace_ray(const Grid& grid, const Geometry& geom, int view, int bin, Visit&& visit) {
    detail::trace_segment(grid, detail::ray_segment(grid, geom, view, bin), visit);
}

}  // namespace mrst
