#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mrst {

enum class GeometryKind { parallel = 0, fan_equidistant = 1 };

/// 2D acquisition geometry. Views are uniform over [0, pi) for parallel beam
/// and [0, 2 pi) for fan beam; detector bin k sits at
/// s_k = (k - (n_det - 1) / 2) * det_spacing. For fan beam the flat detector
/// is dsd from the source and spacing is measured on the detector.
struct Geometry {
    GeometryKind kind = GeometryKind::parallel;
    int n_views = 180;
    int n_det = 192;
    double det_spacing = 1.0;  // mm
    double dso = 0.0;          // source to isocenter, mm (fan only)
    double dsd = 0.0;          // source to detector, mm (fan only)

    double view_angle(int v) const;
    double det_coord(int k) const { return (k - 0.5 * (n_det - 1)) * det_spacing; }
    std::size_t rays() const { return static_cast<std::size_t>(n_views) * static_cast<std::size_t>(n_det); }
    bool operator==(const Geometry&) const = default;
};

void validate_geometry(const Geometry& g);

/// Parallel-beam geometry with uniform views over [0, pi).
Geometry parallel_geometry(int n_views, int n_det, double det_spacing);
Geometry fan_geometry(int n_views, int n_det, double det_spacing, double dso, double dsd);

/// n_views x n_det array, row-major by view.
class Projections {
public:
    Projections() = default;
    Projections(int n_views, int n_det, double fill = 0.0);

    int n_views() const { return n_views_; }
    int n_det() const { return n_det_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int view, int bin) { return data_[index(view, bin)]; }
    double operator()(int view, int bin) const { return data_[index(view, bin)]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> row(int view) { return {data_.data() + index(view, 0), static_cast<std::size_t>(n_det_)}; }
    std::span<const double> row(int view) const {
        return {data_.data() + index(view, 0), static_cast<std::size_t>(n_det_)};
    }
    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    bool matches(const Geometry& g) const { return n_views_ == g.n_views && n_det_ == g.n_det; }
    bool operator==(const Projections&) const = default;

private:
    std::size_t index(int view, int bin) const {
        return static_cast<std::size_t>(view) * static_cast<std::size_t>(n_det_) + static_cast<std::size_t>(bin);
    }

    int n_views_ = 0;
    int n_det_ = 0;
    std::vector<double> data_;
};

double dot(const Projections& a, const Projections& b);

}  // namespace mrst
