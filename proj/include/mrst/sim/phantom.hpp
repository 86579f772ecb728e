#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mrst/core/image.hpp"

namespace mrst {

/// Additive ellipse: every pixel whose centre lies inside gains `hu`.
struct Ellipse {
    double cx = 0.0;  // mm
    double cy = 0.0;  // mm
    double a = 0.0;   // semi-axis along the rotated x axis, mm
    double b = 0.0;   // mm
    double theta = 0.0;  // rad, counter-clockwise
    double hu = 0.0;

    bool contains(double x, double y) const;
};

struct Phantom {
    std::vector<Ellipse> ellipses;
    Grid canvas;
};

void validate_phantom(const Phantom& p);

/// Modified HU (air 0, water 1000); pixel value is the sum over ellipses
/// containing the pixel centre.
Image make_phantom(const Phantom& p);

/// One ellipse per line: `cx cy a b theta hu`. Blank lines and `#` comments are skipped.
std::vector<Ellipse> parse_ellipses(std::istream& is);
std::vector<Ellipse> load_ellipses(const std::filesystem::path& path);
void write_ellipses(std::ostream& os, const std::vector<Ellipse>& e);

/// Centred water disk.
std::vector<Ellipse> disk_preset(double radius_mm = 40.0, double hu = 1000.0);

/// Reconstruction test object: water-equivalent body, fat rim, lungs, bone,
/// and several low-contrast inserts; fits a 128 mm field of view.
std::vector<Ellipse> body_preset();

/// Randomised body-like object used as training data; differs from body_preset
/// for every seed.
std::vector<Ellipse> training_preset(std::uint64_t seed);

/// Resolves a preset name: "disk", "body", "train:<seed>".
std::vector<Ellipse> preset(const std::string& name);

}  // namespace mrst
