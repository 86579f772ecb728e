#include "mrst/tomo/sinogram.hpp"

#include <cmath>
#include <fstream>

#include "mrst/core/errors.hpp"
#include "mrst/core/io.hpp"

namespace mrst {

void validate_sinogram(const Sinogram& s) {
    validate_geometry(s.geometry);
    require(s.y.matches(s.geometry) && s.weights.matches(s.geometry), "sinogram arrays do not match geometry");
    for (double v : s.y.values()) require(std::isfinite(v), "sinogram contains non-finite values");
    for (double w : s.weights.values()) require(std::isfinite(w) && w >= 0.0, "weights must be finite and >= 0");
}

void write_sinogram(std::ostream& os, const Sinogram& s) {
    validate_sinogram(s);
    const Geometry& g = s.geometry;
    const bool fan = g.kind == GeometryKind::fan_equidistant;
    io::write_magic(os, "MRSTSIN1");
    io::write_u8(os, static_cast<std::uint8_t>(g.kind));
    io::write_u32(os, static_cast<std::uint32_t>(g.n_views));
    io::write_u32(os, static_cast<std::uint32_t>(g.n_det));
    io::write_f64(os, g.det_spacing);
    io::write_f64(os, fan ? g.dso : 0.0);
    io::write_f64(os, fan ? g.dsd : 0.0);
    for (double v : s.y.values()) io::write_f64(os, v);
    for (double v : s.weights.values()) io::write_f64(os, v);
}

Sinogram read_sinogram(std::istream& is) {
    io::expect_magic(is, "MRSTSIN1");
    Geometry g;
    const auto kind = io::read_u8(is);
    if (kind > 1) throw FormatError("MRSTSIN1: unknown geometry kind");
    g.kind = static_cast<GeometryKind>(kind);
    const auto nv = io::read_u32(is);
    const auto nd = io::read_u32(is);
    if (nv == 0 || nd == 0 || nv > (1u << 16) || nd > (1u << 16)) throw FormatError("MRSTSIN1: bad dimensions");
    g.n_views = static_cast<int>(nv);
    g.n_det = static_cast<int>(nd);
    g.det_spacing = io::read_f64(is);
    g.dso = io::read_f64(is);
    g.dsd = io::read_f64(is);
    Sinogram s{g, Projections(g.n_views, g.n_det), Projections(g.n_views, g.n_det)};
    for (auto& v : s.y.values()) v = io::read_f64(is);
    for (auto& v : s.weights.values()) v = io::read_f64(is);
    try {
        validate_sinogram(s);
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("MRSTSIN1: ") + e.what());
    }
    return s;
}

void save_sinogram(const std::filesystem::path& path, const Sinogram& s) {
    io::write_atomically(path, [&](std::ostream& os) { write_sinogram(os, s); });
}

Sinogram load_sinogram(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    Sinogram s = read_sinogram(is);
    io::expect_eof(is);
    return s;
}

}  // namespace mrst
