#include "mrst/core/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "mrst/core/errors.hpp"

namespace mrst::io {

namespace {

template <typename T>
void write_le(std::ostream& os, T v) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("unexpected end of file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T v;
    std::memcpy(&v, bytes, sizeof(T));
    return v;
}

}  // namespace

void write_magic(std::ostream& os, std::string_view magic) { os.write(magic.data(), static_cast<std::streamsize>(magic.size())); }

void expect_magic(std::istream& is, std::string_view magic) {
    std::string got(magic.size(), '\0');
    if (!is.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic)
        throw FormatError("bad magic, expected " + std::string(magic));
}

void write_u8(std::ostream& os, std::uint8_t v) { write_le(os, v); }
void write_u32(std::ostream& os, std::uint32_t v) { write_le(os, v); }
void write_f64(std::ostream& os, double v) { write_le(os, v); }
std::uint8_t read_u8(std::istream& is) { return read_le<std::uint8_t>(is); }
std::uint32_t read_u32(std::istream& is) { return read_le<std::uint32_t>(is); }
double read_f64(std::istream& is) { return read_le<double>(is); }

void expect_eof(std::istream& is) {
    if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

void write_image(std::ostream& os, const Image& img) {
    write_magic(os, "MRSTIMG1");
    write_u32(os, static_cast<std::uint32_t>(img.width()));
    write_u32(os, static_cast<std::uint32_t>(img.height()));
    write_f64(os, img.grid().pixel_size_x);
    write_f64(os, img.grid().pixel_size_y);
    for (double v : img.values()) write_f64(os, v);
}

Image read_image(std::istream& is) {
    expect_magic(is, "MRSTIMG1");
    Grid g;
    const auto w = read_u32(is);
    const auto h = read_u32(is);
    if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) throw FormatError("MRSTIMG1: bad dimensions");
    g.width = static_cast<int>(w);
    g.height = static_cast<int>(h);
    g.pixel_size_x = read_f64(is);
    g.pixel_size_y = read_f64(is);
    if (!(g.pixel_size_x > 0.0) || !(g.pixel_size_y > 0.0)) throw FormatError("MRSTIMG1: bad pixel size");
    std::vector<double> data(g.size());
    for (auto& v : data) {
        v = read_f64(is);
        if (!std::isfinite(v)) throw FormatError("MRSTIMG1: non-finite pixel value");
    }
    return Image(g, std::move(data));
}

void save_image(const std::filesystem::path& path, const Image& img) {
    write_atomically(path, [&](std::ostream& os) { write_image(os, img); });
}

Image load_image(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    Image img = read_image(is);
    expect_eof(is);
    return img;
}

void save_pgm16(const std::filesystem::path& path, const Image& img, double lo, double hi) {
    require(hi > lo, "display window must satisfy hi > lo");
    write_atomically(path, [&](std::ostream& os) {
        os << "P5\n" << img.width() << ' ' << img.height() << "\n65535\n";
        for (double v : img.values()) {
            const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
            const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
            // PGM stores 16-bit samples big-endian.
            const char bytes[2] = {static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
            os.write(bytes, 2);
        }
    });
}

}  // namespace mrst::io
