#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "mrst/core/image.hpp"

namespace mrst::io {

// Little-endian primitives shared by every MRST*1 binary format.
void write_magic(std::ostream& os, std::string_view magic);
void expect_magic(std::istream& is, std::string_view magic);
void write_u8(std::ostream& os, std::uint8_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_f64(std::ostream& os, double v);
std::uint8_t read_u8(std::istream& is);
std::uint32_t read_u32(std::istream& is);
double read_f64(std::istream& is);
void expect_eof(std::istream& is);

/// "MRSTIMG1": magic, u32 width, u32 height, f64 pixel_size_x, f64 pixel_size_y,
/// then width*height f64 values row-major.
void write_image(std::ostream& os, const Image& img);
Image read_image(std::istream& is);
void save_image(const std::filesystem::path& path, const Image& img);
Image load_image(const std::filesystem::path& path);

/// 16-bit binary PGM (P5) preview, values mapped linearly from [lo, hi] to [0, 65535].
void save_pgm16(const std::filesystem::path& path, const Image& img, double lo, double hi);

/// Writes via a temporary sibling file and renames on success, so a failed
/// write never leaves a partial artifact behind.
template <typename Fn>
void write_atomically(const std::filesystem::path& path, Fn&& write);

}  // namespace mrst::io

#include "mrst/core/io_impl.hpp"
