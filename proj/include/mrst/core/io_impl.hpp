#pragma once

#include <fstream>
#include <system_error>

#include "mrst/core/errors.hpp"

namespace mrst::io {

template <typename Fn>
void write_atomically(const std::filesystem::path& path, Fn&& write) {
    auto tmp = path;
    tmp += ".partial";
    try {
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os) throw FormatError("cannot open " + tmp.string() + " for writing");
            write(os);
            os.flush();
            if (!os) throw FormatError("write failed: " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

}  // namespace mrst::io
