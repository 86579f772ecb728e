#include "mrst/cli/manifest.hpp"

#include <Eigen/Core>
#include <fftw3.h>

#include <cstdio>
#include <fstream>
#include <iterator>

#include "mrst/core/errors.hpp"
#include "mrst/core/io.hpp"

namespace mrst::cli {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_hash(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArgumentError("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof buf);
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(is.gcount())), h);
    }
    return hex64(h);
}

namespace {

std::string compiler() {
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
}

}  // namespace

Manifest::Manifest(std::string command, const std::vector<std::string>& argv) {
    doc_["command"] = std::move(command);
    doc_["argv"] = argv;
    doc_["cwd"] = std::filesystem::current_path().string();
    doc_["parameters"] = nlohmann::json::object();
    doc_["seeds"] = nlohmann::json::object();
    doc_["inputs"] = nlohmann::json::array();
    doc_["outputs"] = nlohmann::json::array();
    doc_["versions"] = {
        {"mrst", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"fftw", std::string(fftw_version)},
        {"compiler", compiler()},
    };
}

void Manifest::seed(const std::string& name, std::uint64_t value) { doc_["seeds"][name] = value; }

void Manifest::threads(int n) { doc_["threads"] = n; }

void Manifest::input(const std::filesystem::path& path) {
    doc_["inputs"].push_back({{"path", path.string()}, {"fnv1a64", file_hash(path)}});
}

void Manifest::output(const std::filesystem::path& path) { outputs_.push_back(path); }

std::string Manifest::dump() {
    doc_["config_hash"] = hex64(fnv1a64(doc_["parameters"].dump()));
    doc_["outputs"] = nlohmann::json::array();
    for (const auto& p : outputs_) doc_["outputs"].push_back({{"path", p.string()}, {"fnv1a64", file_hash(p)}});
    return doc_.dump(2) + "\n";
}

void Manifest::save(const std::filesystem::path& path) {
    const std::string text = dump();
    io::write_atomically(path, [&](std::ostream& os) { os << text; });
}

std::filesystem::path Manifest::beside(const std::filesystem::path& artifact) {
    std::filesystem::path p = artifact;
    p += ".manifest.json";
    return p;
}

OutputTracker::~OutputTracker() {
    if (committed_) return;
    for (const auto& p : paths_) {
        std::error_code ec;
        std::filesystem::remove(p, ec);
    }
}

}  // namespace mrst::cli
