#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mrst::cli {

inline constexpr const char* kVersion = "1.0.0";

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);
/// FNV-1a 64 of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

/// Record of one CLI run: argv, working directory, effective parameters and
/// their hash, seeds, thread count, input/output file hashes and versions.
class Manifest {
public:
    Manifest(std::string command, const std::vector<std::string>& argv);

    nlohmann::json& parameters() { return doc_["parameters"]; }
    void seed(const std::string& name, std::uint64_t value);
    void threads(int n);
    void input(const std::filesystem::path& path);
    void output(const std::filesystem::path& path);

    /// Fills config_hash and output hashes and serializes.
    std::string dump();
    void save(const std::filesystem::path& path);

    static std::filesystem::path beside(const std::filesystem::path& artifact);

private:
    nlohmann::json doc_;
    std::vector<std::filesystem::path> outputs_;
};

/// Files written by the current run, registered after each successful write.
/// Unless commit() is called, they are removed on destruction, so a failed
/// run leaves no artifacts behind.
class OutputTracker {
public:
    OutputTracker() = default;
    OutputTracker(const OutputTracker&) = delete;
    OutputTracker& operator=(const OutputTracker&) = delete;
    ~OutputTracker();

    void add(const std::filesystem::path& path) { paths_.push_back(path); }
    void commit() { committed_ = true; }

private:
    std::vector<std::filesystem::path> paths_;
    bool committed_ = false;
};

}  // namespace mrst::cli
