#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mrst::cli {

/// `key = value` experiment file with sections [phantom], [geometry], [dose],
/// [train], [recon.fbp], [recon.ep], [recon.st], [recon.mrst2], [metrics].
/// Unknown sections or keys are rejected at load time. Path-valued keys are
/// resolved against the directory holding the file.
class ExperimentConfig {
public:
    ExperimentConfig() = default;
    static ExperimentConfig load(const std::filesystem::path& path);
    static ExperimentConfig parse(const std::string& text, const std::filesystem::path& base_dir);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> text(const std::string& section, const std::string& key) const;
    std::optional<double> number(const std::string& section, const std::string& key) const;
    std::optional<int> integer(const std::string& section, const std::string& key) const;
    std::optional<bool> flag(const std::string& section, const std::string& key) const;
    std::optional<std::filesystem::path> path(const std::string& section, const std::string& key) const;
    std::optional<std::vector<std::string>> list(const std::string& section, const std::string& key) const;
    std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) const;

    const std::filesystem::path& source() const { return source_; }

private:
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::filesystem::path base_dir_;
    std::filesystem::path source_;
};

/// Keys accepted in each section.
const std::map<std::string, std::set<std::string>>& config_schema();

/// Keys whose values are file paths (resolved relative to the config file).
bool is_path_key(const std::string& section, const std::string& key);

double parse_number(const std::string& s, const std::string& what);
int parse_int(const std::string& s, const std::string& what);
std::vector<double> parse_number_list(const std::string& s, const std::string& what);

}  // namespace mrst::cli
