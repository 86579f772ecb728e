#include "mrst/cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mrst/core/errors.hpp"

namespace mrst::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

const std::set<std::string> kPatchKeys = {"patch", "patch_w", "patch_h", "stride", "stride_x", "stride_y", "boundary"};

std::set<std::string> with_patch(std::set<std::string> keys) {
    keys.insert(kPatchKeys.begin(), kPatchKeys.end());
    return keys;
}

}  // namespace

const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"phantom", {"preset", "ellipses", "width", "height", "pixel_size", "pixel_x", "pixel_y"}},
        {"geometry", {"kind", "views", "bins", "spacing", "dso", "dsd", "image_width", "image_height", "pixel_size"}},
        {"dose", {"i0", "seed", "noiseless", "weights"}},
        {"train", with_patch({"images", "layers", "eta1", "eta2", "iterations", "max_patches", "seed", "log_every"})},
        {"recon.fbp", {"filter"}},
        {"recon.ep", {"beta", "delta", "iters", "subsets", "solver", "init", "sweep_beta"}},
        {"recon.st", with_patch({"model", "beta", "gamma1", "outer_iters", "inner_iters", "subsets", "solver", "init",
                                 "sweep_beta", "sweep_gamma1"})},
        {"recon.mrst2", with_patch({"model", "beta", "gamma1", "gamma2", "outer_iters", "inner_iters", "subsets",
                                    "solver", "init", "sweep_beta", "sweep_gamma1", "sweep_gamma2"})},
        {"metrics", {"roi", "peak"}},
    };
    return schema;
}

bool is_path_key(const std::string& section, const std::string& key) {
    if (key == "ellipses" || key == "images" || key == "model") return true;
    // init is a path unless it names a built-in initializer
    return key == "init" && section.rfind("recon.", 0) == 0;
}

double parse_number(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != t.size()) throw ArgumentError(what + ": expected a number, got '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& what) {
    const double v = parse_number(s, what);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw ArgumentError(what + ": expected an integer, got '" + s + "'");
    return static_cast<int>(v);
}

std::vector<double> parse_number_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(parse_number(item, what));
    require(!out.empty(), what + ": empty list");
    return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::filesystem::path& base_dir) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(text);
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw FormatError("config: " + e.message() + " at line " + std::to_string(e.line()));
    }
    ExperimentConfig cfg;
    cfg.base_dir_ = base_dir;
    const auto& schema = config_schema();
    for (const auto& [section, body] : tree) {
        const auto known = schema.find(section);
        if (body.empty() || known == schema.end()) {
            if (known == schema.end())
                throw ArgumentError("config: unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!value.empty()) throw ArgumentError("config: nested key " + section + "." + key);
            if (!known->second.count(key)) throw ArgumentError("config: unknown key '" + key + "' in [" + section + "]");
            cfg.values_[section][key] = trim(value.data());
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ArgumentError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    ExperimentConfig cfg = parse(ss.str(), std::filesystem::absolute(path).parent_path());
    cfg.source_ = std::filesystem::absolute(path);
    return cfg;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    return s != values_.end() && s->second.count(key);
}

std::optional<std::string> ExperimentConfig::text(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    if (s == values_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::optional<double> ExperimentConfig::number(const std::string& section, const std::string& key) const {
    const auto t = text(section, key);
    if (!t) return std::nullopt;
    return parse_number(*t, section + "." + key);
}

std::optional<int> ExperimentConfig::integer(const std::string& section, const std::string& key) const {
    const auto t = text(section, key);
    if (!t) return std::nullopt;
    return parse_int(*t, section + "." + key);
}

std::optional<bool> ExperimentConfig::flag(const std::string& section, const std::string& key) const {
    const auto t = text(section, key);
    if (!t) return std::nullopt;
    std::string v = *t;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ArgumentError(section + "." + key + ": expected true or false, got '" + *t + "'");
}

std::optional<std::filesystem::path> ExperimentConfig::path(const std::string& section, const std::string& key) const {
    const auto t = text(section, key);
    if (!t) return std::nullopt;
    const std::filesystem::path p(*t);
    return p.is_absolute() ? p : base_dir_ / p;
}

std::optional<std::vector<std::string>> ExperimentConfig::list(const std::string& section,
                                                               const std::string& key) const {
    const auto t = text(section, key);
    if (!t) return std::nullopt;
    auto items = split(*t, ',');
    if (is_path_key(section, key))
        for (auto& item : items)
            if (!std::filesystem::path(item).is_absolute()) item = (base_dir_ / item).string();
    return items;
}

std::optional<std::vector<double>> ExperimentConfig::numbers(const std::string& section,
                                                             const std::string& key) const {
    const auto t = text(section, key);
    if (!t) return std::nullopt;
    return parse_number_list(*t, section + "." + key);
}

}  // namespace mrst::cli
