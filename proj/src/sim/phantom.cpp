#include "mrst/sim/phantom.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "mrst/core/errors.hpp"

namespace mrst {

bool Ellipse::contains(double x, double y) const {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double u = (x - cx) * c + (y - cy) * s;
    const double v = -(x - cx) * s + (y - cy) * c;
    return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
}

void validate_phantom(const Phantom& p) {
    validate_grid(p.canvas);
    for (const auto& e : p.ellipses) {
        require(e.a > 0.0 && e.b > 0.0, "ellipse semi-axes must be positive");
        require(std::isfinite(e.cx) && std::isfinite(e.cy) && std::isfinite(e.a) && std::isfinite(e.b) &&
                    std::isfinite(e.theta) && std::isfinite(e.hu),
                "ellipse parameters must be finite");
    }
}

Image make_phantom(const Phantom& p) {
    validate_phantom(p);
    Image img(p.canvas);
#pragma omp parallel for schedule(static)
    for (int row = 0; row < img.height(); ++row) {
        const double y = img.pixel_y(row);
        for (int col = 0; col < img.width(); ++col) {
            const double x = img.pixel_x(col);
            double v = 0.0;
            for (const auto& e : p.ellipses)
                if (e.contains(x, y)) v += e.hu;
            img(col, row) = v;
        }
    }
    return img;
}

std::vector<Ellipse> parse_ellipses(std::istream& is) {
    std::vector<Ellipse> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        Ellipse e;
        if (!(ls >> e.cx)) continue;
        if (!(ls >> e.cy >> e.a >> e.b >> e.theta >> e.hu))
            throw FormatError("phantom line " + std::to_string(lineno) + ": expected `cx cy a b theta hu`");
        std::string extra;
        if (ls >> extra) throw FormatError("phantom line " + std::to_string(lineno) + ": trailing fields");
        if (!(e.a > 0.0 && e.b > 0.0)) throw FormatError("phantom line " + std::to_string(lineno) + ": bad axes");
        out.push_back(e);
    }
    return out;
}

std::vector<Ellipse> load_ellipses(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open " + path.string());
    return parse_ellipses(is);
}

void write_ellipses(std::ostream& os, const std::vector<Ellipse>& es) {
    os.precision(17);
    os << "# cx cy a b theta hu\n";
    for (const auto& e : es) os << e.cx << ' ' << e.cy << ' ' << e.a << ' ' << e.b << ' ' << e.theta << ' ' << e.hu << '\n';
}

std::vector<Ellipse> disk_preset(double radius_mm, double hu) { return {{0.0, 0.0, radius_mm, radius_mm, 0.0, hu}}; }

std::vector<Ellipse> body_preset() {
    constexpr double deg = std::numbers::pi / 180.0;
    // Values are additive on top of the enclosing ellipses.
    return {
        {0.0, 0.0, 58.0, 44.0, 0.0, 950.0},          // fat rim
        {0.0, 0.0, 53.0, 39.0, 0.0, 90.0},           // soft tissue (1040)
        {-24.0, 4.0, 15.0, 22.0, 15.0 * deg, -790.0},  // lungs (~250)
        {24.0, 4.0, 14.0, 21.0, -15.0 * deg, -790.0},
        {0.0, -28.0, 7.0, 6.0, 0.0, 760.0},           // vertebra (1800)
        {0.0, -28.0, 3.5, 3.0, 0.0, -500.0},          // marrow (1300)
        {0.0, 6.0, 9.0, 8.0, 0.0, 60.0},             // low-contrast organ (1100)
        {10.0, 24.0, 5.0, 3.5, 30.0 * deg, -60.0},   // (980)
        {-9.0, 22.0, 3.0, 3.0, 0.0, 120.0},          // small contrast insert
        {-2.0, 6.0, 2.0, 2.0, 0.0, 200.0},           // detail inside the organ
        {36.0, -20.0, 2.5, 4.0, 0.0, 400.0},          // bright fleck
        {-34.0, -22.0, 4.0, 2.5, 0.0, -90.0},
    };
}

std::vector<Ellipse> training_preset(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto uni = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
    std::vector<Ellipse> es;
    const double ax = uni(48.0, 60.0);
    const double ay = uni(36.0, 48.0);
    es.push_back({0.0, 0.0, ax, ay, uni(-0.2, 0.2), uni(900.0, 980.0)});
    es.push_back({0.0, 0.0, ax - uni(3.0, 7.0), ay - uni(3.0, 7.0), 0.0, uni(60.0, 120.0)});
    if (u(rng) < 0.7) {
        const double ly = uni(-4.0, 8.0);
        es.push_back({-uni(18.0, 28.0), ly, uni(10.0, 16.0), uni(16.0, 24.0), uni(0.0, 0.5), uni(-820.0, -700.0)});
        es.push_back({uni(18.0, 28.0), ly, uni(10.0, 16.0), uni(16.0, 24.0), -uni(0.0, 0.5), uni(-820.0, -700.0)});
    }
    es.push_back({uni(-4.0, 4.0), -ay + uni(8.0, 14.0), uni(5.0, 9.0), uni(4.0, 7.0), 0.0, uni(600.0, 900.0)});
    const int inserts = 4 + static_cast<int>(u(rng) * 6);
    for (int i = 0; i < inserts; ++i) {
        const double r = uni(0.0, 0.6);
        const double phi = uni(0.0, 2.0 * std::numbers::pi);
        const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
        es.push_back({r * ax * std::cos(phi), r * ay * std::sin(phi), uni(1.5, 9.0), uni(1.5, 9.0),
                      uni(0.0, std::numbers::pi), sign * uni(20.0, 250.0)});
    }
    return es;
}

std::vector<Ellipse> preset(const std::string& name) {
    if (name == "disk") return disk_preset();
    if (name == "body") return body_preset();
    if (name.rfind("train:", 0) == 0) {
        const std::string num = name.substr(6);
        std::size_t used = 0;
        unsigned long long seed = 0;
        try {
            seed = std::stoull(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used == num.size() && !num.empty(), "bad training preset seed in '" + name + "'");
        return training_preset(seed);
    }
    throw ArgumentError("unknown phantom preset '" + name + "' (expected disk, body, or train:<seed>)");
}

}  // namespace mrst
