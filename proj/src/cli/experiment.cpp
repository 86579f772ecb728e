#include "mrst/cli/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "mrst/core/errors.hpp"

namespace mrst::cli {

Method parse_method(const std::string& text) {
    std::string name = text;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name == "fbp") return Method::fbp;
    if (name == "ep") return Method::ep;
    if (name == "st") return Method::st;
    if (name == "mrst2") return Method::mrst2;
    throw ArgumentError("unknown method '" + text + "' (expected fbp, ep, st or mrst2)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::fbp: return "fbp";
        case Method::ep: return "ep";
        case Method::st: return "st";
        case Method::mrst2: return "mrst2";
    }
    return {};
}

std::string method_label(Method m) {
    switch (m) {
        case Method::fbp: return "FBP";
        case Method::ep: return "EP";
        case Method::st: return "ST";
        case Method::mrst2: return "MRST2";
    }
    return {};
}

int method_layers(Method m) {
    if (m == Method::st) return 1;
    if (m == Method::mrst2) return 2;
    return 0;
}

SolverKind parse_solver(const std::string& name) {
    if (name == "mm") return SolverKind::mm;
    if (name == "oslalm") return SolverKind::oslalm;
    throw ArgumentError("unknown solver '" + name + "' (expected mm or oslalm)");
}

std::string solver_name(SolverKind s) { return s == SolverKind::mm ? "mm" : "oslalm"; }

FbpWindow parse_window(const std::string& name) {
    if (name == "hanning") return FbpWindow::hanning;
    if (name == "ramp") return FbpWindow::ramp;
    throw ArgumentError("unknown filter '" + name + "' (expected hanning or ramp)");
}

std::string window_name(FbpWindow w) { return w == FbpWindow::hanning ? "hanning" : "ramp"; }

Boundary parse_boundary(const std::string& name) {
    if (name == "clip") return Boundary::clip;
    if (name == "wrap") return Boundary::wrap;
    throw ArgumentError("unknown boundary '" + name + "' (expected clip or wrap)");
}

std::string boundary_name(Boundary b) { return b == Boundary::clip ? "clip" : "wrap"; }

EpConfig default_ep_config() {
    EpConfig cfg;
    cfg.beta = 2e-7;
    cfg.delta = 10.0;
    cfg.iters = 50;
    cfg.subsets = 6;
    return cfg;
}

ReconConfig default_recon_config(Method m) {
    ReconConfig cfg;
    cfg.outer_iters = 40;
    cfg.inner_iters = 2;
    cfg.subsets = 4;
    if (m == Method::st) {
        cfg.beta = 3e-5;
        cfg.gamma1 = 30.0;
        cfg.gamma2 = 0.0;
    } else {
        cfg.beta = 1.5e-5;
        cfg.gamma1 = 40.0;
        cfg.gamma2 = 25.0;
    }
    return cfg;
}

MethodRun run_method(Method m, const Sinogram& sino, const Grid& grid, const MethodParams& params, const Image* init,
                     const TwoLayerModel* model) {
    validate_grid(grid);
    if (m == Method::fbp) return {fbp(sino, grid, params.filter), {}};

    Image x0 = init ? *init : fbp(sino, grid, params.filter);
    require(x0.grid() == grid, "initial image grid does not match the reconstruction grid");
    if (m == Method::ep) {
        auto r = reconstruct_ep(sino, params.ep, x0);
        return {std::move(r.image), std::move(r.objective)};
    }
    require(model != nullptr, method_name(m) + " needs a transform model");
    require(model->layers == method_layers(m), method_name(m) + " needs a " + std::to_string(method_layers(m)) +
                                                   "-layer model, got " + std::to_string(model->layers));
    if (!init) x0 = reconstruct_ep(sino, params.ep, x0).image;
    auto r = reconstruct_transform(sino, *model, params.recon, x0);
    return {std::move(r.image), std::move(r.objective)};
}

Image match_truth(const Image& truth, const Grid& grid) {
    const Grid& t = truth.grid();
    if (t == grid) return truth;
    const bool square = t.pixel_size_x == t.pixel_size_y && grid.pixel_size_x == grid.pixel_size_y;
    if (square && grid.width > 0 && t.width % grid.width == 0) {
        const int factor = t.width / grid.width;
        if (factor > 0 && t.height == factor * grid.height &&
            std::abs(t.pixel_size_x * factor - grid.pixel_size_x) <= 1e-9 * grid.pixel_size_x)
            return downsample_area(truth, factor);
    }
    throw ArgumentError("truth grid " + std::to_string(t.width) + "x" + std::to_string(t.height) +
                        " is not an integer refinement of the reconstruction grid " + std::to_string(grid.width) +
                        "x" + std::to_string(grid.height));
}

Score score(const Image& estimate, const Image& truth, double roi_fraction, std::optional<double> peak) {
    const Image t = match_truth(truth, estimate.grid());
    const RoiMask roi = circular_roi(t.width(), t.height(), roi_fraction);
    return {rmse(estimate, t, roi), psnr(estimate, t, roi, peak)};
}

SweepAxes default_sweep_axes(Method m) {
    SweepAxes a;
    if (m == Method::ep) {
        a.beta = {1e-7, 2e-7, 4e-7, 8e-7};
    } else if (m == Method::st) {
        a.beta = {1e-5, 2e-5, 4e-5, 8e-5};
        a.gamma1 = {20.0, 30.0, 45.0};
    } else if (m == Method::mrst2) {
        a.beta = {5e-6, 1e-5, 2e-5, 4e-5};
        a.gamma1 = {30.0, 45.0, 60.0};
        a.gamma2 = {12.0, 25.0};
    }
    return a;
}

namespace {

double log_step(const std::vector<double>& axis) {
    if (axis.size() < 2) return 1.0;
    const double lo = axis.front();
    const double hi = axis.back();
    if (!(lo > 0.0) || !(hi > 0.0) || lo == hi) return 1.0;
    return std::pow(hi / lo, 1.0 / static_cast<double>(axis.size() - 1));
}

}  // namespace

SweepResult grid_search(Method m, const Sinogram& sino, const Grid& grid, const MethodParams& base,
                        const SweepAxes& axes, const Image& truth, double roi_fraction, std::optional<double> peak,
                        const Image* init, const TwoLayerModel* model, const SweepProgress& progress) {
    require(m != Method::fbp, "sweep: fbp has no parameters to tune");
    require(!axes.beta.empty(), "sweep: empty beta list");
    require(axes.refine >= 0, "sweep: refine must be >= 0");
    const int layers = method_layers(m);
    require(layers < 1 || !axes.gamma1.empty(), "sweep: empty gamma1 list");
    require(layers < 2 || !axes.gamma2.empty(), "sweep: empty gamma2 list");
    const Image t = match_truth(truth, grid);

    Image x0 = init ? *init : fbp(sino, grid, base.filter);
    if (layers > 0 && !init) x0 = reconstruct_ep(sino, base.ep, x0).image;

    SweepResult result;
    std::map<std::tuple<double, double, double>, std::size_t> seen;
    auto evaluate = [&](double beta, double g1, double g2) {
        const auto key = std::make_tuple(beta, g1, g2);
        if (const auto it = seen.find(key); it != seen.end()) return it->second;
        MethodParams p = base;
        p.ep.track_objective = false;
        p.recon.track_objective = false;
        if (m == Method::ep) {
            p.ep.beta = beta;
        } else {
            p.recon.beta = beta;
            p.recon.gamma1 = g1;
            p.recon.gamma2 = g2;
        }
        Image img = run_method(m, sino, grid, p, &x0, model).image;
        const RoiMask roi = circular_roi(t.width(), t.height(), roi_fraction);
        SweepPoint pt{beta, g1, g2, {rmse(img, t, roi), psnr(img, t, roi, peak)}};
        result.points.push_back(pt);
        const std::size_t index = result.points.size() - 1;
        seen.emplace(key, index);
        if (index == 0 || pt.score.rmse < result.best_point().score.rmse) {
            result.best = index;
            result.best_image = std::move(img);
        }
        if (progress) progress(pt);
        return index;
    };

    const std::vector<double> none{m == Method::mrst2 ? base.recon.gamma2 : 0.0};
    const std::vector<double> g1_axis = layers >= 1 ? axes.gamma1 : std::vector<double>{0.0};
    const std::vector<double> g2_axis = layers >= 2 ? axes.gamma2 : none;
    for (double b : axes.beta)
        for (double g1 : g1_axis)
            for (double g2 : g2_axis) evaluate(b, g1, g2);

    const double steps[3] = {log_step(axes.beta), layers >= 1 ? log_step(axes.gamma1) : 1.0,
                             layers >= 2 ? log_step(axes.gamma2) : 1.0};
    for (int round = 1; round <= axes.refine; ++round) {
        for (int dim = 0; dim < 3; ++dim) {
            if (steps[dim] == 1.0) continue;
            const double f = std::pow(steps[dim], std::pow(0.5, round));
            const SweepPoint centre = result.best_point();
            for (double scale : {1.0 / f, f}) {
                double v[3] = {centre.beta, centre.gamma1, centre.gamma2};
                v[dim] *= scale;
                evaluate(v[0], v[1], v[2]);
            }
        }
    }
    return result;
}

std::string format_fixed(double v, int digits) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string render_comparison(const std::vector<std::string>& intensities, const std::vector<Method>& methods,
                         const std::map<std::pair<Method, std::string>, Score>& cells) {
    const int w0 = 8;
    const int w1 = 6;
    const int wc = 10;
    std::ostringstream os;
    os << "RMSE in HU (first row) and PSNR in dB (second row)\n";
    os << std::left << std::setw(w0) << "" << std::setw(w1) << "" << std::right;
    for (std::size_t i = 0; i < intensities.size(); ++i) os << std::setw(wc) << (i == 0 ? "Intensity" : "");
    os << '\n';
    os << std::left << std::setw(w0) << "Method" << std::setw(w1) << "" << std::right;
    for (const auto& i : intensities) os << std::setw(wc) << i;
    os << '\n';
    const std::size_t rule = static_cast<std::size_t>(w0 + w1 + wc * static_cast<int>(intensities.size()));
    os << std::string(rule, '-') << '\n';
    for (Method m : methods) {
        for (int row = 0; row < 2; ++row) {
            os << std::left << std::setw(w0) << (row == 0 ? method_label(m) : "") << std::setw(w1)
               << (row == 0 ? "RMSE" : "PSNR") << std::right;
            for (const auto& i : intensities) {
                const auto it = cells.find({m, i});
                os << std::setw(wc)
                   << (it == cells.end() ? std::string("-")
                                         : format_fixed(row == 0 ? it->second.rmse : it->second.psnr, 1));
            }
            os << '\n';
        }
        os << std::string(rule, '-') << '\n';
    }
    return os.str();
}

}  // namespace mrst::cli
