#include "mrst/cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "mrst/cli/config.hpp"
#include "mrst/cli/experiment.hpp"
#include "mrst/cli/manifest.hpp"
#include "mrst/core/errors.hpp"
#include "mrst/core/io.hpp"
#include "mrst/core/parallel.hpp"
#include "mrst/learning/train.hpp"
#include "mrst/sim/phantom.hpp"
#include "mrst/sim/simulate.hpp"

namespace mrst::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

template <typename T>
struct Flag {
    T value{};
    CLI::Option* opt = nullptr;
    bool given() const { return opt != nullptr && opt->count() > 0; }
    std::optional<T> get() const { return given() ? std::optional<T>(value) : std::nullopt; }
};

template <typename T>
CLI::Option* add(CLI::App* app, const std::string& name, Flag<T>& f, const std::string& help) {
    f.opt = app->add_option(name, f.value, help);
    return f.opt;
}

template <typename T>
T pick(const std::optional<T>& flag, const std::optional<T>& cfg, T fallback) {
    if (flag) return *flag;
    if (cfg) return *cfg;
    return fallback;
}

struct Window {
    double lo = 800.0;
    double hi = 1200.0;
};

Window parse_window_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ArgumentError("--window: expected lo:hi, got '" + s + "'");
    Window w{parse_number(s.substr(0, colon), "--window"), parse_number(s.substr(colon + 1), "--window")};
    require(w.hi > w.lo, "--window: hi must exceed lo");
    return w;
}

// Shortest text that parses back to the same double.
std::string exact(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

struct Global {
    Flag<std::string> config;
    Flag<int> threads;
    ExperimentConfig cfg;
    std::vector<std::string> argv;
};

// Shared image-grid flags for reconstruct and sweep.
struct GridFlags {
    Flag<int> width, height;
    Flag<double> pixel;
    void attach(CLI::App* app) {
        add(app, "--width", width, "Reconstruction grid width (pixels)");
        add(app, "--height", height, "Reconstruction grid height (pixels)");
        add(app, "--pixel", pixel, "Reconstruction pixel size (mm)");
    }
    Grid resolve(const ExperimentConfig& cfg) const {
        Grid g;
        g.width = pick(width.get(), cfg.integer("geometry", "image_width"), 128);
        g.height = pick(height.get(), cfg.integer("geometry", "image_height"), g.width);
        g.pixel_size_x = g.pixel_size_y = pick(pixel.get(), cfg.number("geometry", "pixel_size"), 1.0);
        validate_grid(g);
        return g;
    }
};

struct PatchFlags {
    Flag<int> patch, patch_w, patch_h, stride, stride_x, stride_y;
    Flag<std::string> boundary;
    void attach(CLI::App* app) {
        add(app, "--patch", patch, "Square patch size (pixels)");
        add(app, "--patch-w", patch_w, "Patch width (pixels)");
        add(app, "--patch-h", patch_h, "Patch height (pixels)");
        add(app, "--stride", stride, "Patch stride in both directions");
        add(app, "--stride-x", stride_x, "Horizontal patch stride");
        add(app, "--stride-y", stride_y, "Vertical patch stride");
        add(app, "--boundary", boundary, "Patch boundary mode: clip or wrap");
    }
    PatchConfig resolve(const ExperimentConfig& cfg, const std::string& section, int default_size) const {
        PatchConfig p;
        const int square = pick(patch.get(), cfg.integer(section, "patch"), default_size);
        p.patch_w = pick(patch_w.get(), patch.given() ? std::nullopt : cfg.integer(section, "patch_w"), square);
        p.patch_h = pick(patch_h.get(), patch.given() ? std::nullopt : cfg.integer(section, "patch_h"), square);
        const int s = pick(stride.get(), cfg.integer(section, "stride"), 1);
        p.stride_x = pick(stride_x.get(), stride.given() ? std::nullopt : cfg.integer(section, "stride_x"), s);
        p.stride_y = pick(stride_y.get(), stride.given() ? std::nullopt : cfg.integer(section, "stride_y"), s);
        p.boundary = parse_boundary(pick(boundary.get(), cfg.text(section, "boundary"), std::string("clip")));
        require(p.patch_w >= 1 && p.patch_h >= 1, "patch dimensions must be >= 1");
        require(p.stride_x >= 1 && p.stride_y >= 1, "patch strides must be >= 1");
        return p;
    }
};

json patch_json(const PatchConfig& p) {
    return {{"patch_w", p.patch_w},
            {"patch_h", p.patch_h},
            {"stride_x", p.stride_x},
            {"stride_y", p.stride_y},
            {"boundary", boundary_name(p.boundary)}};
}

json grid_json(const Grid& g) {
    return {{"width", g.width}, {"height", g.height}, {"pixel_x", g.pixel_size_x}, {"pixel_y", g.pixel_size_y}};
}

json ep_json(const EpConfig& c) {
    return {{"beta", c.beta},
            {"delta", c.delta},
            {"iters", c.iters},
            {"subsets", c.subsets},
            {"solver", solver_name(c.solver)}};
}

json recon_json(const ReconConfig& c, int layers) {
    json j = {{"beta", c.beta},
              {"gamma1", c.gamma1},
              {"outer_iters", c.outer_iters},
              {"inner_iters", c.inner_iters},
              {"subsets", c.subsets},
              {"solver", solver_name(c.solver)},
              {"patch", patch_json(c.patch)}};
    if (layers == 2) j["gamma2"] = c.gamma2;
    return j;
}

// Method settings shared by reconstruct and sweep: defaults < [recon.*] < flags.
struct MethodFlags {
    Flag<std::string> model, init, filter, solver;
    Flag<double> beta, delta, gamma1, gamma2;
    Flag<int> iters, outer, inner, subsets;
    PatchFlags patch;
    void attach(CLI::App* app) {
        add(app, "--model", model, "Transform model file (st, mrst2)");
        add(app, "--init", init, "Initial image: fbp, ep, or an image file");
        add(app, "--filter", filter, "FBP window: hanning or ramp");
        add(app, "--solver", solver, "Image-update solver: oslalm or mm");
        add(app, "--beta", beta, "Regularization weight");
        add(app, "--delta", delta, "Edge-preserving potential scale (HU)");
        add(app, "--gamma1", gamma1, "First-layer sparsity threshold");
        add(app, "--gamma2", gamma2, "Second-layer sparsity threshold");
        add(app, "--iters", iters, "EP iterations");
        add(app, "--outer", outer, "Outer iterations (st, mrst2)");
        add(app, "--inner", inner, "Image-update passes per outer iteration (st, mrst2)");
        add(app, "--subsets", subsets, "Ordered subsets");
        patch.attach(app);
    }
};

struct ResolvedMethod {
    Method method;
    MethodParams params;
    std::optional<TwoLayerModel> model;
    std::string init;  // "fbp", "ep" or a path
    fs::path model_path;
};

EpConfig ep_from_config(const ExperimentConfig& cfg) {
    EpConfig ep = default_ep_config();
    ep.beta = cfg.number("recon.ep", "beta").value_or(ep.beta);
    ep.delta = cfg.number("recon.ep", "delta").value_or(ep.delta);
    ep.iters = cfg.integer("recon.ep", "iters").value_or(ep.iters);
    ep.subsets = cfg.integer("recon.ep", "subsets").value_or(ep.subsets);
    if (auto s = cfg.text("recon.ep", "solver")) ep.solver = parse_solver(*s);
    return ep;
}

std::optional<std::string> init_from_config(const ExperimentConfig& cfg, const std::string& section) {
    const auto t = cfg.text(section, "init");
    if (!t) return std::nullopt;
    if (*t == "fbp" || *t == "ep") return *t;
    return cfg.path(section, "init")->string();
}

ResolvedMethod resolve_method(Method m, const MethodFlags& f, const ExperimentConfig& cfg) {
    ResolvedMethod r;
    r.method = m;
    const std::string section = "recon." + method_name(m);
    r.params.filter = parse_window(pick(f.filter.get(), cfg.text("recon.fbp", "filter"), std::string("hanning")));
    r.params.ep = ep_from_config(cfg);
    r.params.ep.track_objective = false;
    if (m == Method::fbp) return r;

    r.init = pick(f.init.get(), init_from_config(cfg, section), std::string(m == Method::ep ? "fbp" : "ep"));
    if (m == Method::ep) {
        EpConfig& ep = r.params.ep;
        ep.beta = f.beta.get().value_or(ep.beta);
        ep.delta = f.delta.get().value_or(ep.delta);
        ep.iters = f.iters.get().value_or(ep.iters);
        ep.subsets = f.subsets.get().value_or(ep.subsets);
        if (f.solver.given()) ep.solver = parse_solver(f.solver.value);
        ep.track_objective = true;
        validate_ep_config(ep);
        return r;
    }
    require(r.init != "fbp", method_name(m) + ": --init must be ep or an image file");
    validate_ep_config(r.params.ep);

    const auto model_path = f.model.given() ? std::optional<fs::path>(f.model.value) : cfg.path(section, "model");
    require(model_path.has_value(), method_name(m) + " needs --model");
    r.model_path = *model_path;
    r.model = load_model(*model_path);
    require(r.model->layers == method_layers(m), method_name(m) + " needs a " + std::to_string(method_layers(m)) +
                                                      "-layer model, " + model_path->string() + " has " +
                                                      std::to_string(r.model->layers));

    ReconConfig& rc = r.params.recon;
    rc = default_recon_config(m);
    rc.beta = pick(f.beta.get(), cfg.number(section, "beta"), rc.beta);
    rc.gamma1 = pick(f.gamma1.get(), cfg.number(section, "gamma1"), rc.gamma1);
    if (m == Method::mrst2) rc.gamma2 = pick(f.gamma2.get(), cfg.number(section, "gamma2"), rc.gamma2);
    rc.outer_iters = pick(f.outer.get(), cfg.integer(section, "outer_iters"), rc.outer_iters);
    rc.inner_iters = pick(f.inner.get(), cfg.integer(section, "inner_iters"), rc.inner_iters);
    rc.subsets = pick(f.subsets.get(), cfg.integer(section, "subsets"), rc.subsets);
    rc.solver = parse_solver(pick(f.solver.get(), cfg.text(section, "solver"), solver_name(rc.solver)));
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(r.model->dim()))));
    rc.patch = f.patch.resolve(cfg, section, side);
    require(rc.patch.dim() == r.model->dim(), "patch size " + std::to_string(rc.patch.patch_w) + "x" +
                                                  std::to_string(rc.patch.patch_h) + " does not match model dimension " +
                                                  std::to_string(r.model->dim()));
    rc.track_objective = true;
    validate_recon_config(rc, *r.model);
    return r;
}

json method_json(const ResolvedMethod& r) {
    json j = {{"method", method_name(r.method)}, {"filter", window_name(r.params.filter)}};
    if (r.method == Method::fbp) return j;
    j["init"] = r.init;
    j["ep"] = ep_json(r.params.ep);
    if (r.model) {
        j["model"] = r.model_path.string();
        j["recon"] = recon_json(r.params.recon, r.model->layers);
    }
    return j;
}

// Initial image for ep/st/mrst2: fbp, an EP run from fbp, or a file.
Image initial_image(const ResolvedMethod& r, const Sinogram& sino, const Grid& grid, Manifest& manifest) {
    Image x0 = fbp(sino, grid, r.params.filter);
    if (r.init == "fbp") return x0;
    if (r.init == "ep") return reconstruct_ep(sino, r.params.ep, x0).image;
    manifest.input(r.init);
    Image img = io::load_image(r.init);
    require(img.grid() == grid, "initial image " + r.init + " does not match the reconstruction grid");
    return img;
}

void save_pgm_if(const Flag<std::string>& pgm, const Flag<std::string>& window, const Image& img,
                 OutputTracker& tracker, Manifest& manifest) {
    if (!pgm.given()) return;
    const Window w = parse_window_range(window.given() ? window.value : "800:1200");
    manifest.parameters()["window"] = {w.lo, w.hi};
    io::save_pgm16(pgm.value, img, w.lo, w.hi);
    tracker.add(pgm.value);
    manifest.output(pgm.value);
}

void finish(Manifest& manifest, const fs::path& path, OutputTracker& tracker) {
    manifest.threads(parallel::threads());
    manifest.save(path);
    tracker.add(path);
    tracker.commit();
}

template <typename Fn>
void write_text(const fs::path& path, Fn&& fn) {
    io::write_atomically(path, [&](std::ostream& os) { fn(os); });
}

// ---- phantom ---------------------------------------------------------------

struct PhantomCmd {
    Flag<std::string> preset, ellipses, out, pgm, window;
    Flag<int> width, height;
    Flag<double> pixel;

    void attach(CLI::App* app) {
        add(app, "--preset", preset, "Preset: body, disk, train:<seed>");
        add(app, "--ellipses", ellipses, "Ellipse file (cx cy a b theta hu per line)");
        add(app, "--width", width, "Width (pixels)");
        add(app, "--height", height, "Height (pixels)");
        add(app, "--pixel", pixel, "Pixel size (mm)");
        add(app, "--out", out, "Output image")->required();
        add(app, "--pgm", pgm, "16-bit PGM preview");
        add(app, "--window", window, "Preview window lo:hi in HU (default 800:1200)");
    }

    void run(Global& g) {
        const auto& cfg = g.cfg;
        require(!(preset.given() && ellipses.given()), "phantom: --preset and --ellipses are exclusive");
        Manifest manifest("phantom", g.argv);
        json& params = manifest.parameters();
        Phantom ph;
        std::optional<fs::path> file;
        if (ellipses.given())
            file = fs::path(ellipses.value);
        else if (!preset.given())
            file = cfg.path("phantom", "ellipses");
        if (file) {
            manifest.input(*file);
            ph.ellipses = load_ellipses(*file);
            params["ellipses"] = file->string();
        } else {
            const std::string name = pick(preset.get(), cfg.text("phantom", "preset"), std::string("body"));
            ph.ellipses = mrst::preset(name);
            params["preset"] = name;
        }
        ph.canvas.width = pick(width.get(), cfg.integer("phantom", "width"), 128);
        ph.canvas.height = pick(height.get(), cfg.integer("phantom", "height"), ph.canvas.width);
        const double px = pick(pixel.get(), cfg.number("phantom", "pixel_size"), 1.0);
        ph.canvas.pixel_size_x = pixel.given() ? px : cfg.number("phantom", "pixel_x").value_or(px);
        ph.canvas.pixel_size_y = pixel.given() ? px : cfg.number("phantom", "pixel_y").value_or(px);
        params["grid"] = grid_json(ph.canvas);
        const Image img = make_phantom(ph);

        OutputTracker tracker;
        io::save_image(out.value, img);
        tracker.add(out.value);
        manifest.output(out.value);
        save_pgm_if(pgm, window, img, tracker, manifest);
        finish(manifest, Manifest::beside(out.value), tracker);
    }
};

// ---- simulate --------------------------------------------------------------

struct SimulateCmd {
    Flag<std::string> truth, geometry, weights, out;
    Flag<int> views, bins;
    Flag<double> spacing, dso, dsd, i0;
    Flag<std::uint64_t> seed;
    bool noiseless = false;
    CLI::Option* noiseless_opt = nullptr;

    void attach(CLI::App* app) {
        add(app, "--truth", truth, "Ground-truth image (HU)")->required();
        add(app, "--geometry", geometry, "parallel or fan");
        add(app, "--views", views, "Number of views");
        add(app, "--bins", bins, "Detector bins");
        add(app, "--spacing", spacing, "Detector spacing (mm)");
        add(app, "--dso", dso, "Source to isocenter (mm, fan)");
        add(app, "--dsd", dsd, "Source to detector (mm, fan)");
        add(app, "--i0", i0, "Incident photons per ray");
        add(app, "--seed", seed, "Noise seed");
        noiseless_opt = app->add_flag("--noiseless", noiseless, "Skip Poisson noise");
        add(app, "--weights", weights, "Statistical weights: counts or expected");
        add(app, "--out", out, "Output sinogram")->required();
    }

    void run(Global& g) {
        const auto& cfg = g.cfg;
        Manifest manifest("simulate", g.argv);
        json& params = manifest.parameters();
        const std::string kind = pick(geometry.get(), cfg.text("geometry", "kind"), std::string("parallel"));
        const int nv = pick(views.get(), cfg.integer("geometry", "views"), kind == "fan" ? 360 : 180);
        const int nb = pick(bins.get(), cfg.integer("geometry", "bins"), 192);
        const double ds = pick(spacing.get(), cfg.number("geometry", "spacing"), 1.0);
        Geometry geom;
        if (kind == "parallel") {
            geom = parallel_geometry(nv, nb, ds);
        } else if (kind == "fan") {
            geom = fan_geometry(nv, nb, ds, pick(dso.get(), cfg.number("geometry", "dso"), 500.0),
                                pick(dsd.get(), cfg.number("geometry", "dsd"), 1000.0));
        } else {
            throw ArgumentError("unknown geometry '" + kind + "' (expected parallel or fan)");
        }
        DoseConfig dose;
        dose.i0 = pick(i0.get(), cfg.number("dose", "i0"), 1e4);
        dose.seed = seed.given() ? seed.value : static_cast<std::uint64_t>(cfg.integer("dose", "seed").value_or(0));
        dose.noiseless = noiseless_opt->count() > 0 ? noiseless : cfg.flag("dose", "noiseless").value_or(false);
        const std::string wm = pick(weights.get(), cfg.text("dose", "weights"), std::string("counts"));
        if (wm == "counts")
            dose.weights = WeightMode::counts;
        else if (wm == "expected")
            dose.weights = WeightMode::expected;
        else
            throw ArgumentError("unknown weights '" + wm + "' (expected counts or expected)");

        params["geometry"] = {{"kind", kind}, {"views", nv}, {"bins", nb}, {"spacing", ds}};
        if (kind == "fan") {
            params["geometry"]["dso"] = geom.dso;
            params["geometry"]["dsd"] = geom.dsd;
        }
        params["dose"] = {{"i0", dose.i0}, {"noiseless", dose.noiseless}, {"weights", wm}};
        manifest.seed("noise", dose.seed);
        manifest.input(truth.value);

        const Image img = io::load_image(truth.value);
        const Sinogram sino = simulate_sinogram(img, geom, dose);
        OutputTracker tracker;
        save_sinogram(out.value, sino);
        tracker.add(out.value);
        manifest.output(out.value);
        finish(manifest, Manifest::beside(out.value), tracker);
    }
};

// ---- train -----------------------------------------------------------------

struct TrainCmd {
    Flag<std::vector<std::string>> images;
    Flag<int> layers, iters, max_patches, log_every;
    Flag<double> eta1, eta2;
    Flag<std::uint64_t> seed;
    Flag<std::string> out, log;
    PatchFlags patch;

    void attach(CLI::App* app) {
        add(app, "--images", images, "Training images")->expected(1, -1);
        add(app, "--layers", layers, "1 or 2");
        add(app, "--eta1", eta1, "First-layer threshold");
        add(app, "--eta2", eta2, "Second-layer threshold");
        add(app, "--iters", iters, "Training iterations");
        add(app, "--max-patches", max_patches, "Random subsample of the pooled patches");
        add(app, "--seed", seed, "Subsampling seed");
        add(app, "--log-every", log_every, "Progress line every N iterations (0 = silent)");
        patch.attach(app);
        add(app, "--out", out, "Output model")->required();
        add(app, "--log", log, "Cost log CSV");
    }

    void run(Global& g, std::ostream& err) {
        const auto& cfg = g.cfg;
        Manifest manifest("train", g.argv);
        json& params = manifest.parameters();
        std::vector<std::string> files = images.given() ? images.value : cfg.list("train", "images").value_or(
                                                                             std::vector<std::string>{});
        require(!files.empty(), "train: no --images given");

        TrainConfig tc;
        tc.layers = pick(layers.get(), cfg.integer("train", "layers"), 2);
        tc.eta1 = pick(eta1.get(), cfg.number("train", "eta1"), 80.0);
        tc.eta2 = pick(eta2.get(), cfg.number("train", "eta2"), 60.0);
        tc.iterations = pick(iters.get(), cfg.integer("train", "iterations"), 1000);
        tc.patch = patch.resolve(cfg, "train", 8);
        tc.seed = seed.given() ? seed.value : static_cast<std::uint64_t>(cfg.integer("train", "seed").value_or(0));
        if (auto mp = max_patches.given() ? max_patches.get() : cfg.integer("train", "max_patches")) tc.max_patches = *mp;
        tc.log_every = pick(log_every.get(), cfg.integer("train", "log_every"), 0);
        validate_train_config(tc);

        params["images"] = files;
        params["layers"] = tc.layers;
        params["eta1"] = tc.eta1;
        if (tc.layers == 2) params["eta2"] = tc.eta2;
        params["iterations"] = tc.iterations;
        params["patch"] = patch_json(tc.patch);
        params["max_patches"] = tc.max_patches ? json(*tc.max_patches) : json(nullptr);
        manifest.seed("subsample", tc.seed);

        std::vector<PatchSet> sets;
        for (const auto& f : files) {
            manifest.input(f);
            const Image img = io::load_image(f);
            validate_patch_config(tc.patch, img.width(), img.height());
            sets.push_back(extract_patches(img, tc.patch));
        }
        const TrainResult result = train(concatenate(sets), tc, {}, tc.log_every > 0 ? &err : nullptr);

        OutputTracker tracker;
        save_model(out.value, result.model);
        tracker.add(out.value);
        manifest.output(out.value);
        if (log.given()) {
            save_cost_log(log.value, result.report);
            tracker.add(log.value);
            manifest.output(log.value);
        }
        finish(manifest, Manifest::beside(out.value), tracker);
    }
};

// ---- reconstruct -----------------------------------------------------------

struct ReconstructCmd {
    Flag<std::string> method, sino, out, pgm, window, log;
    GridFlags grid;
    MethodFlags mf;

    void attach(CLI::App* app) {
        add(app, "--method", method, "fbp, ep, st or mrst2")->required();
        add(app, "--sino", sino, "Input sinogram")->required();
        grid.attach(app);
        mf.attach(app);
        add(app, "--out", out, "Output image")->required();
        add(app, "--pgm", pgm, "16-bit PGM preview");
        add(app, "--window", window, "Preview window lo:hi in HU (default 800:1200)");
        add(app, "--log", log, "Objective log CSV (iter,objective)");
    }

    void run(Global& g) {
        Manifest manifest("reconstruct", g.argv);
        const Method m = parse_method(method.value);
        const ResolvedMethod r = resolve_method(m, mf, g.cfg);
        const Grid gr = grid.resolve(g.cfg);
        json& params = manifest.parameters();
        params = method_json(r);
        params["grid"] = grid_json(gr);
        manifest.input(sino.value);
        if (r.model) manifest.input(r.model_path);

        const Sinogram s = load_sinogram(sino.value);
        MethodRun run;
        if (m == Method::fbp) {
            run = run_method(m, s, gr, r.params);
        } else {
            const Image x0 = initial_image(r, s, gr, manifest);
            run = run_method(m, s, gr, r.params, &x0, r.model ? &*r.model : nullptr);
        }

        OutputTracker tracker;
        io::save_image(out.value, run.image);
        tracker.add(out.value);
        manifest.output(out.value);
        save_pgm_if(pgm, window, run.image, tracker, manifest);
        if (log.given()) {
            write_text(log.value, [&](std::ostream& os) {
                os << "iter,objective\n";
                for (std::size_t i = 0; i < run.objective.size(); ++i)
                    os << i + 1 << ',' << exact(run.objective[i]) << '\n';
            });
            tracker.add(log.value);
            manifest.output(log.value);
        }
        finish(manifest, Manifest::beside(out.value), tracker);
    }
};

// ---- evaluate / compare ----------------------------------------------------

struct MetricFlags {
    Flag<double> roi, peak;
    void attach(CLI::App* app) {
        add(app, "--roi", roi, "ROI radius as a fraction of half the smaller image side (default 1)");
        add(app, "--peak", peak, "Fixed PSNR peak in HU (default: truth maximum over the ROI)");
    }
    double roi_fraction(const ExperimentConfig& cfg) const { return pick(roi.get(), cfg.number("metrics", "roi"), 1.0); }
    std::optional<double> peak_value(const ExperimentConfig& cfg) const {
        return peak.given() ? peak.get() : cfg.number("metrics", "peak");
    }
};


struct EvaluateCmd {
    Flag<std::string> truth, out, manifest_path;
    std::vector<std::string> entries;
    MetricFlags metrics;

    void attach(CLI::App* app) {
        add(app, "--truth", truth, "Ground-truth image")->required();
        app->add_option("images", entries, "Reconstructions as LABEL=path or path")->required();
        metrics.attach(app);
        add(app, "--out", out, "Also write the CSV to this file");
        add(app, "--manifest", manifest_path, "Manifest path (default: <out>.manifest.json when --out is given)");
    }

    void run(Global& g, std::ostream& os) {
        Manifest manifest("evaluate", g.argv);
        const double roi = metrics.roi_fraction(g.cfg);
        const auto peak = metrics.peak_value(g.cfg);
        manifest.parameters() = {{"roi", roi}, {"peak", peak ? json(*peak) : json("truth_max")}};
        manifest.input(truth.value);
        const Image t = io::load_image(truth.value);

        std::ostringstream csv;
        csv << "method,rmse_hu,psnr_db\n";
        for (const auto& e : entries) {
            const auto eq = e.find('=');
            const std::string path = eq == std::string::npos ? e : e.substr(eq + 1);
            const std::string label = eq == std::string::npos ? fs::path(e).stem().string() : e.substr(0, eq);
            manifest.input(path);
            const Score s = score(io::load_image(path), t, roi, peak);
            csv << label << ',' << format_fixed(s.rmse, 4) << ',' << format_fixed(s.psnr, 4) << '\n';
        }
        emit(g, manifest, csv.str(), os);
    }

    void emit(Global&, Manifest& manifest, const std::string& text, std::ostream& os) {
        OutputTracker tracker;
        if (out.given()) {
            write_text(out.value, [&](std::ostream& f) { f << text; });
            tracker.add(out.value);
            manifest.output(out.value);
        }
        os << text;
        if (manifest_path.given())
            finish(manifest, manifest_path.value, tracker);
        else if (out.given())
            finish(manifest, Manifest::beside(out.value), tracker);
        else
            tracker.commit();
    }
};

struct CompareEntry {
    Method method;
    std::string intensity;
    std::string path;
};

CompareEntry parse_compare_entry(const std::string& e) {
    const auto at = e.find('@');
    const auto eq = e.find('=', at == std::string::npos ? 0 : at);
    if (at == std::string::npos || eq == std::string::npos || eq < at)
        throw ArgumentError("compare: expected METHOD@I0=path, got '" + e + "'");
    CompareEntry c{parse_method(e.substr(0, at)), e.substr(at + 1, eq - at - 1), e.substr(eq + 1)};
    parse_number(c.intensity, "compare intensity");
    return c;
}

struct CompareCmd {
    Flag<std::string> truth;
    std::vector<std::string> entries;
    MetricFlags metrics;
    EvaluateCmd sink;

    void attach(CLI::App* app) {
        add(app, "--truth", truth, "Ground-truth image")->required();
        app->add_option("entries", entries, "Reconstructions as METHOD@I0=path")->required();
        metrics.attach(app);
        add(app, "--out", sink.out, "Also write the table to this file");
        add(app, "--manifest", sink.manifest_path, "Manifest path (default: <out>.manifest.json when --out is given)");
    }

    void run(Global& g, std::ostream& os) {
        Manifest manifest("compare", g.argv);
        const double roi = metrics.roi_fraction(g.cfg);
        const auto peak = metrics.peak_value(g.cfg);
        manifest.parameters() = {{"roi", roi}, {"peak", peak ? json(*peak) : json("truth_max")}};
        manifest.input(truth.value);
        const Image t = io::load_image(truth.value);

        std::vector<std::string> intensities;
        std::map<std::pair<Method, std::string>, Score> cells;
        for (const auto& e : entries) {
            const CompareEntry c = parse_compare_entry(e);
            if (std::find(intensities.begin(), intensities.end(), c.intensity) == intensities.end())
                intensities.push_back(c.intensity);
            require(!cells.count({c.method, c.intensity}), "compare: duplicate entry " + e);
            manifest.input(c.path);
            cells[{c.method, c.intensity}] = score(io::load_image(c.path), t, roi, peak);
        }
        std::vector<Method> methods;
        for (Method m : {Method::fbp, Method::ep, Method::st, Method::mrst2})
            if (std::any_of(cells.begin(), cells.end(), [&](const auto& kv) { return kv.first.first == m; }))
                methods.push_back(m);
        sink.emit(g, manifest, render_comparison(intensities, methods, cells), os);
    }
};

// ---- sweep -----------------------------------------------------------------

struct SweepCmd {
    Flag<std::string> method, sino, truth, out, csv, pgm, window, betas, gamma1s, gamma2s;
    Flag<int> refine;
    GridFlags grid;
    MethodFlags mf;
    MetricFlags metrics;

    void attach(CLI::App* app) {
        add(app, "--method", method, "ep, st or mrst2")->required();
        add(app, "--sino", sino, "Input sinogram")->required();
        add(app, "--truth", truth, "Ground-truth image")->required();
        add(app, "--betas", betas, "Comma-separated beta grid");
        add(app, "--gamma1s", gamma1s, "Comma-separated gamma1 grid");
        add(app, "--gamma2s", gamma2s, "Comma-separated gamma2 grid");
        add(app, "--refine", refine, "Refinement rounds around the best grid point (default 2)");
        grid.attach(app);
        mf.attach(app);
        metrics.attach(app);
        add(app, "--out", out, "Best reconstruction")->required();
        add(app, "--csv", csv, "All evaluated points (default: stdout)");
        add(app, "--pgm", pgm, "16-bit PGM preview of the best reconstruction");
        add(app, "--window", window, "Preview window lo:hi in HU (default 800:1200)");
    }

    void run(Global& g, std::ostream& os, std::ostream& err) {
        const auto& cfg = g.cfg;
        Manifest manifest("sweep", g.argv);
        const Method m = parse_method(method.value);
        require(m != Method::fbp, "sweep: fbp has no parameters to tune");
        const ResolvedMethod r = resolve_method(m, mf, cfg);
        const Grid gr = grid.resolve(cfg);
        const std::string section = "recon." + method_name(m);
        SweepAxes axes = default_sweep_axes(m);
        auto axis = [&](const Flag<std::string>& f, const std::string& key, std::vector<double>& dst) {
            if (f.given())
                dst = parse_number_list(f.value, "--" + key);
            else if (auto v = cfg.numbers(section, "sweep_" + key))
                dst = *v;
        };
        axis(betas, "beta", axes.beta);
        if (method_layers(m) >= 1) axis(gamma1s, "gamma1", axes.gamma1);
        if (method_layers(m) >= 2) axis(gamma2s, "gamma2", axes.gamma2);
        axes.refine = refine.given() ? refine.value : 2;
        const double roi = metrics.roi_fraction(cfg);
        const auto peak = metrics.peak_value(cfg);

        json& params = manifest.parameters();
        params = method_json(r);
        params["grid"] = grid_json(gr);
        params["axes"] = {{"beta", axes.beta}, {"gamma1", axes.gamma1}, {"gamma2", axes.gamma2}, {"refine", axes.refine}};
        params["roi"] = roi;
        params["peak"] = peak ? json(*peak) : json("truth_max");
        manifest.input(sino.value);
        manifest.input(truth.value);
        if (r.model) manifest.input(r.model_path);

        const Sinogram s = load_sinogram(sino.value);
        const Image t = io::load_image(truth.value);
        const Image x0 = initial_image(r, s, gr, manifest);
        auto progress = [&](const SweepPoint& p) {
            err << "sweep " << method_name(m) << " beta=" << p.beta;
            if (method_layers(m) >= 1) err << " gamma1=" << p.gamma1;
            if (method_layers(m) >= 2) err << " gamma2=" << p.gamma2;
            err << " rmse=" << format_fixed(p.score.rmse, 3) << '\n';
        };
        const SweepResult res =
            grid_search(m, s, gr, r.params, axes, t, roi, peak, &x0, r.model ? &*r.model : nullptr, progress);
        const SweepPoint& best = res.best_point();
        params["best"] = {{"beta", best.beta}, {"gamma1", best.gamma1}, {"gamma2", best.gamma2},
                          {"rmse_hu", best.score.rmse}};

        std::ostringstream table;
        table << "beta,gamma1,gamma2,rmse_hu,psnr_db,best\n";
        for (std::size_t i = 0; i < res.points.size(); ++i) {
            const auto& p = res.points[i];
            table << exact(p.beta) << ',' << exact(p.gamma1) << ',' << exact(p.gamma2) << ','
                  << format_fixed(p.score.rmse, 4) << ','
                  << format_fixed(p.score.psnr, 4) << ',' << (i == res.best ? 1 : 0) << '\n';
        }

        OutputTracker tracker;
        io::save_image(out.value, res.best_image);
        tracker.add(out.value);
        manifest.output(out.value);
        save_pgm_if(pgm, window, res.best_image, tracker, manifest);
        if (csv.given()) {
            write_text(csv.value, [&](std::ostream& f) { f << table.str(); });
            tracker.add(csv.value);
            manifest.output(csv.value);
        } else {
            os << table.str();
        }
        finish(manifest, Manifest::beside(out.value), tracker);
    }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-layer residual sparsifying transform toolkit for low-dose CT", "mrst"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Global g;
    g.argv = args;
    add(&app, "--config", g.config, "Experiment config file (INI)");
    add(&app, "--threads", g.threads, "Worker threads (default: MRST_THREADS or all cores)");

    PhantomCmd phantom;
    SimulateCmd simulate;
    TrainCmd trainer;
    ReconstructCmd recon;
    EvaluateCmd evaluate;
    CompareCmd compare;
    SweepCmd sweep;
    auto* c_phantom = app.add_subcommand("phantom", "Rasterize an ellipse phantom");
    auto* c_simulate = app.add_subcommand("simulate", "Simulate a noisy transmission sinogram");
    auto* c_train = app.add_subcommand("train", "Learn a one- or two-layer transform model from images");
    auto* c_recon = app.add_subcommand("reconstruct", "Reconstruct an image with fbp, ep, st or mrst2");
    auto* c_evaluate = app.add_subcommand("evaluate", "ROI RMSE and PSNR of reconstructions as CSV");
    auto* c_compare = app.add_subcommand("compare", "Method-by-intensity RMSE/PSNR table");
    auto* c_sweep = app.add_subcommand("sweep", "Grid search of regularization parameters by ROI RMSE");
    phantom.attach(c_phantom);
    simulate.attach(c_simulate);
    trainer.attach(c_train);
    recon.attach(c_recon);
    evaluate.attach(c_evaluate);
    compare.attach(c_compare);
    sweep.attach(c_sweep);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "mrst: error: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (g.config.given()) g.cfg = ExperimentConfig::load(g.config.value);
        int threads = g.threads.given() ? g.threads.value : parallel::threads_from_env();
        require(threads >= 0, "--threads must be >= 0");
        parallel::set_threads(threads);

        if (c_phantom->parsed())
            phantom.run(g);
        else if (c_simulate->parsed())
            simulate.run(g);
        else if (c_train->parsed())
            trainer.run(g, err);
        else if (c_recon->parsed())
            recon.run(g);
        else if (c_evaluate->parsed())
            evaluate.run(g, out);
        else if (c_compare->parsed())
            compare.run(g, out);
        else if (c_sweep->parsed())
            sweep.run(g, out, err);
    } catch (const std::exception& e) {
        err << "mrst: error: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}

int main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace mrst::cli
