#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrst/core/image.hpp"
#include "mrst/metrics/metrics.hpp"
#include "mrst/model/two_layer.hpp"
#include "mrst/recon/ep.hpp"
#include "mrst/recon/fbp.hpp"
#include "mrst/recon/transform_recon.hpp"
#include "mrst/tomo/sinogram.hpp"

namespace mrst::cli {

enum class Method { fbp, ep, st, mrst2 };

Method parse_method(const std::string& name);
std::string method_name(Method m);
/// Display label used in tables: FBP, EP, ST, MRST2.
std::string method_label(Method m);
/// Layer count the model must have for a transform method; 0 for fbp and ep.
int method_layers(Method m);

SolverKind parse_solver(const std::string& name);
std::string solver_name(SolverKind s);
FbpWindow parse_window(const std::string& name);
std::string window_name(FbpWindow w);
Boundary parse_boundary(const std::string& name);
std::string boundary_name(Boundary b);

/// Calibrated defaults for the 128 x 128, 1 mm, 180 x 192 parallel-beam setup.
EpConfig default_ep_config();
ReconConfig default_recon_config(Method m);

struct MethodParams {
    FbpWindow filter = FbpWindow::hanning;
    EpConfig ep = default_ep_config();
    ReconConfig recon = default_recon_config(Method::mrst2);
};

struct MethodRun {
    Image image;
    std::vector<double> objective;
};

/// Runs one reconstruction. `init` is ignored by fbp; `model` is required for st and mrst2.
MethodRun run_method(Method m, const Sinogram& sino, const Grid& grid, const MethodParams& params,
                     const Image* init = nullptr, const TwoLayerModel* model = nullptr);

/// Brings a truth image onto the reconstruction grid: returned as is when the
/// grids agree, area-downsampled when the truth is an integer refinement.
Image match_truth(const Image& truth, const Grid& grid);

struct Score {
    double rmse = 0.0;
    double psnr = 0.0;
};
Score score(const Image& estimate, const Image& truth, double roi_fraction, std::optional<double> peak = {});

struct SweepAxes {
    std::vector<double> beta;
    std::vector<double> gamma1;  // st, mrst2
    std::vector<double> gamma2;  // mrst2
    int refine = 2;              // coordinate refinement rounds around the best grid point
};

struct SweepPoint {
    double beta = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    Score score;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // in evaluation order
    std::size_t best = 0;
    Image best_image;
    const SweepPoint& best_point() const { return points[best]; }
};

/// Coarse grid used when no axes are given.
SweepAxes default_sweep_axes(Method m);

using SweepProgress = std::function<void(const SweepPoint&)>;

/// Minimizes ROI RMSE over the full grid of the given axes, then refines the
/// best point one parameter at a time with geometric steps that halve (in log
/// scale) every round. Ties keep the earlier point.
SweepResult grid_search(Method m, const Sinogram& sino, const Grid& grid, const MethodParams& base,
                        const SweepAxes& axes, const Image& truth, double roi_fraction,
                        std::optional<double> peak = {}, const Image* init = nullptr,
                        const TwoLayerModel* model = nullptr, const SweepProgress& progress = {});

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double v, int digits);

/// Text table with an RMSE row and a PSNR row per method (in the order given)
/// and one column per intensity. Missing cells print "-".
std::string render_comparison(const std::vector<std::string>& intensities, const std::vector<Method>& methods,
                              const std::map<std::pair<Method, std::string>, Score>& cells);

}  // namespace mrst::cli
