#include "mrst/recon/transform_recon.hpp"

#include <algorithm>

#include "mrst/core/errors.hpp"
#include "mrst/core/kernels.hpp"

namespace mrst {

void validate_recon_config(const ReconConfig& cfg, const TwoLayerModel& model) {
    validate_model(model);
    require(cfg.beta > 0.0, "recon: beta must be positive");
    require(cfg.gamma1 >= 0.0 && cfg.gamma2 >= 0.0, "recon: thresholds must be nonnegative");
    require(cfg.outer_iters >= 1 && cfg.inner_iters >= 1 && cfg.subsets >= 1, "recon: counts must be >= 1");
    require(cfg.patch.dim() == model.dim(), "recon: patch size does not match the model dimension");
}

TransformPenalty::TransformPenalty(const TwoLayerModel& model, const SparseCodes& codes, double beta,
                                   const PatchConfig& cfg, const Grid& grid)
    : scale_(2.0 * beta),
      layers_(model.layers),
      coverage_(patch_coverage(cfg, grid)),
      majorizer_(regularizer_majorizer(model, beta, cfg, grid)) {
    require(cfg.dim() == model.dim(), "patch config does not match model dimension");
    const PatchGrid pg = patch_grid(cfg, grid.width, grid.height);
    require(codes.z1.rows() == model.dim() && codes.z1.cols() == pg.total(), "sparse codes do not match the patch grid");
    Matrix t = codes.z1;
    if (model.layers == 2) {
        t *= 2.0;
        if (codes.z2.size() != 0) {
            require(codes.z2.rows() == codes.z1.rows() && codes.z2.cols() == codes.z1.cols(),
                    "second-layer codes do not match the first layer");
            t += kernels::apply_transpose(model.w2, codes.z2);
        }
    }
    offset_ = aggregate_patches(kernels::apply_transpose(model.w1, t), cfg, grid);
}

Image TransformPenalty::gradient(const Image& x) const {
    require(x.grid() == coverage_.grid(), "transform penalty: image grid mismatch");
    Image g(x.grid());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = scale_ * (layers_ * coverage_[j] * x[j] - offset_[j]);
    return g;
}

void sparse_code_image(const Image& x, const TwoLayerModel& model, const ReconConfig& cfg, SparseCodes& codes) {
    const PatchSet ps = extract_patches(x, cfg.patch);
    if (model.layers == 2) {
        if (codes.z2.rows() != ps.data.rows() || codes.z2.cols() != ps.data.cols())
            codes.z2 = Matrix::Zero(ps.data.rows(), ps.data.cols());
        codes.z1 = sparse_code_layer1(ps.data, codes.z2, model, cfg.gamma1);
        codes.z2 = sparse_code_layer2(ps.data, codes.z1, model, cfg.gamma2);
    } else {
        codes.z1 = sparse_code_single(ps.data, model, cfg.gamma1);
        codes.z2.resize(0, 0);
    }
}

double pwls_objective(const DataTerm& data, const Image& x, const SparseCodes& codes, const TwoLayerModel& model,
                      const ReconConfig& cfg) {
    const PatchSet ps = extract_patches(x, cfg.patch);
    return data.value(x) + cfg.beta * objective_regularizer(ps.data, codes, model, cfg.gamma1, cfg.gamma2);
}

Image image_update(const Image& x, const SparseCodes& codes, const TwoLayerModel& model, const Sinogram& sino,
                   const ReconConfig& cfg) {
    validate_recon_config(cfg, model);
    const DataTerm data(sino, x.grid(), cfg.subsets);
    const TransformPenalty penalty(model, codes, cfg.beta, cfg.patch, x.grid());
    ImageSolver solver(data, cfg.solver);
    Image out = x;
    solver.run(out, penalty, cfg.inner_iters);
    return out;
}

TransformReconResult reconstruct_transform(const Sinogram& sino, const TwoLayerModel& model, const ReconConfig& cfg,
                                           const Image& x0) {
    validate_recon_config(cfg, model);
    x0.validate();
    validate_patch_config(cfg.patch, x0.width(), x0.height());
    const DataTerm data(sino, x0.grid(), cfg.subsets);
    ImageSolver solver(data, cfg.solver);

    TransformReconResult out{x0, {}, {}};
    for (auto& v : out.image.values()) v = std::max(v, 0.0);
    for (int it = 0; it < cfg.outer_iters; ++it) {
        sparse_code_image(out.image, model, cfg, out.codes);
        const TransformPenalty penalty(model, out.codes, cfg.beta, cfg.patch, x0.grid());
        solver.run(out.image, penalty, cfg.inner_iters);
        if (cfg.track_objective) out.objective.push_back(pwls_objective(data, out.image, out.codes, model, cfg));
    }
    return out;
}

}  // namespace mrst
