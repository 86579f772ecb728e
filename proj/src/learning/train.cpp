#include "mrst/learning/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "mrst/core/errors.hpp"
#include "mrst/core/io.hpp"
#include "mrst/core/linalg.hpp"

namespace mrst {

void validate_train_config(const TrainConfig& cfg) {
    require(cfg.iterations >= 1, "train: iterations must be >= 1");
    require(cfg.eta1 >= 0.0 && cfg.eta2 >= 0.0, "train: thresholds must be nonnegative");
    require(cfg.layers == 1 || cfg.layers == 2, "train: layers must be 1 or 2");
    require(!cfg.max_patches || *cfg.max_patches >= 1, "train: max_patches must be >= 1");
    require(cfg.log_every >= 0, "train: log_every must be >= 0");
}

PatchSet subsample_patches(const PatchSet& patches, int max_patches, std::uint64_t seed) {
    require(max_patches >= 1, "subsample_patches: max_patches must be >= 1");
    if (max_patches >= patches.count()) return patches;
    std::vector<int> all(static_cast<std::size_t>(patches.count()));
    std::iota(all.begin(), all.end(), 0);
    std::vector<int> keep;
    keep.reserve(static_cast<std::size_t>(max_patches));
    std::mt19937_64 rng(seed);
    // Selection sampling: output indices come out in source order.
    std::sample(all.begin(), all.end(), std::back_inserter(keep), max_patches, rng);
    PatchSet out{Matrix(patches.dim(), max_patches), patches.config, patches.source_width, patches.source_height};
    for (int k = 0; k < max_patches; ++k) out.data.col(k) = patches.data.col(keep[static_cast<std::size_t>(k)]);
    return out;
}

PatchSet concatenate(const std::vector<PatchSet>& sets) {
    require(!sets.empty(), "concatenate: no patch sets");
    Eigen::Index total = 0;
    for (const auto& s : sets) {
        require(s.dim() == sets.front().dim(), "concatenate: patch dimensions differ");
        total += s.data.cols();
    }
    PatchSet out{Matrix(sets.front().dim(), total), sets.front().config, sets.front().source_width,
                 sets.front().source_height};
    Eigen::Index at = 0;
    for (const auto& s : sets) {
        out.data.middleCols(at, s.data.cols()) = s.data;
        at += s.data.cols();
    }
    return out;
}

TrainResult train(const PatchSet& patches, const TrainConfig& cfg, const TrainObserver& observer, std::ostream* log) {
    validate_train_config(cfg);
    require(patches.count() >= 1, "train: empty patch set");
    require(patches.dim() == cfg.patch.dim(), "train: patch dimension does not match config");
    require(patches.data.allFinite(), "train: patches contain non-finite values");

    const PatchSet used = cfg.max_patches ? subsample_patches(patches, *cfg.max_patches, cfg.seed) : patches;
    const Matrix& r1 = used.data;
    const double n_entries = static_cast<double>(r1.size());

    TrainResult out{initial_model(cfg.patch.patch_w, cfg.patch.patch_h, cfg.layers, cfg.eta1, cfg.eta2), {}};
    TwoLayerModel& model = out.model;
    SparseCodes codes;
    if (cfg.layers == 2) codes.z2 = Matrix::Zero(r1.rows(), r1.cols());

    for (int it = 1; it <= cfg.iterations; ++it) {
        if (cfg.layers == 2) {
            codes.z1 = sparse_code_layer1(r1, codes.z2, model, cfg.eta1);
            model.w1 = update_transform1(r1, codes.z1, codes.z2, model);
            codes.z2 = sparse_code_layer2(r1, codes.z1, model, cfg.eta2);
            model.w2 = update_transform2(r1, codes.z1, codes.z2, model);
        } else {
            codes.z1 = sparse_code_single(r1, model, cfg.eta1);
            model.w1 = update_transform1(r1, codes.z1, codes.z2, model);
        }
        if (orthogonality_error(model.w1) > kUnitaryTolerance || orthogonality_error(model.w2) > kUnitaryTolerance)
            throw std::runtime_error("train: transform lost unitarity at iteration " + std::to_string(it));

        const ObjectiveTerms terms = objective_terms(r1, codes, model, cfg.eta1, cfg.eta2);
        out.report.cost_history.push_back(terms.total());
        out.report.nnz1_fraction.push_back(static_cast<double>(terms.nnz1) / n_entries);
        out.report.nnz2_fraction.push_back(static_cast<double>(terms.nnz2) / n_entries);

        if (observer) observer({it, model, codes, terms.total()});
        if (log != nullptr && cfg.log_every > 0 && (it % cfg.log_every == 0 || it == cfg.iterations)) {
            *log << "iter " << it << " cost " << terms.total() << " nnz1 " << out.report.nnz1_fraction.back()
                 << " nnz2 " << out.report.nnz2_fraction.back() << '\n';
        }
    }
    return out;
}

void write_cost_log(std::ostream& os, const TrainReport& report) {
    os << "iter,cost,nnz1_frac,nnz2_frac\n";
    os.precision(17);
    for (std::size_t i = 0; i < report.cost_history.size(); ++i) {
        os << (i + 1) << ',' << report.cost_history[i] << ',' << report.nnz1_fraction[i] << ','
           << report.nnz2_fraction[i] << '\n';
    }
}

void save_cost_log(const std::filesystem::path& path, const TrainReport& report) {
    io::write_atomically(path, [&](std::ostream& os) { write_cost_log(os, report); });
}

}  // namespace mrst
