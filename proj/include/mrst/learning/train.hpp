#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mrst/core/patches.hpp"
#include "mrst/model/two_layer.hpp"

namespace mrst {

struct TrainConfig {
    double eta1 = 80.0;
    double eta2 = 60.0;
    int iterations = 1000;
    int layers = 2;
    PatchConfig patch;
    std::uint64_t seed = 0;
    std::optional<int> max_patches;
    int log_every = 0;  // 0 disables progress output
};

void validate_train_config(const TrainConfig& cfg);

/// State after one full BCD cycle, handed to TrainObserver.
struct TrainIterate {
    int iteration;  // 1-based
    const TwoLayerModel& model;
    const SparseCodes& codes;
    double cost;
};

using TrainObserver = std::function<void(const TrainIterate&)>;

struct TrainReport {
    std::vector<double> cost_history;  // P0 objective after each cycle
    std::vector<double> nnz1_fraction;
    std::vector<double> nnz2_fraction;  // zeros for one-layer training
};

struct TrainResult {
    TwoLayerModel model;
    TrainReport report;
};

/// Deterministic uniform subsample without replacement; kept columns stay in
/// source order. Returns the input unchanged when max_patches >= N.
PatchSet subsample_patches(const PatchSet& patches, int max_patches, std::uint64_t seed);

/// Exact block coordinate descent on the training objective. Starts from W1 =
/// DCT, W2 = I, Z2 = 0 and runs cfg.iterations cycles of
/// Z1 -> W1 -> Z2 -> W2 (the last two skipped for one-layer training).
/// No early stopping. Patches are used as given (no mean removal).
TrainResult train(const PatchSet& patches, const TrainConfig& cfg, const TrainObserver& observer = {},
                  std::ostream* log = nullptr);

/// CSV with header iter,cost,nnz1_frac,nnz2_frac.
void write_cost_log(std::ostream& os, const TrainReport& report);
void save_cost_log(const std::filesystem::path& path, const TrainReport& report);

/// Concatenates patch sets column-wise in argument order.
PatchSet concatenate(const std::vector<PatchSet>& sets);

}  // namespace mrst
