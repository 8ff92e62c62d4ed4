#ifndef WSVD_EXPERIMENT_HPP
#define WSVD_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wsvd/dataset.hpp"
#include "wsvd/ingest.hpp"
#include "wsvd/model_io.hpp"
#include "wsvd/trainer.hpp"

namespace wsvd {

/// Everything one experiment run needs: where the data lives, what model to
/// train, how to split, and where results go.
struct ExperimentConfig {
    std::string dataset_path;
    DatasetFormat format = DatasetFormat::MovieLens100K;
    char epinions_delimiter = ' ';
    ModelKind model = ModelKind::WSVD;
    HyperParams hp = HyperParams::defaults_for(ModelKind::WSVD);
    SplitSpec split{0.8, 13};
    std::string output_dir = "out";
    bool emit_curves = true;
    bool clip_at_inference = false;
    ModelEncoding model_encoding = ModelEncoding::Binary;
};

struct ExperimentOutcome {
    ModelParams params;
    TrainReport report;
    double final_train_rmse = 0.0;
    std::optional<double> final_test_rmse;
    std::string summary_path;
    std::string curve_path;   // empty when curves are off
    std::string weights_path; // empty unless WSVD with curves on
    std::string timing_path;
    std::string model_path;
};

/// Parse, split, train, and write results under the output directory:
/// summary.txt (key=value, no timing data so reruns are byte-identical),
/// curve.csv, weights.csv for WSVD, timing.txt, and the saved model.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Grid of independently trained cells. Every cell shares the run
/// configuration's split and seed; its hyperparameters are the cell model's
/// defaults with the cell's factor count and a uniform regularization value,
/// keeping per-model learning rates (epochs/decay/seed/shuffle come from the
/// base config).
struct SweepGrid {
    std::vector<std::int32_t> factor_counts{10, 20, 40, 80};
    std::vector<double> reg_values{0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0};
    std::vector<ModelKind> models{ModelKind::WSVD, ModelKind::SVD, ModelKind::SVDpp,
                                  ModelKind::PMF};
    int workers = 0; // 0 = hardware concurrency
};

struct SweepCell {
    std::int32_t factor_count = 0;
    double reg = 0.0;
    ModelKind model = ModelKind::WSVD;
    std::optional<double> test_rmse; // empty when the cell diverged
};

/// Runs every (k, reg, model) cell against the given split, concurrently up
/// to `grid.workers`. Cell order in the result is sorted by factor count,
/// then reg, then model, independent of scheduling. A diverging cell is
/// recorded with an empty RMSE instead of aborting the sweep.
std::vector<SweepCell> run_sweep(const RatingsDataset& train_ds, const RatingsDataset& test_ds,
                                 const SweepGrid& grid, const HyperParams& base);

/// CSV with header `k,lambda,model,test_rmse`; diverged cells write the
/// marker `diverged` in the RMSE column.
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

} // namespace wsvd

#endif
