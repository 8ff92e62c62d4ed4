#ifndef WSVD_EVAL_HPP
#define WSVD_EVAL_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "wsvd/dataset.hpp"
#include "wsvd/model.hpp"

namespace wsvd {

struct EpochRecord {
    std::int32_t epoch = 0; // contiguous from 0
    double train_rmse = 0.0;
    std::optional<double> test_rmse;
    double seconds = 0.0; // wall clock of the SGD pass only, evaluation excluded
};

/// Per-epoch training trace. weight_history holds one snapshot of the factor
/// weights per epoch for WSVD and stays empty for other kinds.
struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::vector<std::vector<double>> weight_history;
};

/// Root mean squared error of `params` over `ds`. `context` is the training
/// split: it supplies SVD++ rated-item sets and decides which users/items
/// count as unseen, in which case predict_cold's fallback is used. Errors on
/// an empty `ds`.
double rmse(const ModelParams& params, const RatingsDataset& context, const RatingsDataset& ds);

/// Each weight divided by the smallest absolute weight, so the least
/// influential factor maps to ±1. Errors when min |w_j| <= 1e-12 (the ratio
/// would be meaningless).
std::vector<double> relative_importance(const std::vector<double>& weights);

/// Mean wall-clock seconds per epoch. Errors on an empty report.
double epoch_seconds_summary(const TrainReport& report);

/// CSV with header `epoch,train_rmse,test_rmse,epoch_seconds`; the test
/// column is empty when no test split was evaluated.
void write_curve_csv(std::ostream& out, const TrainReport& report);

/// CSV with header `epoch,w_0,...,w_{k-1}`, one row per recorded snapshot.
void write_weight_history_csv(std::ostream& out, const TrainReport& report);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

} // namespace wsvd

#endif
