#include "wsvd/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace wsvd {

double rmse(const ModelParams& params, const RatingsDataset& context, const RatingsDataset& ds) {
    if (ds.empty()) throw Error("rmse: dataset has no ratings");
    double sum_sq = 0.0;
    for (const Rating& r : ds.ratings()) {
        const bool user_seen = r.user < context.user_count() && context.user_degree(r.user) > 0;
        const bool item_seen = r.item < context.item_count() && context.item_degree(r.item) > 0;
        const double pred = predict_cold(
            params, context,
            user_seen ? std::optional<std::int32_t>(r.user) : std::nullopt,
            item_seen ? std::optional<std::int32_t>(r.item) : std::nullopt);
        const double err = r.value - pred;
        sum_sq += err * err;
    }
    return std::sqrt(sum_sq / double(ds.size()));
}

std::vector<double> relative_importance(const std::vector<double>& weights) {
    if (weights.empty()) throw Error("relative_importance: empty weight vector");
    double min_abs = std::abs(weights[0]);
    for (double w : weights) min_abs = std::min(min_abs, std::abs(w));
    if (min_abs <= 1e-12)
        throw Error("relative_importance: degenerate weights (min |w| <= 1e-12)");
    std::vector<double> out(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / min_abs;
    return out;
}

double epoch_seconds_summary(const TrainReport& report) {
    if (report.epochs.empty()) throw Error("epoch_seconds_summary: report has no epochs");
    double sum = 0.0;
    for (const EpochRecord& rec : report.epochs) sum += rec.seconds;
    return sum / double(report.epochs.size());
}

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_curve_csv(std::ostream& out, const TrainReport& report) {
    out << "epoch,train_rmse,test_rmse,epoch_seconds\n";
    for (const EpochRecord& rec : report.epochs) {
        out << rec.epoch << ',' << format_double(rec.train_rmse) << ',';
        if (rec.test_rmse) out << format_double(*rec.test_rmse);
        out << ',' << format_double(rec.seconds) << '\n';
    }
}

void write_weight_history_csv(std::ostream& out, const TrainReport& report) {
    std::size_t k = 0;
    for (const auto& snap : report.weight_history) k = std::max(k, snap.size());
    out << "epoch";
    for (std::size_t g = 0; g < k; ++g) out << ",w_" << g;
    out << '\n';
    for (std::size_t e = 0; e < report.weight_history.size(); ++e) {
        out << e;
        for (double w : report.weight_history[e]) out << ',' << format_double(w);
        out << '\n';
    }
}

} // namespace wsvd
