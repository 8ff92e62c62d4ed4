#include "wsvd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "wsvd/eval.hpp"

namespace wsvd {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot write '" + path.string() + "'");
    return out;
}

void write_summary(std::ostream& out, const ExperimentConfig& config,
                   const RatingsDataset& full, const RatingsDataset& train_ds,
                   const RatingsDataset& test_ds, const ExperimentOutcome& outcome) {
    out << "model=" << to_string(config.model) << '\n'
        << "dataset=" << config.dataset_path << '\n'
        << "format=" << to_string(config.format) << '\n'
        << "users=" << full.user_count() << '\n'
        << "items=" << full.item_count() << '\n'
        << "ratings=" << full.size() << '\n'
        << "train_ratings=" << train_ds.size() << '\n'
        << "test_ratings=" << test_ds.size() << '\n'
        << "split_fraction=" << format_double(config.split.train_fraction) << '\n'
        << "split_seed=" << config.split.seed << '\n'
        << "factor_count=" << outcome.params.k << '\n'
        << "epochs=" << config.hp.epochs << '\n'
        << "decay=" << format_double(config.hp.decay) << '\n'
        << "train_seed=" << config.hp.seed << '\n'
        << "clip_at_inference=" << (config.clip_at_inference ? 1 : 0) << '\n'
        << "param_count="
        << param_count(config.model, outcome.params.m, outcome.params.n, outcome.params.k) << '\n'
        << "final_train_rmse=" << format_double(outcome.final_train_rmse) << '\n';
    if (outcome.final_test_rmse)
        out << "final_test_rmse=" << format_double(*outcome.final_test_rmse) << '\n';
}

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    ParseOptions popts;
    popts.epinions_delimiter = config.epinions_delimiter;
    const RatingsDataset full = parse_file(config.dataset_path, config.format, popts);
    auto [train_ds, test_ds] = split(full, config.split);

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec || !fs::is_directory(config.output_dir))
        throw OutputError("cannot create output directory '" + config.output_dir + "'");
    const fs::path out_dir(config.output_dir);

    ExperimentOutcome outcome;
    auto [params, report] =
        train(config.model, train_ds, test_ds.empty() ? nullptr : &test_ds, config.hp);
    outcome.params = std::move(params);
    outcome.report = std::move(report);

    // Evaluated directly so a zero-epoch run still reports its RMSE.
    outcome.final_train_rmse = rmse(outcome.params, train_ds, train_ds);
    if (!test_ds.empty()) outcome.final_test_rmse = rmse(outcome.params, train_ds, test_ds);

    if (config.emit_curves) {
        const fs::path curve = out_dir / "curve.csv";
        auto curve_out = open_output(curve);
        write_curve_csv(curve_out, outcome.report);
        outcome.curve_path = curve.string();
        if (outcome.params.has_weights()) {
            const fs::path weights = out_dir / "weights.csv";
            auto weights_out = open_output(weights);
            write_weight_history_csv(weights_out, outcome.report);
            outcome.weights_path = weights.string();
        }
    }

    const fs::path model_path = out_dir / "model.wsvd";
    save_model(outcome.params, model_path.string(), config.model_encoding);
    outcome.model_path = model_path.string();

    const fs::path summary = out_dir / "summary.txt";
    {
        auto out = open_output(summary);
        write_summary(out, config, full, train_ds, test_ds, outcome);
    }
    outcome.summary_path = summary.string();

    const fs::path timing = out_dir / "timing.txt";
    {
        auto out = open_output(timing);
        double total = 0.0;
        for (const EpochRecord& rec : outcome.report.epochs) total += rec.seconds;
        out << "total_sgd_seconds=" << format_double(total) << '\n';
        if (!outcome.report.epochs.empty())
            out << "mean_epoch_seconds=" << format_double(epoch_seconds_summary(outcome.report))
                << '\n';
    }
    outcome.timing_path = timing.string();

    return outcome;
}

std::vector<SweepCell> run_sweep(const RatingsDataset& train_ds, const RatingsDataset& test_ds,
                                 const SweepGrid& grid, const HyperParams& base) {
    if (grid.factor_counts.empty() || grid.reg_values.empty() || grid.models.empty())
        throw Error("sweep: grid must list at least one factor count, reg value, and model");
    if (test_ds.empty()) throw Error("sweep: test split has no ratings");

    std::vector<SweepCell> cells;
    for (std::int32_t k : grid.factor_counts)
        for (double reg : grid.reg_values)
            for (ModelKind model : grid.models) cells.push_back(SweepCell{k, reg, model, std::nullopt});
    std::sort(cells.begin(), cells.end(), [](const SweepCell& a, const SweepCell& b) {
        if (a.factor_count != b.factor_count) return a.factor_count < b.factor_count;
        if (a.reg != b.reg) return a.reg < b.reg;
        return int(a.model) < int(b.model);
    });

    const auto run_cell = [&](SweepCell& cell) {
        HyperParams hp = HyperParams::defaults_for(cell.model);
        hp.factor_count = cell.factor_count;
        hp.reg = ParamGroupValues::uniform(cell.reg);
        hp.epochs = base.epochs;
        hp.decay = base.decay;
        hp.seed = base.seed;
        hp.shuffle = base.shuffle;
        hp.sequential_updates = base.sequential_updates;
        try {
            auto [params, report] = train(cell.model, train_ds, nullptr, hp);
            cell.test_rmse = rmse(params, train_ds, test_ds);
        } catch (const DivergenceError&) {
            cell.test_rmse = std::nullopt;
        }
    };

    int workers = grid.workers > 0 ? grid.workers : int(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, int(cells.size())));

    if (workers == 1) {
        for (SweepCell& cell : cells) run_cell(cell);
        return cells;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                run_cell(cells[i]);
            }
        });
    for (auto& th : pool) th.join();
    return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
    out << "k,lambda,model,test_rmse\n";
    for (const SweepCell& cell : cells) {
        out << cell.factor_count << ',' << format_double(cell.reg) << ',' << to_string(cell.model)
            << ',';
        out << (cell.test_rmse ? format_double(*cell.test_rmse) : std::string("diverged"));
        out << '\n';
    }
}

} // namespace wsvd
