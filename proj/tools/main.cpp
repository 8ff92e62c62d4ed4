// wsvd - latent-factor recommender experiment runner.
//
// Subcommands:
//   run      train one model on a rating file and write reports
//   sweep    train a (k, lambda, model) grid and write a results table
//   predict  score one (user, item) pair with a saved model
//   inspect  print a saved model's shape, parameter count, and factor weights
//
// Exit codes: 0 success, 3 ingestion error, 4 divergence, 5 unwritable
// output, 6 model-file error, 1 other failure (CLI11 reserves its own codes
// for usage errors).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsvd/eval.hpp"
#include "wsvd/experiment.hpp"

namespace {

constexpr int kExitIngest = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitOutput = 5;
constexpr int kExitModelFile = 6;

struct HyperFlags {
    std::optional<std::int32_t> factor_count;
    std::optional<std::int32_t> epochs;
    std::optional<double> decay;
    std::optional<std::uint64_t> seed;
    bool no_shuffle = false;
    bool sequential = false;
    std::optional<double> rate_all, rate_weights, rate_user_factors, rate_item_factors,
        rate_user_bias, rate_item_bias;
    std::optional<double> reg_all, reg_weights, reg_user_factors, reg_item_factors, reg_user_bias,
        reg_item_bias;
};

void add_hyper_flags(CLI::App* cmd, HyperFlags& flags) {
    cmd->add_option("-k,--factors", flags.factor_count, "Number of latent factors");
    cmd->add_option("--epochs", flags.epochs, "SGD epoch budget");
    cmd->add_option("--decay", flags.decay, "Per-epoch learning decay in (0,1]");
    cmd->add_option("--train-seed", flags.seed, "Seed for initialization and visit order");
    cmd->add_flag("--no-shuffle", flags.no_shuffle, "Visit ratings in file order every epoch");
    cmd->add_flag("--sequential-updates", flags.sequential,
                  "Update blocks one at a time, recomputing the residual between blocks");
    cmd->add_option("--rate", flags.rate_all, "Learning rate for every parameter block");
    cmd->add_option("--rate-weights", flags.rate_weights, "Learning rate for factor weights");
    cmd->add_option("--rate-user-factors", flags.rate_user_factors, "");
    cmd->add_option("--rate-item-factors", flags.rate_item_factors, "");
    cmd->add_option("--rate-user-bias", flags.rate_user_bias, "");
    cmd->add_option("--rate-item-bias", flags.rate_item_bias, "");
    cmd->add_option("--reg", flags.reg_all, "Regularization for every parameter block");
    cmd->add_option("--reg-weights", flags.reg_weights, "Regularization for factor weights");
    cmd->add_option("--reg-user-factors", flags.reg_user_factors, "");
    cmd->add_option("--reg-item-factors", flags.reg_item_factors, "");
    cmd->add_option("--reg-user-bias", flags.reg_user_bias, "");
    cmd->add_option("--reg-item-bias", flags.reg_item_bias, "");
}

wsvd::HyperParams resolve_hyperparams(wsvd::ModelKind model, const HyperFlags& flags) {
    wsvd::HyperParams hp = wsvd::HyperParams::defaults_for(model);
    if (flags.factor_count) hp.factor_count = *flags.factor_count;
    if (flags.epochs) hp.epochs = *flags.epochs;
    if (flags.decay) hp.decay = *flags.decay;
    if (flags.seed) hp.seed = *flags.seed;
    if (flags.no_shuffle) hp.shuffle = false;
    if (flags.sequential) hp.sequential_updates = true;

    if (flags.rate_all) hp.rate = wsvd::ParamGroupValues::uniform(*flags.rate_all);
    if (flags.rate_weights) hp.rate.factor_weights = *flags.rate_weights;
    if (flags.rate_user_factors) hp.rate.user_factors = *flags.rate_user_factors;
    if (flags.rate_item_factors) hp.rate.item_factors = *flags.rate_item_factors;
    if (flags.rate_user_bias) hp.rate.user_bias = *flags.rate_user_bias;
    if (flags.rate_item_bias) hp.rate.item_bias = *flags.rate_item_bias;

    if (flags.reg_all) hp.reg = wsvd::ParamGroupValues::uniform(*flags.reg_all);
    if (flags.reg_weights) hp.reg.factor_weights = *flags.reg_weights;
    if (flags.reg_user_factors) hp.reg.user_factors = *flags.reg_user_factors;
    if (flags.reg_item_factors) hp.reg.item_factors = *flags.reg_item_factors;
    if (flags.reg_user_bias) hp.reg.user_bias = *flags.reg_user_bias;
    if (flags.reg_item_bias) hp.reg.item_bias = *flags.reg_item_bias;
    return hp;
}

wsvd::ModelKind parse_model_name(const std::string& name) {
    const auto kind = wsvd::model_kind_from_string(name);
    if (!kind)
        throw CLI::ValidationError("--model", "unknown model '" + name +
                                                  "' (expected average, bias, pmf, svd, svdpp, "
                                                  "or wsvd)");
    return *kind;
}

wsvd::DatasetFormat parse_format_name(const std::string& name) {
    const auto fmt = wsvd::dataset_format_from_string(name);
    if (!fmt)
        throw CLI::ValidationError("--format", "unknown format '" + name +
                                                   "' (expected ml-100k, ml-delim, filmtrust, "
                                                   "or epinions)");
    return *fmt;
}

double clip_to_scale(double value, wsvd::RatingScale scale) {
    return std::min(scale.max, std::max(scale.min, value));
}

char resolve_delimiter(const std::string& flag) {
    if (flag.size() != 1)
        throw CLI::ValidationError("--epinions-delim", "expected a single character");
    return flag[0];
}

int run_command(const std::string& dataset, const std::string& format_name,
                const std::string& model_name, const std::string& epinions_delim,
                const HyperFlags& flags,
                double split_fraction, std::uint64_t split_seed, const std::string& output_dir,
                bool no_curves, bool clip, const std::string& encoding_name) {
    wsvd::ExperimentConfig config;
    config.dataset_path = dataset;
    config.format = parse_format_name(format_name);
    config.epinions_delimiter = resolve_delimiter(epinions_delim);
    config.model = parse_model_name(model_name);
    config.hp = resolve_hyperparams(config.model, flags);
    config.split = {split_fraction, split_seed};
    config.output_dir = output_dir;
    config.emit_curves = !no_curves;
    config.clip_at_inference = clip;
    config.model_encoding =
        encoding_name == "text" ? wsvd::ModelEncoding::Text : wsvd::ModelEncoding::Binary;
    config.hp.validate();

    const wsvd::ExperimentOutcome outcome = wsvd::run_experiment(config);

    std::cout << "model " << to_string(config.model) << ", k=" << outcome.params.k
              << ", epochs=" << config.hp.epochs << '\n';
    std::cout << "train rmse " << wsvd::format_double(outcome.final_train_rmse) << '\n';
    if (outcome.final_test_rmse)
        std::cout << "test rmse " << wsvd::format_double(*outcome.final_test_rmse) << '\n';
    if (!outcome.report.epochs.empty())
        std::cout << "mean epoch seconds "
                  << wsvd::format_double(wsvd::epoch_seconds_summary(outcome.report)) << '\n';
    std::cout << "results in " << config.output_dir << '\n';
    return 0;
}

int sweep_command(const std::string& dataset, const std::string& format_name,
                  const std::string& epinions_delim, const std::vector<std::int32_t>& k_values,
                  const std::vector<double>& reg_values, const std::string& models_csv,
                  int workers, const HyperFlags& flags, double split_fraction,
                  std::uint64_t split_seed, const std::string& output_dir) {
    wsvd::ParseOptions popts;
    popts.epinions_delimiter = resolve_delimiter(epinions_delim);
    const auto full = wsvd::parse_file(dataset, parse_format_name(format_name), popts);
    auto [train_ds, test_ds] = wsvd::split(full, {split_fraction, split_seed});

    wsvd::SweepGrid grid;
    if (!k_values.empty()) grid.factor_counts = k_values;
    if (!reg_values.empty()) grid.reg_values = reg_values;
    grid.workers = workers;
    grid.models.clear();
    std::istringstream models_ss(models_csv);
    std::string name;
    while (std::getline(models_ss, name, ',')) grid.models.push_back(parse_model_name(name));

    // Per-model rates/regs are set per cell; only the shared knobs carry.
    const wsvd::HyperParams base = resolve_hyperparams(wsvd::ModelKind::WSVD, flags);

    const auto cells = wsvd::run_sweep(train_ds, test_ds, grid, base);

    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec || !std::filesystem::is_directory(output_dir))
        throw wsvd::OutputError("cannot create output directory '" + output_dir + "'");
    const auto csv_path = std::filesystem::path(output_dir) / "sweep.csv";
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw wsvd::OutputError("cannot write '" + csv_path.string() + "'");
    wsvd::write_sweep_csv(out, cells);

    std::cout << cells.size() << " cells -> " << csv_path.string() << '\n';
    return 0;
}

int predict_command(const std::string& model_file, const std::string& dataset,
                    const std::string& format_name, const std::string& epinions_delim,
                    const std::string& raw_user, const std::string& raw_item,
                    std::optional<double> split_fraction, std::optional<std::uint64_t> split_seed,
                    bool clip) {
    const wsvd::ModelParams params = wsvd::load_model(model_file);

    wsvd::ParseOptions popts;
    popts.epinions_delimiter = resolve_delimiter(epinions_delim);
    const auto full = wsvd::parse_file(dataset, parse_format_name(format_name), popts);
    if (full.user_count() != params.m || full.item_count() != params.n)
        throw wsvd::ModelIoError(wsvd::ModelIoError::Kind::Shape,
                                 "model shape (" + std::to_string(params.m) + "x" +
                                     std::to_string(params.n) +
                                     ") does not match the dataset's id maps");

    // With split flags the training half is reconstructed exactly; otherwise
    // the whole dataset stands in as the seen/implicit context.
    std::optional<wsvd::RatingsDataset> train_ctx;
    if (split_fraction || split_seed) {
        wsvd::SplitSpec spec{split_fraction.value_or(0.8), split_seed.value_or(13)};
        train_ctx = wsvd::split(full, spec).first;
    }
    const wsvd::RatingsDataset& context = train_ctx ? *train_ctx : full;

    const auto user_idx = full.users().find(raw_user);
    const auto item_idx = full.items().find(raw_item);
    const bool user_seen = user_idx && context.user_degree(*user_idx) > 0;
    const bool item_seen = item_idx && context.item_degree(*item_idx) > 0;
    if (!user_seen) std::cerr << "note: user '" << raw_user << "' unseen, using fallback\n";
    if (!item_seen) std::cerr << "note: item '" << raw_item << "' unseen, using fallback\n";

    double value = wsvd::predict_cold(
        params, context, user_seen ? user_idx : std::nullopt, item_seen ? item_idx : std::nullopt);
    if (clip) value = clip_to_scale(value, full.scale());
    std::cout << wsvd::format_double(value) << '\n';
    return 0;
}

int inspect_command(const std::string& model_file) {
    const wsvd::ModelParams params = wsvd::load_model(model_file);
    std::cout << "kind " << to_string(params.kind) << '\n'
              << "users " << params.m << '\n'
              << "items " << params.n << '\n'
              << "factors " << params.k << '\n'
              << "learnable parameters "
              << wsvd::param_count(params.kind, params.m, params.n, params.k) << '\n';
    if (params.has_mean()) std::cout << "mean " << wsvd::format_double(params.mean) << '\n';
    if (params.has_weights()) {
        std::cout << "factor weights";
        for (double w : params.weights) std::cout << ' ' << wsvd::format_double(w);
        std::cout << '\n';
        try {
            const auto importance = wsvd::relative_importance(params.weights);
            std::cout << "relative importance";
            for (double r : importance) std::cout << ' ' << wsvd::format_double(r);
            std::cout << '\n';
        } catch (const wsvd::Error& e) {
            std::cout << "relative importance unavailable: " << e.what() << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent-factor recommender benchmark (weighted-SVD and baselines)"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Key=value config file with a [run] or [sweep] section; place the flag "
                   "before the subcommand; command-line flags override file values");

    // run
    auto* run = app.add_subcommand("run", "Train one model and write reports");
    std::string dataset, format_name = "ml-100k", model_name = "wsvd", output_dir = "out";
    std::string encoding_name = "binary";
    std::string epinions_delim = " ";
    double split_fraction = 0.8;
    std::uint64_t split_seed = 13;
    bool no_curves = false, clip = false;
    HyperFlags run_flags;
    run->add_option("--dataset", dataset, "Rating file")->required();
    run->add_option("--format", format_name, "ml-100k | ml-delim | filmtrust | epinions");
    run->add_option("--epinions-delim", epinions_delim, "Field delimiter for the epinions format");
    run->add_option("--model", model_name, "average | bias | pmf | svd | svdpp | wsvd");
    run->add_option("--split-fraction", split_fraction, "Training fraction in (0,1)");
    run->add_option("--split-seed", split_seed, "Split seed");
    run->add_option("--output", output_dir, "Output directory");
    run->add_flag("--no-curves", no_curves, "Skip curve/weight CSV emission");
    run->add_flag("--clip", clip,
              "Record an inference-time clipping preference (evaluation never clips)");
    run->add_option("--model-encoding", encoding_name, "binary | text");
    add_hyper_flags(run, run_flags);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Train a (k, lambda, model) grid");
    std::string sweep_dataset, sweep_format = "ml-100k", sweep_output = "out";
    std::string models_csv = "wsvd,svd,svdpp,pmf";
    std::string sweep_epinions_delim = " ";
    std::vector<std::int32_t> k_values;
    std::vector<double> reg_values;
    double sweep_fraction = 0.8;
    std::uint64_t sweep_seed = 13;
    int workers = 0;
    HyperFlags sweep_flags;
    sweep->add_option("--dataset", sweep_dataset, "Rating file")->required();
    sweep->add_option("--format", sweep_format, "ml-100k | ml-delim | filmtrust | epinions");
    sweep->add_option("--epinions-delim", sweep_epinions_delim, "Epinions delimiter");
    sweep->add_option("--k-values", k_values, "Factor counts (default 10 20 40 80)");
    sweep->add_option("--reg-values", reg_values,
                      "Uniform regularization values (default 0.001 ... 1)");
    sweep->add_option("--models", models_csv, "Comma-separated model list");
    sweep->add_option("--workers", workers, "Concurrent cells (0 = hardware)");
    sweep->add_option("--split-fraction", sweep_fraction, "Training fraction in (0,1)");
    sweep->add_option("--split-seed", sweep_seed, "Split seed");
    sweep->add_option("--output", sweep_output, "Output directory");
    add_hyper_flags(sweep, sweep_flags);

    // predict
    auto* predict = app.add_subcommand("predict", "Score one (user, item) pair");
    std::string predict_model_file, predict_dataset, predict_format = "ml-100k";
    std::string raw_user, raw_item;
    std::string predict_epinions_delim = " ";
    std::optional<double> predict_fraction;
    std::optional<std::uint64_t> predict_seed;
    bool predict_clip = false;
    predict->add_option("--model-file", predict_model_file, "Saved model")->required();
    predict->add_option("--dataset", predict_dataset, "Rating file that defines the id maps")
        ->required();
    predict->add_option("--format", predict_format, "Dataset format");
    predict->add_option("--epinions-delim", predict_epinions_delim, "Epinions delimiter");
    predict->add_option("--user", raw_user, "Raw user id as it appears in the file")->required();
    predict->add_option("--item", raw_item, "Raw item id as it appears in the file")->required();
    predict->add_option("--split-fraction", predict_fraction,
                        "Reconstruct the training half with this fraction");
    predict->add_option("--split-seed", predict_seed, "Reconstruct the training half's seed");
    predict->add_flag("--clip", predict_clip, "Clip the prediction to the rating scale");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Describe a saved model");
    std::string inspect_model_file;
    inspect->add_option("--model-file", inspect_model_file, "Saved model")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(dataset, format_name, model_name, epinions_delim, run_flags,
                               split_fraction, split_seed, output_dir, no_curves, clip,
                               encoding_name);
        if (sweep->parsed())
            return sweep_command(sweep_dataset, sweep_format, sweep_epinions_delim, k_values,
                                 reg_values, models_csv, workers, sweep_flags, sweep_fraction,
                                 sweep_seed, sweep_output);
        if (predict->parsed())
            return predict_command(predict_model_file, predict_dataset, predict_format,
                                   predict_epinions_delim, raw_user, raw_item, predict_fraction,
                                   predict_seed, predict_clip);
        if (inspect->parsed()) return inspect_command(inspect_model_file);
    } catch (const wsvd::DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const wsvd::ModelIoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitModelFile;
    } catch (const wsvd::OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOutput;
    } catch (const wsvd::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIngest;
    } catch (const wsvd::Error& e) {
        // Remaining library errors at this level come from reading data.
        std::cerr << "error: " << e.what() << '\n';
        return kExitIngest;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
