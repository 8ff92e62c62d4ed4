#include "wsvd/trainer.hpp"

#include <chrono>
#include <cmath>

#include "wsvd/rng.hpp"

namespace wsvd {

HyperParams HyperParams::defaults_for(ModelKind kind) {
    HyperParams hp;
    if (kind == ModelKind::SVDpp) {
        hp.rate = ParamGroupValues::uniform(0.007);
        hp.reg = ParamGroupValues::uniform(0.015);
        hp.reg.user_bias = 0.005;
        hp.reg.item_bias = 0.005;
    }
    return hp;
}

void HyperParams::validate() const {
    const auto nonneg = [](const ParamGroupValues& v) {
        return v.factor_weights >= 0 && v.user_factors >= 0 && v.item_factors >= 0 &&
               v.user_bias >= 0 && v.item_bias >= 0;
    };

    if (factor_count < 1) throw std::invalid_argument("hyperparams: factor count must be positive");
    if (!nonneg(reg)) throw std::invalid_argument("hyperparams: regularization must be nonnegative");
    if (!nonneg(rate)) throw std::invalid_argument("hyperparams: learning rates must be nonnegative");
    if (!(decay > 0.0 && decay <= 1.0))
        throw std::invalid_argument("hyperparams: decay must lie in (0, 1]");
    if (epochs < 0) throw std::invalid_argument("hyperparams: epoch budget must be nonnegative");
}

namespace {

double sq_norm(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

// Residual r - r_hat from the current parameters. For SVD++ also leaves the
// implicit-augmented user vector in `scratch.implicit_user`.
double residual(const ModelParams& p, const RatingsDataset& context, std::int32_t u,
                std::int32_t j, double rating, SgdScratch& scratch) {
    switch (p.kind) {
    case ModelKind::Bias:
        return rating - (p.mean + p.user_bias[u] + p.item_bias[j]);
    case ModelKind::PMF: {
        const auto pu = p.user_row(u);
        const auto qj = p.item_row(j);
        double acc = 0.0;
        for (std::int32_t g = 0; g < p.k; ++g) acc += pu[g] * qj[g];
        return rating - acc;
    }
    case ModelKind::SVD:
    case ModelKind::WSVD: {
        const auto pu = p.user_row(u);
        const auto qj = p.item_row(j);
        const double* w = p.kind == ModelKind::WSVD ? p.weights.data() : nullptr;
        double acc = 0.0;
        for (std::int32_t g = 0; g < p.k; ++g) {
            const double wg = w ? w[g] : 1.0;
            acc += (wg * pu[g]) * qj[g];
        }
        return rating - (p.mean + p.user_bias[u] + p.item_bias[j] + acc);
    }
    case ModelKind::SVDpp: {
        const auto& rated = context.items_rated_by(u);
        const auto pu = p.user_row(u);
        auto& z = scratch.implicit_user;
        z.assign(pu.begin(), pu.end());
        if (!rated.empty()) {
            const double norm = 1.0 / std::sqrt(double(rated.size()));
            for (std::int32_t g : rated) {
                const auto yg = p.implicit_row(g);
                for (std::int32_t c = 0; c < p.k; ++c) z[c] += norm * yg[c];
            }
        }
        const auto qj = p.item_row(j);
        double acc = 0.0;
        for (std::int32_t g = 0; g < p.k; ++g) acc += z[g] * qj[g];
        return rating - (p.mean + p.user_bias[u] + p.item_bias[j] + acc);
    }
    case ModelKind::Average:
        break;
    }
    throw Error("sgd: the average model has no gradient-trained parameters");
}

void check_finite_residual(double e) {
    if (!std::isfinite(e))
        throw DivergenceError("sgd_step: non-finite residual (parameters diverged)");
}

} // namespace

double loss(const ModelParams& params, const RatingsDataset& ds, const ParamGroupValues& reg) {
    double acc = 0.0;
    for (const Rating& r : ds.ratings()) {
        const double err = r.value - predict(params, ds, r.user, r.item);
        acc += 0.5 * err * err;
    }
    if (params.has_biases()) {
        acc += 0.5 * reg.user_bias * sq_norm(params.user_bias);
        acc += 0.5 * reg.item_bias * sq_norm(params.item_bias);
    }
    if (params.has_weights()) acc += 0.5 * reg.factor_weights * sq_norm(params.weights);
    if (params.has_factors()) {
        acc += 0.5 * reg.user_factors * sq_norm(params.user_factors);
        acc += 0.5 * reg.item_factors * sq_norm(params.item_factors);
    }
    if (params.has_implicit()) acc += 0.5 * reg.item_factors * sq_norm(params.implicit_factors);
    return acc;
}

GradientBundle gradient_at(const ModelParams& params, const RatingsDataset& context,
                           std::int32_t user, std::int32_t item, double rating,
                           const ParamGroupValues& reg) {
    GradientBundle grad;
    SgdScratch scratch;
    const double e = residual(params, context, user, item, rating, scratch);
    const std::int32_t k = params.k;

    if (params.has_biases()) {
        grad.d_user_bias = -e + reg.user_bias * params.user_bias[user];
        grad.d_item_bias = -e + reg.item_bias * params.item_bias[item];
    }
    if (!params.has_factors()) return grad;

    const auto pu = params.user_row(user);
    const auto qj = params.item_row(item);
    grad.d_user_factors.resize(std::size_t(k));
    grad.d_item_factors.resize(std::size_t(k));

    switch (params.kind) {
    case ModelKind::PMF:
    case ModelKind::SVD:
        for (std::int32_t g = 0; g < k; ++g) {
            grad.d_user_factors[g] = -e * qj[g] + reg.user_factors * pu[g];
            grad.d_item_factors[g] = -e * pu[g] + reg.item_factors * qj[g];
        }
        break;
    case ModelKind::WSVD: {
        const auto& w = params.weights;
        grad.d_weights.resize(std::size_t(k));
        for (std::int32_t g = 0; g < k; ++g) {
            grad.d_weights[g] = -e * (pu[g] * qj[g]) + reg.factor_weights * w[g];
            grad.d_user_factors[g] = -e * (w[g] * qj[g]) + reg.user_factors * pu[g];
            grad.d_item_factors[g] = -e * (w[g] * pu[g]) + reg.item_factors * qj[g];
        }
        break;
    }
    case ModelKind::SVDpp: {
        const auto& z = scratch.implicit_user; // filled by residual()
        for (std::int32_t g = 0; g < k; ++g) {
            grad.d_user_factors[g] = -e * qj[g] + reg.user_factors * pu[g];
            grad.d_item_factors[g] = -e * z[g] + reg.item_factors * qj[g];
        }
        const auto& rated = context.items_rated_by(user);
        grad.implicit_items.assign(rated.begin(), rated.end());
        grad.d_implicit.resize(rated.size());
        if (!rated.empty()) {
            const double norm = 1.0 / std::sqrt(double(rated.size()));
            for (std::size_t i = 0; i < rated.size(); ++i) {
                const auto yg = params.implicit_row(rated[i]);
                auto& dy = grad.d_implicit[i];
                dy.resize(std::size_t(k));
                for (std::int32_t c = 0; c < k; ++c)
                    dy[c] = -e * (norm * qj[c]) + reg.item_factors * yg[c];
            }
        }
        break;
    }
    default:
        break;
    }
    return grad;
}

namespace {

// Shared-residual update: one residual from the pre-update snapshot drives
// every block, matching the per-parameter partial derivatives exactly. SVD
// runs through the WSVD expressions with a unit weight so that a WSVD model
// holding w = 1 reproduces SVD arithmetic bit for bit.
void step_shared(ModelParams& p, const RatingsDataset& context, std::int32_t u, std::int32_t j,
                 double rating, const ParamGroupValues& reg, const ParamGroupValues& rate,
                 double s, SgdScratch& scratch) {
    const double e = residual(p, context, u, j, rating, scratch);
    check_finite_residual(e);

    if (p.has_biases()) {
        double& bu = p.user_bias[u];
        double& bj = p.item_bias[j];
        bu -= s * rate.user_bias * (-e + reg.user_bias * bu);
        bj -= s * rate.item_bias * (-e + reg.item_bias * bj);
    }
    if (!p.has_factors()) return;

    const std::int32_t k = p.k;
    const auto pu = p.user_row(u);
    const auto qj = p.item_row(j);
    scratch.pre_user.assign(pu.begin(), pu.end());
    scratch.pre_item.assign(qj.begin(), qj.end());

    if (p.kind == ModelKind::SVDpp) {
        const auto& z = scratch.implicit_user; // pre-update, filled by residual()
        for (std::int32_t g = 0; g < k; ++g) {
            pu[g] -= s * rate.user_factors * (-e * scratch.pre_item[g] + reg.user_factors * pu[g]);
            qj[g] -= s * rate.item_factors * (-e * z[g] + reg.item_factors * qj[g]);
        }
        const auto& rated = context.items_rated_by(u);
        if (!rated.empty()) {
            const double norm = 1.0 / std::sqrt(double(rated.size()));
            for (std::int32_t g : rated) {
                const auto yg = p.implicit_row(g);
                for (std::int32_t c = 0; c < k; ++c)
                    yg[c] -= s * rate.item_factors *
                             (-e * (norm * scratch.pre_item[c]) + reg.item_factors * yg[c]);
            }
        }
        return;
    }

    const bool weighted = p.kind == ModelKind::WSVD;
    if (weighted) {
        scratch.pre_weights.assign(p.weights.begin(), p.weights.end());
        for (std::int32_t g = 0; g < k; ++g)
            p.weights[g] -= s * rate.factor_weights *
                            (-e * (scratch.pre_user[g] * scratch.pre_item[g]) +
                             reg.factor_weights * p.weights[g]);
    }
    for (std::int32_t g = 0; g < k; ++g) {
        const double wg = weighted ? scratch.pre_weights[g] : 1.0;
        pu[g] -= s * rate.user_factors * (-e * (wg * scratch.pre_item[g]) + reg.user_factors * pu[g]);
        qj[g] -= s * rate.item_factors * (-e * (wg * scratch.pre_user[g]) + reg.item_factors * qj[g]);
    }
}

// Literal per-line updating: the residual is recomputed before each block,
// so later blocks see the earlier blocks' fresh values.
void step_sequential(ModelParams& p, const RatingsDataset& context, std::int32_t u,
                     std::int32_t j, double rating, const ParamGroupValues& reg,
                     const ParamGroupValues& rate, double s, SgdScratch& scratch) {
    const std::int32_t k = p.k;
    double e;

    if (p.has_biases()) {
        e = residual(p, context, u, j, rating, scratch);
        check_finite_residual(e);
        p.user_bias[u] -= s * rate.user_bias * (-e + reg.user_bias * p.user_bias[u]);

        e = residual(p, context, u, j, rating, scratch);
        check_finite_residual(e);
        p.item_bias[j] -= s * rate.item_bias * (-e + reg.item_bias * p.item_bias[j]);
    }
    if (!p.has_factors()) return;

    const auto pu = p.user_row(u);
    const auto qj = p.item_row(j);

    if (p.kind == ModelKind::WSVD) {
        e = residual(p, context, u, j, rating, scratch);
        check_finite_residual(e);
        for (std::int32_t g = 0; g < k; ++g)
            p.weights[g] -= s * rate.factor_weights *
                            (-e * (pu[g] * qj[g]) + reg.factor_weights * p.weights[g]);
    }

    e = residual(p, context, u, j, rating, scratch);
    check_finite_residual(e);
    if (p.kind == ModelKind::SVDpp) {
        for (std::int32_t g = 0; g < k; ++g)
            pu[g] -= s * rate.user_factors * (-e * qj[g] + reg.user_factors * pu[g]);
    } else {
        for (std::int32_t g = 0; g < k; ++g) {
            const double wg = p.kind == ModelKind::WSVD ? p.weights[g] : 1.0;
            pu[g] -= s * rate.user_factors * (-e * (wg * qj[g]) + reg.user_factors * pu[g]);
        }
    }

    e = residual(p, context, u, j, rating, scratch);
    check_finite_residual(e);
    if (p.kind == ModelKind::SVDpp) {
        const auto& z = scratch.implicit_user;
        for (std::int32_t g = 0; g < k; ++g)
            qj[g] -= s * rate.item_factors * (-e * z[g] + reg.item_factors * qj[g]);
    } else {
        for (std::int32_t g = 0; g < k; ++g) {
            const double wg = p.kind == ModelKind::WSVD ? p.weights[g] : 1.0;
            qj[g] -= s * rate.item_factors * (-e * (wg * pu[g]) + reg.item_factors * qj[g]);
        }
    }

    if (p.kind == ModelKind::SVDpp) {
        const auto& rated = context.items_rated_by(u);
        if (!rated.empty()) {
            e = residual(p, context, u, j, rating, scratch);
            check_finite_residual(e);
            scratch.pre_item.assign(qj.begin(), qj.end());
            const double norm = 1.0 / std::sqrt(double(rated.size()));
            for (std::int32_t g : rated) {
                const auto yg = p.implicit_row(g);
                for (std::int32_t c = 0; c < k; ++c)
                    yg[c] -= s * rate.item_factors *
                             (-e * (norm * scratch.pre_item[c]) + reg.item_factors * yg[c]);
            }
        }
    }
}

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool params_finite(const ModelParams& p) {
    return std::isfinite(p.mean) && all_finite(p.user_bias) && all_finite(p.item_bias) &&
           all_finite(p.weights) && all_finite(p.user_factors) && all_finite(p.item_factors) &&
           all_finite(p.implicit_factors);
}

} // namespace

void sgd_step(ModelParams& params, const RatingsDataset& context, std::int32_t user,
              std::int32_t item, double rating, const ParamGroupValues& reg,
              const ParamGroupValues& rate, double decay_factor, SgdScratch& scratch,
              bool sequential) {
    if (user < 0 || user >= params.m || item < 0 || item >= params.n)
        throw std::out_of_range("sgd_step: rating index out of range");
    if (sequential)
        step_sequential(params, context, user, item, rating, reg, rate, decay_factor, scratch);
    else
        step_shared(params, context, user, item, rating, reg, rate, decay_factor, scratch);
}

void sgd_step(ModelParams& params, const RatingsDataset& context, std::int32_t user,
              std::int32_t item, double rating, const ParamGroupValues& reg,
              const ParamGroupValues& rate, double decay_factor) {
    SgdScratch scratch;
    sgd_step(params, context, user, item, rating, reg, rate, decay_factor, scratch, false);
}

std::pair<ModelParams, TrainReport> train(ModelKind kind, const RatingsDataset& train_ds,
                                          const RatingsDataset* test_ds, const HyperParams& hp) {
    using clock = std::chrono::steady_clock;
    if (train_ds.empty()) throw Error("train: training dataset has no ratings");
    hp.validate();

    TrainReport report;

    if (kind == ModelKind::Average || kind == ModelKind::Bias) {
        const auto t0 = clock::now();
        ModelParams params = fit_closed_form(kind, train_ds);
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        EpochRecord rec;
        rec.epoch = 0;
        rec.seconds = secs;
        rec.train_rmse = rmse(params, train_ds, train_ds);
        if (test_ds && !test_ds->empty()) rec.test_rmse = rmse(params, train_ds, *test_ds);
        report.epochs.push_back(rec);
        return {std::move(params), std::move(report)};
    }

    ModelParams params =
        init_params(kind, train_ds.user_count(), train_ds.item_count(), hp.factor_count, hp.seed);
    if (params.has_mean()) params.mean = global_mean(train_ds);

    const std::size_t total = train_ds.size();
    std::vector<std::uint32_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = static_cast<std::uint32_t>(i);
    // Visit order gets its own stream so it stays independent of the
    // initialization draws made from hp.seed.
    SeededRng order_rng(hp.seed + 0x9E3779B97F4A7C15ull);

    SgdScratch scratch;
    const auto& ratings = train_ds.ratings();

    for (std::int32_t epoch = 0; epoch < hp.epochs; ++epoch) {
        if (hp.shuffle) {
            for (std::size_t i = total - 1; i > 0; --i)
                std::swap(order[i], order[order_rng.below(i + 1)]);
        }
        const double decay_factor = std::pow(hp.decay, double(epoch));

        const auto t0 = clock::now();
        for (std::size_t step = 0; step < total; ++step) {
            const Rating& r = ratings[order[step]];
            try {
                sgd_step(params, train_ds, r.user, r.item, r.value, hp.reg, hp.rate, decay_factor,
                         scratch, hp.sequential_updates);
            } catch (const DivergenceError&) {
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      ", rating index " + std::to_string(order[step]));
            }
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();

        if (!params_finite(params))
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                  ": non-finite parameter after the pass");

        EpochRecord rec;
        rec.epoch = epoch;
        rec.seconds = secs;
        rec.train_rmse = rmse(params, train_ds, train_ds);
        if (test_ds && !test_ds->empty()) rec.test_rmse = rmse(params, train_ds, *test_ds);
        report.epochs.push_back(rec);
        if (params.has_weights()) report.weight_history.push_back(params.weights);
    }

    return {std::move(params), std::move(report)};
}

} // namespace wsvd
