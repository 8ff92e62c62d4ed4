#include "wsvd/model.hpp"

#include <cmath>
#include <stdexcept>

#include "wsvd/rng.hpp"

namespace wsvd {

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::Average: return "average";
    case ModelKind::Bias: return "bias";
    case ModelKind::PMF: return "pmf";
    case ModelKind::SVD: return "svd";
    case ModelKind::SVDpp: return "svdpp";
    case ModelKind::WSVD: return "wsvd";
    }
    return "?";
}

std::optional<ModelKind> model_kind_from_string(const std::string& name) {
    if (name == "average") return ModelKind::Average;
    if (name == "bias") return ModelKind::Bias;
    if (name == "pmf") return ModelKind::PMF;
    if (name == "svd") return ModelKind::SVD;
    if (name == "svdpp") return ModelKind::SVDpp;
    if (name == "wsvd") return ModelKind::WSVD;
    return std::nullopt;
}

std::int64_t ModelParams::stored_learnable_count() const {
    return std::int64_t(user_bias.size()) + std::int64_t(item_bias.size()) +
           std::int64_t(weights.size()) + std::int64_t(user_factors.size()) +
           std::int64_t(item_factors.size()) + std::int64_t(implicit_factors.size());
}

std::int64_t param_count(ModelKind kind, std::int64_t m, std::int64_t n, std::int64_t k) {
    switch (kind) {
    case ModelKind::Average: return 0;
    case ModelKind::Bias: return m + n;
    case ModelKind::PMF: return m * k + n * k;
    case ModelKind::SVD: return m * (k + 1) + n * (k + 1);
    case ModelKind::WSVD: return m * (k + 1) + n * (k + 1) + k;
    case ModelKind::SVDpp: return m * (k + 1) + n * (k + 1) + n * k;
    }
    return 0;
}

namespace {

void check_indices(const ModelParams& p, std::int32_t user, std::int32_t item) {
    if (user < 0 || user >= p.m)
        throw std::out_of_range("predict: user index " + std::to_string(user) + " out of range");
    if (item < 0 || item >= p.n)
        throw std::out_of_range("predict: item index " + std::to_string(item) + " out of range");
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) acc += a[g] * b[g];
    return acc;
}

// (w ⊙ p) · q, accumulated in the same order as dot() so that unit weights
// reproduce the plain dot product bit for bit.
double weighted_dot(std::span<const double> w, std::span<const double> p,
                    std::span<const double> q) {
    double acc = 0.0;
    for (std::size_t g = 0; g < w.size(); ++g) acc += (w[g] * p[g]) * q[g];
    return acc;
}

double predict_impl(const ModelParams& params, const RatingsDataset* context, std::int32_t user,
                    std::int32_t item) {
    check_indices(params, user, item);
    switch (params.kind) {
    case ModelKind::Average:
        return params.mean;
    case ModelKind::Bias:
        return params.mean + params.user_bias[user] + params.item_bias[item];
    case ModelKind::PMF:
        return dot(params.user_row(user), params.item_row(item));
    case ModelKind::SVD:
        return params.mean + params.user_bias[user] + params.item_bias[item] +
               dot(params.user_row(user), params.item_row(item));
    case ModelKind::WSVD:
        return params.mean + params.user_bias[user] + params.item_bias[item] +
               weighted_dot(params.weights, params.user_row(user), params.item_row(item));
    case ModelKind::SVDpp: {
        if (!context) throw Error("predict: SVD++ needs a training-context dataset");
        const auto& rated = context->items_rated_by(user);
        const auto q = params.item_row(item);
        double acc = params.mean + params.user_bias[user] + params.item_bias[item] +
                     dot(params.user_row(user), q);
        if (!rated.empty()) {
            const double norm = 1.0 / std::sqrt(double(rated.size()));
            double implicit = 0.0;
            for (std::int32_t g : rated) implicit += dot(params.implicit_row(g), q);
            acc += norm * implicit;
        }
        return acc;
    }
    }
    throw Error("predict: unknown model kind");
}

} // namespace

double predict(const ModelParams& params, const RatingsDataset& context, std::int32_t user,
               std::int32_t item) {
    return predict_impl(params, &context, user, item);
}

double predict(const ModelParams& params, std::int32_t user, std::int32_t item) {
    return predict_impl(params, nullptr, user, item);
}

double predict_cold(const ModelParams& params, const RatingsDataset& context,
                    std::optional<std::int32_t> user, std::optional<std::int32_t> item) {
    if (user && (*user < 0 || *user >= params.m))
        throw std::out_of_range("predict_cold: user index out of range");
    if (item && (*item < 0 || *item >= params.n))
        throw std::out_of_range("predict_cold: item index out of range");
    if (user && item) return predict(params, context, *user, *item);
    if (params.kind == ModelKind::PMF) return 0.0; // the dot needs both sides
    double acc = params.has_mean() ? params.mean : 0.0;
    if (params.has_biases()) {
        if (user) acc += params.user_bias[*user];
        if (item) acc += params.item_bias[*item];
    }
    return acc;
}

ModelParams init_params(ModelKind kind, std::int32_t m, std::int32_t n, std::int32_t k,
                        std::uint64_t seed) {
    if (m < 1 || n < 1) throw Error("init_params: m and n must be positive");
    ModelParams p;
    p.kind = kind;
    p.m = m;
    p.n = n;

    if (kind == ModelKind::Average) return p;
    if (kind == ModelKind::Bias) {
        p.user_bias.assign(std::size_t(m), 0.0);
        p.item_bias.assign(std::size_t(n), 0.0);
        return p;
    }

    if (k < 1) throw Error("init_params: k must be positive for factor models");
    p.k = k;
    if (p.has_biases()) {
        p.user_bias.assign(std::size_t(m), 0.0);
        p.item_bias.assign(std::size_t(n), 0.0);
    }

    SeededRng rng(seed);
    p.user_factors.resize(std::size_t(m) * std::size_t(k));
    for (double& v : p.user_factors) v = rng.normal();
    p.item_factors.resize(std::size_t(n) * std::size_t(k));
    for (double& v : p.item_factors) v = rng.normal();
    if (p.has_implicit()) {
        p.implicit_factors.resize(std::size_t(n) * std::size_t(k));
        for (double& v : p.implicit_factors) v = rng.normal();
    }
    if (p.has_weights()) p.weights.assign(std::size_t(k), 1.0);
    return p;
}

ModelParams fit_closed_form(ModelKind kind, const RatingsDataset& train) {
    if (kind != ModelKind::Average && kind != ModelKind::Bias)
        throw Error("fit_closed_form: only the average and bias models have closed-form fits");
    if (train.empty()) throw Error("fit_closed_form: dataset has no ratings");

    ModelParams p = init_params(kind, train.user_count(), train.item_count(), 0, 0);
    p.mean = global_mean(train);
    if (kind == ModelKind::Average) return p;

    std::vector<double> user_sum(std::size_t(train.user_count()), 0.0);
    std::vector<std::int32_t> user_cnt(std::size_t(train.user_count()), 0);
    std::vector<double> item_sum(std::size_t(train.item_count()), 0.0);
    std::vector<std::int32_t> item_cnt(std::size_t(train.item_count()), 0);
    for (const Rating& r : train.ratings()) {
        user_sum[std::size_t(r.user)] += r.value;
        ++user_cnt[std::size_t(r.user)];
        item_sum[std::size_t(r.item)] += r.value;
        ++item_cnt[std::size_t(r.item)];
    }
    for (std::int32_t u = 0; u < train.user_count(); ++u)
        if (user_cnt[std::size_t(u)] > 0)
            p.user_bias[std::size_t(u)] = user_sum[std::size_t(u)] / user_cnt[std::size_t(u)] - p.mean;
    for (std::int32_t j = 0; j < train.item_count(); ++j)
        if (item_cnt[std::size_t(j)] > 0)
            p.item_bias[std::size_t(j)] = item_sum[std::size_t(j)] / item_cnt[std::size_t(j)] - p.mean;
    return p;
}

} // namespace wsvd
