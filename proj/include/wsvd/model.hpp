#ifndef WSVD_MODEL_HPP
#define WSVD_MODEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsvd/dataset.hpp"

namespace wsvd {

enum class ModelKind { Average, Bias, PMF, SVD, SVDpp, WSVD };

const char* to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(const std::string& name);

/// Learnable parameters of one model. Blocks are present only for the kinds
/// that use them; absent blocks stay empty.
///
///   Average: mean
///   Bias:    mean, user_bias, item_bias
///   PMF:     user_factors, item_factors
///   SVD:     mean, biases, user_factors, item_factors
///   WSVD:    SVD blocks plus the per-factor weight vector
///   SVDpp:   SVD blocks plus implicit item factors
///
/// Factor matrices are row-major (row u of user_factors = user u's k factors).
struct ModelParams {
    ModelKind kind = ModelKind::Average;
    std::int32_t m = 0;
    std::int32_t n = 0;
    std::int32_t k = 0;

    double mean = 0.0;
    std::vector<double> user_bias;        // m
    std::vector<double> item_bias;        // n
    std::vector<double> weights;          // k (WSVD)
    std::vector<double> user_factors;     // m*k (P)
    std::vector<double> item_factors;     // n*k (Q)
    std::vector<double> implicit_factors; // n*k (SVDpp Y)

    bool has_mean() const { return kind != ModelKind::PMF; }
    bool has_biases() const { return kind != ModelKind::Average && kind != ModelKind::PMF; }
    bool has_factors() const { return kind != ModelKind::Average && kind != ModelKind::Bias; }
    bool has_weights() const { return kind == ModelKind::WSVD; }
    bool has_implicit() const { return kind == ModelKind::SVDpp; }

    std::span<double> user_row(std::int32_t u) {
        return {user_factors.data() + std::size_t(u) * k, std::size_t(k)};
    }
    std::span<const double> user_row(std::int32_t u) const {
        return {user_factors.data() + std::size_t(u) * k, std::size_t(k)};
    }
    std::span<double> item_row(std::int32_t j) {
        return {item_factors.data() + std::size_t(j) * k, std::size_t(k)};
    }
    std::span<const double> item_row(std::int32_t j) const {
        return {item_factors.data() + std::size_t(j) * k, std::size_t(k)};
    }
    std::span<double> implicit_row(std::int32_t g) {
        return {implicit_factors.data() + std::size_t(g) * k, std::size_t(k)};
    }
    std::span<const double> implicit_row(std::int32_t g) const {
        return {implicit_factors.data() + std::size_t(g) * k, std::size_t(k)};
    }

    /// Number of values actually stored in learnable blocks (the data-fit
    /// mean is not learnable).
    std::int64_t stored_learnable_count() const;
};

/// Learnable parameter count for a kind at the given shape. Average has
/// none, Bias has m + n, the factor models follow their closed formulas.
std::int64_t param_count(ModelKind kind, std::int64_t m, std::int64_t n, std::int64_t k);

/// Model prediction for (user, item). `context` supplies the rated-item sets
/// that the SVD++ implicit term sums over (pass the training split); other
/// kinds ignore it. No clipping to the rating scale. Throws
/// std::out_of_range for invalid indices.
double predict(const ModelParams& params, const RatingsDataset& context, std::int32_t user,
               std::int32_t item);

/// Context-free prediction; rejects SVD++ (which needs rated-item sets).
double predict(const ModelParams& params, std::int32_t user, std::int32_t item);

/// Prediction with cold-start fallback. Pass std::nullopt for a user or item
/// that was not seen in training: its bias and the factor term drop out.
/// Both unseen collapses to the mean (0 for PMF).
double predict_cold(const ModelParams& params, const RatingsDataset& context,
                    std::optional<std::int32_t> user, std::optional<std::int32_t> item);

/// Fresh parameters per the SGD initialization scheme: factor matrices (and
/// SVD++ implicit factors) are i.i.d. standard normal from the seed, weights
/// start at one, biases at zero, mean at zero until fit. Draw order is P,
/// then Q, then Y, so kinds sharing a seed share their common blocks.
ModelParams init_params(ModelKind kind, std::int32_t m, std::int32_t n, std::int32_t k,
                        std::uint64_t seed);

/// Closed-form fit for the Average and Bias models: mean of all ratings,
/// and per-user/per-item mean offsets from it. Users or items without
/// ratings get bias zero.
ModelParams fit_closed_form(ModelKind kind, const RatingsDataset& train);

} // namespace wsvd

#endif
