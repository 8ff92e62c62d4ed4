#ifndef WSVD_TRAINER_HPP
#define WSVD_TRAINER_HPP

#include <cstdint>
#include <vector>

#include "wsvd/dataset.hpp"
#include "wsvd/eval.hpp"
#include "wsvd/model.hpp"

namespace wsvd {

/// One value per learnable parameter family, used for both regularization
/// strengths and learning rates. Implicit item factors (SVD++) share the
/// item-factor entry.
struct ParamGroupValues {
    double factor_weights = 0.0;
    double user_factors = 0.0;
    double item_factors = 0.0;
    double user_bias = 0.0;
    double item_bias = 0.0;

    static ParamGroupValues uniform(double v) { return {v, v, v, v, v}; }
};

struct HyperParams {
    std::int32_t factor_count = 15;                        // k
    ParamGroupValues reg = ParamGroupValues::uniform(0.02);   // >= 0 componentwise
    ParamGroupValues rate = ParamGroupValues::uniform(0.005); // >= 0; zero freezes a block
    double decay = 0.9;      // per-epoch multiplicative step shrink, in (0, 1]
    std::int32_t epochs = 50; // >= 0; 0 trains nothing
    std::uint64_t seed = 42;
    bool shuffle = true;     // fresh seeded shuffle per epoch; false = dataset order
    bool sequential_updates = false; // see sgd_step

    /// Suggested settings per model: factor models use rate 0.005 / reg 0.02,
    /// except SVD++ which uses rate 0.007 with reg 0.005 on biases and 0.015
    /// on factor blocks.
    static HyperParams defaults_for(ModelKind kind);

    void validate() const;
};

/// Partial derivatives of the single-rating objective with respect to every
/// parameter the rating touches. Bias slots are meaningful only for kinds
/// with biases; vector slots are empty for kinds without the block.
struct GradientBundle {
    double d_user_bias = 0.0;
    double d_item_bias = 0.0;
    std::vector<double> d_weights;
    std::vector<double> d_user_factors;
    std::vector<double> d_item_factors;
    std::vector<std::int32_t> implicit_items;    // SVD++: R(u), ascending
    std::vector<std::vector<double>> d_implicit; // parallel to implicit_items
};

/// Regularized squared loss over a dataset: half the sum of squared
/// residuals plus (reg/2) * squared Frobenius norm of each learnable block
/// the kind carries. `ds` doubles as the SVD++ context.
double loss(const ModelParams& params, const RatingsDataset& ds, const ParamGroupValues& reg);

/// Analytic gradients at one rating, all evaluated against the current
/// parameter values (shared residual). `context` supplies SVD++ rated-item
/// sets; other kinds ignore it.
GradientBundle gradient_at(const ModelParams& params, const RatingsDataset& context,
                           std::int32_t user, std::int32_t item, double rating,
                           const ParamGroupValues& reg);

/// Reusable buffers for sgd_step; one per training run avoids per-rating
/// allocation.
struct SgdScratch {
    std::vector<double> pre_user;
    std::vector<double> pre_item;
    std::vector<double> pre_weights;
    std::vector<double> implicit_user; // SVD++: p_u + |R|^{-1/2} sum of y_g
};

/// One SGD update at one rating, in place. Every block moves by
/// -decay_factor * rate * gradient. By default all gradients are evaluated
/// on the pre-update parameter snapshot (the residual is shared across
/// blocks); with `sequential` the blocks update one at a time in the order
/// user bias, item bias, weights, user factors, item factors, implicit
/// factors, with the residual recomputed before each block. Throws
/// DivergenceError when the residual is non-finite.
void sgd_step(ModelParams& params, const RatingsDataset& context, std::int32_t user,
              std::int32_t item, double rating, const ParamGroupValues& reg,
              const ParamGroupValues& rate, double decay_factor, SgdScratch& scratch,
              bool sequential = false);

/// Convenience overload with throwaway scratch.
void sgd_step(ModelParams& params, const RatingsDataset& context, std::int32_t user,
              std::int32_t item, double rating, const ParamGroupValues& reg,
              const ParamGroupValues& rate, double decay_factor);

/// Full training run. Factor models start from init_params(seed), take the
/// training mean where the kind has one, and run `epochs` SGD passes with
/// the per-epoch step scale decay^epoch. Average and Bias are fit in closed
/// form and report a single epoch. After each epoch the report records train
/// RMSE, test RMSE when a test split is given, the wall-clock seconds of the
/// SGD pass itself, and (WSVD) a snapshot of the factor weights. Everything
/// except the timings is deterministic in (datasets, hyperparameters).
/// Throws DivergenceError, naming epoch and rating index, if a parameter
/// turns non-finite.
std::pair<ModelParams, TrainReport> train(ModelKind kind, const RatingsDataset& train_ds,
                                          const RatingsDataset* test_ds, const HyperParams& hp);

} // namespace wsvd

#endif
