#ifndef WSVD_DATASET_HPP
#define WSVD_DATASET_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wsvd/error.hpp"

namespace wsvd {

/// One observed rating, with dense 0-based user/item indices.
struct Rating {
    std::int32_t user;
    std::int32_t item;
    double value;
};

/// Inclusive range of valid rating values for a dataset.
struct RatingScale {
    double min;
    double max;
};

/// Bidirectional map between raw ids (as they appear in source files) and
/// dense 0-based indices, assigned in first-appearance order.
class IdMap {
public:
    /// Returns the dense index for a raw id, creating one if unseen.
    std::int32_t intern(const std::string& raw);

    std::optional<std::int32_t> find(const std::string& raw) const;
    const std::string& raw(std::int32_t dense) const;
    std::int32_t size() const { return static_cast<std::int32_t>(to_raw_.size()); }

private:
    std::unordered_map<std::string, std::int32_t> to_dense_;
    std::vector<std::string> to_raw_;
};

/// Immutable sparse triplet store of observed ratings.
///
/// User/item counts come from the id maps, so a train/test half produced by
/// split() keeps the parent's dimensions even when some users or items have
/// no ratings in that half. Construction validates index ranges, the rating
/// scale, and rejects duplicate (user, item) pairs. Safe to share across
/// threads once built.
class RatingsDataset {
public:
    RatingsDataset(std::vector<Rating> ratings,
                   std::shared_ptr<const IdMap> users,
                   std::shared_ptr<const IdMap> items,
                   RatingScale scale);

    std::int32_t user_count() const { return users_->size(); } // m
    std::int32_t item_count() const { return items_->size(); } // n
    std::size_t size() const { return ratings_.size(); }       // |K|
    bool empty() const { return ratings_.empty(); }

    const std::vector<Rating>& ratings() const { return ratings_; }
    RatingScale scale() const { return scale_; }
    const IdMap& users() const { return *users_; }
    const IdMap& items() const { return *items_; }
    std::shared_ptr<const IdMap> users_ptr() const { return users_; }
    std::shared_ptr<const IdMap> items_ptr() const { return items_; }

    /// Items rated by `user` in this dataset, ascending. Throws
    /// std::out_of_range for an invalid index.
    const std::vector<std::int32_t>& items_rated_by(std::int32_t user) const;

    std::int32_t user_degree(std::int32_t user) const;
    std::int32_t item_degree(std::int32_t item) const;

private:
    std::vector<Rating> ratings_;
    std::shared_ptr<const IdMap> users_;
    std::shared_ptr<const IdMap> items_;
    RatingScale scale_;
    std::vector<std::vector<std::int32_t>> by_user_;
    std::vector<std::int32_t> item_degree_;
};

/// How to partition a dataset into train and test halves.
struct SplitSpec {
    double train_fraction = 0.8; // must be strictly inside (0, 1)
    std::uint64_t seed = 0;
};

/// Mean of all ratings. Errors on an empty dataset.
double global_mean(const RatingsDataset& ds);

/// |K| / (m * n).
double density(const RatingsDataset& ds);

/// Seeded uniform split into disjoint train/test halves.
///
/// |train| = round-half-up(fraction * |K|); membership is decided by a
/// Fisher-Yates shuffle driven only by the seed, so identical inputs give
/// byte-identical partitions. Both halves keep the parent id maps and
/// (m, n), and preserve the parent's rating order.
std::pair<RatingsDataset, RatingsDataset> split(const RatingsDataset& ds, const SplitSpec& spec);

} // namespace wsvd

#endif
