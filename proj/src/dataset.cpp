#include "wsvd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wsvd/rng.hpp"

namespace wsvd {

std::int32_t IdMap::intern(const std::string& raw) {
    auto it = to_dense_.find(raw);
    if (it != to_dense_.end()) return it->second;
    const auto dense = static_cast<std::int32_t>(to_raw_.size());
    to_dense_.emplace(raw, dense);
    to_raw_.push_back(raw);
    return dense;
}

std::optional<std::int32_t> IdMap::find(const std::string& raw) const {
    auto it = to_dense_.find(raw);
    if (it == to_dense_.end()) return std::nullopt;
    return it->second;
}

const std::string& IdMap::raw(std::int32_t dense) const {
    if (dense < 0 || dense >= size())
        throw std::out_of_range("IdMap: dense index " + std::to_string(dense) + " out of range");
    return to_raw_[static_cast<std::size_t>(dense)];
}

RatingsDataset::RatingsDataset(std::vector<Rating> ratings,
                               std::shared_ptr<const IdMap> users,
                               std::shared_ptr<const IdMap> items,
                               RatingScale scale)
    : ratings_(std::move(ratings)),
      users_(std::move(users)),
      items_(std::move(items)),
      scale_(scale) {
    if (!users_ || !items_) throw Error("RatingsDataset: null id map");
    if (!(scale_.min <= scale_.max)) throw Error("RatingsDataset: invalid rating scale");

    const std::int32_t m = users_->size();
    const std::int32_t n = items_->size();
    by_user_.resize(static_cast<std::size_t>(m));
    item_degree_.assign(static_cast<std::size_t>(n), 0);

    std::vector<std::uint64_t> keys;
    keys.reserve(ratings_.size());
    for (const Rating& r : ratings_) {
        if (r.user < 0 || r.user >= m)
            throw Error("RatingsDataset: user index " + std::to_string(r.user) + " out of range");
        if (r.item < 0 || r.item >= n)
            throw Error("RatingsDataset: item index " + std::to_string(r.item) + " out of range");
        if (!(r.value >= scale_.min && r.value <= scale_.max))
            throw Error("RatingsDataset: rating " + std::to_string(r.value) + " outside scale [" +
                        std::to_string(scale_.min) + ", " + std::to_string(scale_.max) + "]");
        keys.push_back((std::uint64_t(std::uint32_t(r.user)) << 32) | std::uint32_t(r.item));
        by_user_[static_cast<std::size_t>(r.user)].push_back(r.item);
        ++item_degree_[static_cast<std::size_t>(r.item)];
    }

    std::sort(keys.begin(), keys.end());
    const auto dup = std::adjacent_find(keys.begin(), keys.end());
    if (dup != keys.end()) {
        const auto user = std::int32_t(*dup >> 32);
        const auto item = std::int32_t(*dup & 0xffffffffu);
        throw Error("RatingsDataset: duplicate (user, item) pair (" + users_->raw(user) + ", " +
                    items_->raw(item) + ")");
    }

    for (auto& items_of_user : by_user_)
        std::sort(items_of_user.begin(), items_of_user.end());
}

const std::vector<std::int32_t>& RatingsDataset::items_rated_by(std::int32_t user) const {
    if (user < 0 || user >= user_count())
        throw std::out_of_range("items_rated_by: user index " + std::to_string(user) + " out of range");
    return by_user_[static_cast<std::size_t>(user)];
}

std::int32_t RatingsDataset::user_degree(std::int32_t user) const {
    return static_cast<std::int32_t>(items_rated_by(user).size());
}

std::int32_t RatingsDataset::item_degree(std::int32_t item) const {
    if (item < 0 || item >= item_count())
        throw std::out_of_range("item_degree: item index " + std::to_string(item) + " out of range");
    return item_degree_[static_cast<std::size_t>(item)];
}

double global_mean(const RatingsDataset& ds) {
    if (ds.empty()) throw Error("global_mean: dataset has no ratings");
    double sum = 0.0;
    for (const Rating& r : ds.ratings()) sum += r.value;
    return sum / double(ds.size());
}

double density(const RatingsDataset& ds) {
    const double cells = double(ds.user_count()) * double(ds.item_count());
    if (cells <= 0.0) throw Error("density: dataset has no users or items");
    return double(ds.size()) / cells;
}

std::pair<RatingsDataset, RatingsDataset> split(const RatingsDataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error("split: train fraction must lie strictly inside (0, 1)");
    if (ds.empty()) throw Error("split: dataset has no ratings");

    const std::size_t total = ds.size();
    const auto n_train =
        static_cast<std::size_t>(std::floor(spec.train_fraction * double(total) + 0.5));

    std::vector<std::uint32_t> order(total);
    for (std::size_t i = 0; i < total; ++i) order[i] = static_cast<std::uint32_t>(i);
    SeededRng rng(spec.seed);
    for (std::size_t i = total - 1; i > 0; --i)
        std::swap(order[i], order[rng.below(i + 1)]);

    std::vector<char> in_train(total, 0);
    for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = 1;

    // Each half keeps the parent's rating order, so "fixed file order"
    // training on a split half still means file order.
    std::vector<Rating> train_ratings, test_ratings;
    train_ratings.reserve(n_train);
    test_ratings.reserve(total - n_train);
    for (std::size_t i = 0; i < total; ++i)
        (in_train[i] ? train_ratings : test_ratings).push_back(ds.ratings()[i]);

    RatingsDataset train(std::move(train_ratings), ds.users_ptr(), ds.items_ptr(), ds.scale());
    RatingsDataset test(std::move(test_ratings), ds.users_ptr(), ds.items_ptr(), ds.scale());
    return {std::move(train), std::move(test)};
}

} // namespace wsvd
