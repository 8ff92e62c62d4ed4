#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "test_support.hpp"
#include "wsvd/dataset.hpp"

using test_support::make_dataset;
using test_support::random_dataset;

TEST_CASE("global_mean") {
    SUBCASE("constant ratings") {
        const auto ds = make_dataset(2, 2, {{0, 0, 3.0}, {0, 1, 3.0}, {1, 0, 3.0}});
        CHECK(wsvd::global_mean(ds) == doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("hand sum 6/2") {
        const auto ds = make_dataset(1, 2, {{0, 0, 4.0}, {0, 1, 2.0}});
        CHECK(wsvd::global_mean(ds) == doctest::Approx(3.0).epsilon(1e-15));
    }
    SUBCASE("empty dataset errors") {
        const auto ds = make_dataset(1, 1, {});
        CHECK_THROWS_AS(wsvd::global_mean(ds), wsvd::Error);
    }
    SUBCASE("mean stays within the rating scale") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto ds = random_dataset(6, 7, 20, seed);
            const double mean = wsvd::global_mean(ds);
            CHECK(mean >= ds.scale().min);
            CHECK(mean <= ds.scale().max);
        }
    }
}

TEST_CASE("density") {
    SUBCASE("full 1x1 matrix") {
        const auto ds = make_dataset(1, 1, {{0, 0, 3.0}});
        CHECK(wsvd::density(ds) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("half-full 2x2") {
        const auto ds = make_dataset(2, 2, {{0, 0, 3.0}, {1, 1, 4.0}});
        CHECK(wsvd::density(ds) == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("in (0, 1] for random datasets") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto ds = random_dataset(5, 8, 11, seed);
            const double d = wsvd::density(ds);
            CHECK(d > 0.0);
            CHECK(d <= 1.0);
        }
    }
}

TEST_CASE("dataset invariants") {
    SUBCASE("duplicate pair rejected") {
        CHECK_THROWS_AS(make_dataset(2, 2, {{0, 0, 3.0}, {0, 0, 4.0}}), wsvd::Error);
    }
    SUBCASE("out-of-range index rejected") {
        CHECK_THROWS_AS(make_dataset(2, 2, {{2, 0, 3.0}}), wsvd::Error);
        CHECK_THROWS_AS(make_dataset(2, 2, {{0, 5, 3.0}}), wsvd::Error);
    }
    SUBCASE("rating outside scale rejected") {
        CHECK_THROWS_AS(make_dataset(1, 1, {{0, 0, 9.0}}), wsvd::Error);
    }
}

TEST_CASE("split") {
    SUBCASE("forced counts: 10 ratings at 0.8 -> 8/2") {
        const auto ds = random_dataset(4, 5, 10, 1);
        const auto [train, test] = wsvd::split(ds, {0.8, 7});
        CHECK(train.size() == 8);
        CHECK(test.size() == 2);
    }
    SUBCASE("round-half-up sizing") {
        const auto ds = random_dataset(3, 3, 3, 2);
        const auto [train, test] = wsvd::split(ds, {0.5, 7}); // 1.5 rounds up
        CHECK(train.size() == 2);
        CHECK(test.size() == 1);
    }
    SUBCASE("same seed twice gives identical partitions") {
        const auto ds = random_dataset(8, 9, 40, 3);
        const auto [a_train, a_test] = wsvd::split(ds, {0.8, 99});
        const auto [b_train, b_test] = wsvd::split(ds, {0.8, 99});
        REQUIRE(a_train.size() == b_train.size());
        for (std::size_t i = 0; i < a_train.size(); ++i) {
            CHECK(a_train.ratings()[i].user == b_train.ratings()[i].user);
            CHECK(a_train.ratings()[i].item == b_train.ratings()[i].item);
            CHECK(a_train.ratings()[i].value == b_train.ratings()[i].value);
        }
    }
    SUBCASE("different seeds give different partitions") {
        const auto ds = random_dataset(8, 9, 60, 3);
        const auto [a_train, a_test] = wsvd::split(ds, {0.5, 1});
        const auto [b_train, b_test] = wsvd::split(ds, {0.5, 2});
        auto key = [](const wsvd::Rating& r) { return std::pair(r.user, r.item); };
        bool any_differ = false;
        for (std::size_t i = 0; i < a_train.size(); ++i)
            if (key(a_train.ratings()[i]) != key(b_train.ratings()[i])) any_differ = true;
        CHECK(any_differ);
    }
    SUBCASE("partition property: disjoint union restores the set") {
        const auto ds = random_dataset(10, 12, 70, 4);
        const auto [train, test] = wsvd::split(ds, {0.8, 5});
        CHECK(train.size() + test.size() == ds.size());

        std::set<std::pair<int, int>> seen;
        for (const auto& r : ds.ratings()) seen.emplace(r.user, r.item);
        std::set<std::pair<int, int>> rebuilt;
        for (const auto& r : train.ratings()) CHECK(rebuilt.emplace(r.user, r.item).second);
        for (const auto& r : test.ratings()) CHECK(rebuilt.emplace(r.user, r.item).second);
        CHECK(rebuilt == seen);
    }
    SUBCASE("halves keep parent dimensions and id maps") {
        const auto ds = random_dataset(9, 11, 30, 5);
        const auto [train, test] = wsvd::split(ds, {0.8, 6});
        CHECK(train.user_count() == 9);
        CHECK(train.item_count() == 11);
        CHECK(test.user_count() == 9);
        CHECK(test.item_count() == 11);
        CHECK(&train.users() == &ds.users());
        CHECK(&test.items() == &ds.items());
    }
    SUBCASE("fraction must lie strictly inside (0,1)") {
        const auto ds = random_dataset(3, 3, 5, 6);
        CHECK_THROWS_AS(wsvd::split(ds, {0.0, 1}), wsvd::Error);
        CHECK_THROWS_AS(wsvd::split(ds, {1.0, 1}), wsvd::Error);
        CHECK_THROWS_AS(wsvd::split(ds, {-0.2, 1}), wsvd::Error);
    }
}

TEST_CASE("items_rated_by") {
    const auto ds = make_dataset(3, 5, {{0, 0, 3.0}, {0, 3, 4.0}, {1, 2, 2.0}});
    SUBCASE("hand enumeration") {
        const auto& items = ds.items_rated_by(0);
        REQUIRE(items.size() == 2);
        CHECK(items[0] == 0);
        CHECK(items[1] == 3);
    }
    SUBCASE("user with no ratings gives empty set") { CHECK(ds.items_rated_by(2).empty()); }
    SUBCASE("out-of-range user errors") {
        CHECK_THROWS_AS(ds.items_rated_by(3), std::out_of_range);
        CHECK_THROWS_AS(ds.items_rated_by(-1), std::out_of_range);
    }
    SUBCASE("degrees sum to the rating count") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto rds = random_dataset(7, 9, 25, seed);
            std::size_t total = 0;
            for (std::int32_t u = 0; u < rds.user_count(); ++u)
                total += rds.items_rated_by(u).size();
            CHECK(total == rds.size());
        }
    }
}

TEST_CASE("id maps") {
    const auto ds = make_dataset(2, 2, {{0, 1, 3.0}});
    CHECK(ds.users().find("u0").value() == 0);
    CHECK(ds.users().find("missing") == std::nullopt);
    CHECK(ds.items().raw(1) == "i1");
    CHECK_THROWS_AS(ds.items().raw(9), std::out_of_range);
}
