#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "wsvd/eval.hpp"

using test_support::make_dataset;
using wsvd::ModelKind;
using wsvd::ModelParams;

TEST_CASE("rmse") {
    SUBCASE("perfect predictions give zero") {
        const auto ds = make_dataset(2, 2, {{0, 0, 3.0}, {1, 1, 3.0}});
        ModelParams p;
        p.kind = ModelKind::Average;
        p.m = 2;
        p.n = 2;
        p.mean = 3.0;
        CHECK(wsvd::rmse(p, ds, ds) == 0.0);
    }
    SUBCASE("errors +1 and -1 give exactly one") {
        const auto ds = make_dataset(2, 1, {{0, 0, 4.0}, {1, 0, 2.0}});
        ModelParams p;
        p.kind = ModelKind::Average;
        p.m = 2;
        p.n = 1;
        p.mean = 3.0;
        CHECK(wsvd::rmse(p, ds, ds) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("invariant under permutation of the ratings") {
        const auto ds = test_support::random_dataset(6, 7, 20, 8);
        std::vector<std::tuple<int, int, double>> reversed;
        for (auto it = ds.ratings().rbegin(); it != ds.ratings().rend(); ++it)
            reversed.emplace_back(it->user, it->item, it->value);
        const auto flipped = make_dataset(6, 7, reversed);
        const auto p = wsvd::fit_closed_form(ModelKind::Bias, ds);
        CHECK(wsvd::rmse(p, ds, ds) == doctest::Approx(wsvd::rmse(p, ds, flipped)).epsilon(1e-12));
    }
    SUBCASE("unseen test users fall back to the cold prediction") {
        // Train context has only user 0; user 1 appears only in test.
        const auto ctx = make_dataset(2, 2, {{0, 0, 4.0}});
        ModelParams p;
        p.kind = ModelKind::SVD;
        p.m = 2;
        p.n = 2;
        p.k = 1;
        p.mean = 3.0;
        p.user_bias = {0.5, 99.0};    // bias of the unseen user must not leak in
        p.item_bias = {-1.0, 0.0};
        p.user_factors = {2.0, 50.0}; // nor its never-trained factors
        p.item_factors = {3.0, 0.0};
        const auto test_ds = make_dataset(2, 2, {{1, 0, 2.5}});
        // fallback: mean + item bias = 2.0; error 0.5
        CHECK(wsvd::rmse(p, ctx, test_ds) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("empty dataset errors") {
        const auto ds = make_dataset(1, 1, {});
        const auto ctx = make_dataset(1, 1, {{0, 0, 3.0}});
        ModelParams p;
        p.kind = ModelKind::Average;
        p.m = 1;
        p.n = 1;
        CHECK_THROWS_AS(wsvd::rmse(p, ctx, ds), wsvd::Error);
    }
}

TEST_CASE("relative_importance") {
    SUBCASE("already normalized when the minimum magnitude is one") {
        const auto r = wsvd::relative_importance({2.0, -1.0, 4.0});
        CHECK(r == std::vector<double>{2.0, -1.0, 4.0});
    }
    SUBCASE("hand division") {
        const auto r = wsvd::relative_importance({4.0, 2.0});
        CHECK(r == std::vector<double>{2.0, 1.0});
    }
    SUBCASE("exactly one component has magnitude one") {
        wsvd::SeededRng rng(4);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> w(5);
            for (double& x : w) x = rng.normal() + (rng.unit() < 0.5 ? 1.0 : -1.0);
            const auto r = wsvd::relative_importance(w);
            int unit_count = 0;
            for (double v : r)
                if (std::abs(std::abs(v) - 1.0) <= 1e-12) ++unit_count;
            CHECK(unit_count >= 1);
        }
    }
    SUBCASE("scale free") {
        // Positive scaling is invariant; negative scaling flips every sign
        // (the ratio is taken against the minimum magnitude), so magnitudes
        // are scale-free for any nonzero factor.
        const std::vector<double> w = {3.0, -1.5, 0.75, 6.0};
        const auto base = wsvd::relative_importance(w);
        for (double c : {2.0, -0.3, 1e4}) {
            std::vector<double> scaled(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) scaled[i] = c * w[i];
            const auto r = wsvd::relative_importance(scaled);
            for (std::size_t i = 0; i < w.size(); ++i) {
                CHECK(std::abs(r[i]) == doctest::Approx(std::abs(base[i])).epsilon(1e-9));
                if (c > 0) CHECK(r[i] == doctest::Approx(base[i]).epsilon(1e-9));
                else CHECK(r[i] == doctest::Approx(-base[i]).epsilon(1e-9));
            }
        }
    }
    SUBCASE("degenerate weights error instead of exploding") {
        CHECK_THROWS_AS(wsvd::relative_importance({1.0, 0.0, 2.0}), wsvd::Error);
        CHECK_THROWS_AS(wsvd::relative_importance({1.0, 1e-13}), wsvd::Error);
        CHECK_THROWS_AS(wsvd::relative_importance({}), wsvd::Error);
    }
}

TEST_CASE("epoch_seconds_summary") {
    wsvd::TrainReport report;
    SUBCASE("empty report errors") {
        CHECK_THROWS_AS(wsvd::epoch_seconds_summary(report), wsvd::Error);
    }
    SUBCASE("single epoch") {
        report.epochs.push_back({0, 1.0, std::nullopt, 2.0});
        CHECK(wsvd::epoch_seconds_summary(report) == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("hand mean") {
        report.epochs.push_back({0, 1.0, std::nullopt, 1.0});
        report.epochs.push_back({1, 1.0, std::nullopt, 3.0});
        CHECK(wsvd::epoch_seconds_summary(report) == doctest::Approx(2.0).epsilon(1e-15));
    }
}

TEST_CASE("csv emission") {
    SUBCASE("curve with test column") {
        wsvd::TrainReport report;
        report.epochs.push_back({0, 1.5, 1.75, 0.25});
        report.epochs.push_back({1, 1.25, 1.5, 0.5});
        std::ostringstream out;
        wsvd::write_curve_csv(out, report);
        CHECK(out.str() == "epoch,train_rmse,test_rmse,epoch_seconds\n"
                           "0,1.5,1.75,0.25\n"
                           "1,1.25,1.5,0.5\n");
    }
    SUBCASE("curve without test data leaves the column empty") {
        wsvd::TrainReport report;
        report.epochs.push_back({0, 1.5, std::nullopt, 0.25});
        std::ostringstream out;
        wsvd::write_curve_csv(out, report);
        CHECK(out.str() == "epoch,train_rmse,test_rmse,epoch_seconds\n0,1.5,,0.25\n");
    }
    SUBCASE("empty report is header only") {
        std::ostringstream out;
        wsvd::write_curve_csv(out, wsvd::TrainReport{});
        CHECK(out.str() == "epoch,train_rmse,test_rmse,epoch_seconds\n");
    }
    SUBCASE("weight history") {
        wsvd::TrainReport report;
        report.weight_history.push_back({1.0, -2.0});
        report.weight_history.push_back({0.5, -1.5});
        std::ostringstream out;
        wsvd::write_weight_history_csv(out, report);
        CHECK(out.str() == "epoch,w_0,w_1\n0,1,-2\n1,0.5,-1.5\n");
    }
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.063047, 1e-300, 3.141592653589793}) {
        const std::string s = wsvd::format_double(v);
        CHECK(std::stod(s) == v);
    }
}
