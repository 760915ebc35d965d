#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "svtime/data.hpp"
#include "svtime/errors.hpp"

using namespace svtime;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/svtime_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("load_csv parses a small file, order-preserving") {
    const auto path = write_temp("small.csv", "date,v\nt0,1.0\nt1,2.0\nt2,3.0\n");
    const SeriesMatrix s = load_csv(path);
    CHECK(s.variates() == 1);
    CHECK(s.length() == 3);
    CHECK(s.values(0, 0) == 1.0);
    CHECK(s.values(0, 1) == 2.0);
    CHECK(s.values(0, 2) == 3.0);
    CHECK(s.variate_names[0] == "v");
    CHECK(s.timestamps[1] == "t1");
}

TEST_CASE("load_csv keeps column order and maps cells exactly") {
    const auto path = write_temp("wide.csv",
                                 "date,a,b,c\nr1,1,10,100\nr2,2,20,200\nr3,3,30,300\n");
    const SeriesMatrix s = load_csv(path);
    CHECK(s.variates() == 3);
    CHECK(s.length() == 3);
    // values[i][t] equals the file's (t+1)-th data row, (i+1)-th numeric column
    CHECK(s.values(1, 2) == 30.0);
    CHECK(s.values(2, 0) == 100.0);
    CHECK(s.variate_names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("load_csv error cases") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_csv("/tmp/svtime_no_such_file.csv"), DataError);
    }
    SUBCASE("non-numeric cell names data row 5, column 3") {
        std::string body = "date,x,y\n";
        for (int r = 1; r <= 6; ++r) {
            if (r == 5)
                body += "t5,1.0,abc\n";
            else
                body += "t" + std::to_string(r) + ",1.0,2.0\n";
        }
        const auto path = write_temp("badcell.csv", body);
        CHECK_THROWS_WITH_AS(load_csv(path),
                             doctest::Contains("data row 5, column 3"), DataError);
    }
    SUBCASE("fewer than 2 data rows") {
        const auto path = write_temp("onerow.csv", "date,v\nt0,1.0\n");
        CHECK_THROWS_AS(load_csv(path), DataError);
    }
    SUBCASE("fewer than 2 columns") {
        const auto path = write_temp("onecol.csv", "date\nt0\nt1\n");
        CHECK_THROWS_AS(load_csv(path), DataError);
    }
    SUBCASE("non-finite value names the variate row") {
        const auto path = write_temp("nan.csv", "date,p,q\nt0,1.0,2.0\nt1,nan,2.0\n");
        CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("variate row 1"), DataError);
    }
}

TEST_CASE("ratio split partitions the series exactly") {
    const SeriesMatrix s = oracles::random_walk_series(2, 100, 7);
    const SplitResult r = split(s, SplitSpec::ratio(0.7, 0.1, 0.2), 4, 2);
    CHECK(r.train.length() == 70);
    CHECK(r.val.length() == 10);
    CHECK(r.test.length() == 20);
    CHECK(r.train.length() + r.val.length() + r.test.length() == s.length());
    // chronological boundaries
    CHECK(r.val.values(0, 0) == s.values(0, 70));
    CHECK(r.test.values(0, 0) == s.values(0, 80));
    // overhang segments extend back by T
    CHECK(r.val_ext.length() == 14);
    CHECK(r.val_overhang == 4);
    CHECK(r.val_ext.values(0, 0) == s.values(0, 66));
}

TEST_CASE("split rejects segments too short for one window") {
    const SeriesMatrix s = oracles::random_walk_series(1, 10, 3);
    CHECK_THROWS_WITH_AS(split(s, SplitSpec::ratio(0.6, 0.2, 0.2), 8, 4),
                         doctest::Contains("too short"), DataError);
}

TEST_CASE("ETT border split matches the benchmark-table window statistic") {
    const SeriesMatrix s = oracles::random_walk_series(1, 17420, 11);
    const SplitResult r = split(s, SplitSpec::ett_border(SamplingFrequency::Hourly), 96, 24);
    CHECK(r.train.length() == 8640);
    CHECK(r.val.length() == 2880);
    CHECK(r.test.length() == 2880);
    CHECK(lookback_window_count(r.train.length(), 96) == 8545);
    CHECK(lookback_window_count(r.val_ext.length(), 96) == 2881);
    CHECK(lookback_window_count(r.test_ext.length(), 96) == 2881);
    CHECK(r.val_ext.values(0, 0) == s.values(0, 8640 - 96));
}

TEST_CASE("15-minute ETT borders") {
    const SeriesMatrix s = oracles::random_walk_series(1, 69680, 13);
    const SplitResult r = split(s, SplitSpec::ett_border(SamplingFrequency::Min15), 512, 96);
    CHECK(r.train.length() == 34560);
    CHECK(r.val.length() == 11520);
    CHECK(r.test.length() == 11520);
}

TEST_CASE("window enumeration") {
    SUBCASE("segment 10, T=4, H=2 -> 5 windows, origins 4..8") {
        const auto origins = window_origins(10, 4, 2);
        REQUIRE(origins.size() == 5);
        CHECK(origins.front() == 4);
        CHECK(origins.back() == 8);
    }
    SUBCASE("segment 6, T=4, H=2 -> single window") {
        CHECK(window_origins(6, 4, 2).size() == 1);
    }
    SUBCASE("segment 5, T=4, H=2 -> error") {
        CHECK_THROWS_AS(window_origins(5, 4, 2), DataError);
    }
    SUBCASE("exhaustive count matches brute force") {
        for (std::size_t len = 3; len <= 30; ++len)
            for (std::size_t t = 1; t <= 6; ++t)
                for (std::size_t h = 1; h <= 4; ++h) {
                    std::size_t brute = 0;
                    for (std::size_t origin = 0; origin + h <= len; ++origin)
                        if (origin >= t) ++brute;
                    CHECK(count_windows(len, t, h) == brute);
                }
    }
}

TEST_CASE("window_at slices lookback and target contiguously") {
    const SeriesMatrix s = oracles::random_walk_series(3, 40, 17);
    const WindowPair w = window_at(s, 10, 6, 3);
    CHECK(w.lookback.rows == 3);
    CHECK(w.lookback.cols == 6);
    CHECK(w.target.cols == 3);
    CHECK(w.lookback(1, 0) == s.values(1, 4));
    CHECK(w.lookback(1, 5) == s.values(1, 9));
    CHECK(w.target(1, 0) == s.values(1, 10)); // first target immediately follows lookback
}

TEST_CASE("normalize matches the closed-form population std") {
    Matrix x(1, 3);
    x(0, 0) = 1;
    x(0, 1) = 2;
    x(0, 2) = 3;
    auto [norm, stats] = normalize(x);
    CHECK(stats.mean[0] == doctest::Approx(2.0));
    CHECK(stats.stddev[0] == doctest::Approx(0.816497).epsilon(1e-5));
    CHECK(norm(0, 0) == doctest::Approx(-1.224745).epsilon(1e-5));
    CHECK(norm(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(norm(0, 2) == doctest::Approx(1.224745).epsilon(1e-5));
}

TEST_CASE("constant rows normalize to zero with the std floor") {
    Matrix x(1, 4, 5.0);
    auto [norm, stats] = normalize(x);
    for (std::size_t t = 0; t < 4; ++t) CHECK(norm(0, t) == 0.0);
    CHECK(stats.stddev[0] == kStdFloor);
}

TEST_CASE("normalize/denormalize round trip within 1e-9 relative error") {
    Rng rng(99);
    Matrix x(4, 24);
    for (double& v : x.v) v = rng.uniform(-50.0, 50.0);
    for (const bool mean_center : {true, false}) {
        auto [norm, stats] = normalize(x, mean_center);
        const Matrix back = denormalize(norm, stats);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double rel = std::fabs(back.v[i] - x.v[i]) /
                               std::max(1.0, std::fabs(x.v[i]));
            CHECK(rel <= 1e-9);
        }
    }
}

TEST_CASE("dataset standardization round trip and train-split fit") {
    const SeriesMatrix s = oracles::random_walk_series(3, 200, 21);
    const Standardization st = fit_standardization(s);
    const SeriesMatrix z = standardize(s, st);
    // standardized train split has ~zero mean / unit variance per variate
    for (std::size_t i = 0; i < 3; ++i) {
        double mean = 0.0;
        for (std::size_t t = 0; t < 200; ++t) mean += z.values(i, t);
        mean /= 200.0;
        CHECK(std::fabs(mean) < 1e-12);
    }
    Matrix rows(3, 5);
    Rng rng(5);
    for (double& v : rows.v) v = rng.uniform(-2.0, 2.0);
    Matrix raw = rows;
    destandardize_rows(raw, st);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t t = 0; t < 5; ++t)
            CHECK(raw(i, t) == doctest::Approx(rows(i, t) * st.stddev[i] + st.mean[i]));
}
