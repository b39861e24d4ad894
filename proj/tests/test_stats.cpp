#include "oracles.hpp"

#include "spanning/random.hpp"
#include "spanning/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace spanning;

namespace {

AnalysisTable table(std::vector<std::pair<std::string, std::vector<double>>> cols) {
    AnalysisTable t;
    for (auto& [name, values] : cols) t.add_column(name, std::move(values));
    return t;
}

RegressionSpec spec(std::string outcome, std::vector<std::string> predictors, std::optional<std::string> moderator = {},
                    std::vector<std::string> controls = {}) {
    RegressionSpec s;
    s.name = "m";
    s.outcome = std::move(outcome);
    s.predictors = std::move(predictors);
    s.moderator = std::move(moderator);
    s.controls = std::move(controls);
    return s;
}

AnalysisTable planted_quadratic(Rng& rng, std::size_t n, double noise_sd) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform();
        y[i] = -(x[i] - 0.5) * (x[i] - 0.5) + noise_sd * rng.normal();
    }
    return table({{"y", y}, {"x", x}});
}

} // namespace

TEST_CASE("pearson examples") {
    const std::vector<double> x{1, 2, 3, 4, 5}, neg{-1, -2, -3, -4, -5};
    CHECK(pearson_r(x, x) == 1.0);
    CHECK(pearson_r(x, neg) == -1.0);
    CHECK_THROWS_AS(pearson_r(x, std::vector<double>{1, 1, 1, 1, 1}), StatsError);
    CHECK_THROWS_AS(pearson_r(x, std::vector<double>{1, 2}), StatsError);
}

TEST_CASE("pearson matches a high-precision two-pass oracle") {
    Rng rng(50);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(50), y(50);
        for (std::size_t i = 0; i < 50; ++i) {
            x[i] = rng.normal();
            y[i] = 0.3 * x[i] + rng.normal();
        }
        using oracle::HighPrecision;
        HighPrecision mx = 0, my = 0;
        for (std::size_t i = 0; i < 50; ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= 50;
        my /= 50;
        HighPrecision sxy = 0, sxx = 0, syy = 0;
        for (std::size_t i = 0; i < 50; ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        const double want = static_cast<double>(sxy / boost::multiprecision::sqrt(sxx * syy));
        CHECK(oracle::relative_error(pearson_r(x, y), want) <= 1e-12);
        CHECK(pearson_r(x, y) == pearson_r(y, x));
    }
}

TEST_CASE("correlation matrix layout and p-values") {
    Rng rng(4);
    std::vector<double> a(30), b(30), c(30);
    for (std::size_t i = 0; i < 30; ++i) {
        a[i] = rng.normal();
        b[i] = a[i] + 0.5 * rng.normal();
        c[i] = rng.normal();
    }
    b[3] = std::nan("");
    const auto t = table({{"a", a}, {"b", b}, {"c", c}});
    const std::vector<std::string> cols{"a", "b", "c"};
    const auto m = pearson_matrix(t, cols);
    CHECK(m.n == 29);
    CHECK(m.cells[0][1].df == 27);
    CHECK(m.cells[0][1].r == m.cells[1][0].r);
    CHECK(m.cells[0][1].p < 1e-6);
    CHECK(m.cells[0][0].r == 1.0);

    std::ostringstream out;
    m.write_csv(out);
    const std::string csv = out.str();
    CHECK(csv.rfind("variable,a,b,c\n", 0) == 0);
    CHECK(csv.find("# df=27") != std::string::npos);
    CHECK(csv.find("# n=29") != std::string::npos);
    CHECK_THROWS_WITH_AS(pearson_matrix(table({{"a", a}, {"k", std::vector<double>(30, 2.0)}}), std::vector<std::string>{"a", "k"}),
                         doctest::Contains("k"), StatsError);
}

TEST_CASE("design columns for one predictor with a moderator") {
    const auto t = table({{"y", {1, 2, 3}}, {"x", {1, 2, 3}}, {"z", {2, 0, 1}}});
    const auto d = build_design(spec("y", {"x"}, "z"), t);
    CHECK(d.terms == std::vector<std::string>{"(Intercept)", "x", "x^2", "z", "x*z", "x^2*z"});
    for (int i = 0; i < 3; ++i) {
        const double x = t.column("x")[i], z = t.column("z")[i];
        CHECK(d.x(i, 0) == 1.0);
        CHECK(d.x(i, 1) == x);
        CHECK(d.x(i, 2) == x * x);
        CHECK(d.x(i, 3) == z);
        CHECK(d.x(i, 4) == x * z);
        CHECK(d.x(i, 5) == x * x * z);
    }
    CHECK_THROWS_AS(build_design(spec("y", {"nope"}), t), StatsError);
    CHECK_THROWS_AS(spec("y", {"x", "x"}).validate(t), StatsError);
}

TEST_CASE("model 4 analogue has 17 design columns") {
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    for (const char* name : {"y", "a", "b", "c", "c1", "c2", "c3", "z"}) cols.push_back({name, {1, 2, 3}});
    const auto d = build_design(spec("y", {"a", "b", "c"}, "z", {"c1", "c2", "c3"}), table(cols));
    CHECK(d.terms.size() == 17);
    CHECK(d.x.cols() == 17);
}

TEST_CASE("mean centering shifts predictor and moderator only") {
    const auto t = table({{"y", {1, 2, 3, 4}}, {"x", {1, 2, 3, 6}}, {"z", {0, 0, 1, 3}}, {"c", {5, 6, 7, 8}}});
    auto s = spec("y", {"x"}, "z", {"c"});
    s.centering = Centering::Mean;
    const auto d = build_design(s, t);
    CHECK(d.centers.at("x") == 3.0);
    CHECK(d.centers.at("z") == 1.0);
    CHECK_FALSE(d.centers.contains("c"));
    CHECK(d.x(0, 1) == 5.0);  // control untouched
    CHECK(d.x(0, 2) == -2.0);
    CHECK(d.x(0, 3) == 4.0);
}

TEST_CASE("exact line is recovered with adjusted R2 = 1") {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(i * 0.37);
        y.push_back(1 + 2 * x.back());
    }
    Design d;
    d.x.resize(20, 2);
    for (int i = 0; i < 20; ++i) {
        d.x(i, 0) = 1;
        d.x(i, 1) = x[i];
    }
    d.terms = {"(Intercept)", "x"};
    const auto r = ols_fit(d, y);
    CHECK(oracle::relative_error(r.intercept().estimate, 1.0) <= 1e-8);
    CHECK(oracle::relative_error(r.coefficient("x").estimate, 2.0) <= 1e-8);
    CHECK(r.adjusted_r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.n == 20);
    CHECK(r.residual_df == 18);
}

TEST_CASE("planted negative quadratic is detected") {
    Rng rng(10);
    const auto t = planted_quadratic(rng, 10000, 0.1);
    const auto r = fit_model(spec("y", {"x"}), t);
    const auto& sq = r.coefficient("x^2");
    CHECK(sq.estimate < 0);
    CHECK(sq.p < 0.001);
    CHECK(sq.stars == "***");
}

TEST_CASE("coefficients match a high-precision normal-equations oracle") {
    Rng rng(77);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 60, p = 5;
        Design d;
        d.x.resize(n, p);
        std::vector<std::vector<double>> rows(n, std::vector<double>(p));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            rows[i][0] = 1;
            for (std::size_t j = 1; j < p; ++j) rows[i][j] = rng.normal();
            y[i] = rng.normal();
            for (std::size_t j = 0; j < p; ++j) d.x(i, j) = rows[i][j];
        }
        d.terms = {"(Intercept)", "a", "b", "c", "e"};
        const auto r = ols_fit(d, y);
        const auto want = oracle::hp_least_squares(rows, y);
        for (std::size_t j = 0; j < p; ++j) CHECK(oracle::relative_error(r.coefficients[j].estimate, want[j]) <= 1e-8);

        // Residuals are orthogonal to every design column.
        for (std::size_t j = 0; j < p; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += rows[i][j] * r.residuals[i];
            CHECK(std::fabs(s) / n <= 1e-8);
        }
    }
}

TEST_CASE("collinear design is rejected naming the terms") {
    Design d;
    d.x.resize(10, 3);
    std::vector<double> y(10);
    for (int i = 0; i < 10; ++i) {
        d.x(i, 0) = 1;
        d.x(i, 1) = i;
        d.x(i, 2) = i;
        y[i] = i * i;
    }
    d.terms = {"(Intercept)", "a", "b"};
    CHECK_THROWS_WITH_AS(ols_fit(d, y), doctest::Contains("collinear"), StatsError);
    Design tiny;
    tiny.x = Eigen::MatrixXd::Ones(2, 2);
    tiny.terms = {"(Intercept)", "a"};
    CHECK_THROWS_AS(ols_fit(tiny, std::vector<double>{1, 2}), StatsError);
}

TEST_CASE("significance star thresholds") {
    CHECK(significance_stars(0.0005) == "***");
    CHECK(significance_stars(0.001) == "**");
    CHECK(significance_stars(0.049) == "**");
    CHECK(significance_stars(0.05) == "*");
    CHECK(significance_stars(0.099) == "*");
    CHECK(significance_stars(0.1).empty());
}

TEST_CASE("listwise deletion and regression csv") {
    Rng rng(3);
    std::vector<double> x(40), y(40);
    for (int i = 0; i < 40; ++i) {
        x[i] = rng.normal();
        y[i] = 1 + x[i] + 0.1 * rng.normal();
    }
    y[5] = std::nan("");
    const auto r = fit_model(spec("y", {"x"}), table({{"y", y}, {"x", x}}));
    CHECK(r.n == 39);
    std::ostringstream out;
    r.write_csv(out);
    CHECK(out.str().rfind("term,coefficient,std_error,t,p,stars\n(Intercept),", 0) == 0);
    CHECK(out.str().find("# adjusted_r2=") != std::string::npos);
    CHECK(out.str().find("# n=39") != std::string::npos);
}

TEST_CASE("predicted curves") {
    SUBCASE("linear model on grid {0, 1}") {
        std::vector<double> x{0, 1, 2, 3}, y{1, 3.5, 5, 7.5};
        auto s = spec("y", {});
        s.controls = {"x"};
        const auto r = fit_model(s, table({{"y", y}, {"x", x}}));
        CHECK(predict(r, {{"x", 0}}) == doctest::Approx(r.intercept().estimate));
        CHECK(predict(r, {{"x", 1}}) == doctest::Approx(r.intercept().estimate + r.coefficient("x").estimate));
    }
    SUBCASE("interior maximum at the vertex") {
        Rng rng(1);
        const auto r = fit_model(spec("y", {"x"}), planted_quadratic(rng, 2000, 0.05));
        const double b1 = r.coefficient("x").estimate, b2 = r.coefficient("x^2").estimate;
        REQUIRE(b2 < 0);
        const double vertex = -b1 / (2 * b2);
        std::vector<double> grid;
        for (int i = 0; i <= 10000; ++i) grid.push_back(i / 10000.0);
        const auto curve = predicted_curve(r, "x", grid, {});
        std::size_t best = 0;
        for (std::size_t i = 1; i < curve.size(); ++i)
            if (curve[i].prediction > curve[best].prediction) best = i;
        CHECK(std::fabs(curve[best].predictor_value - vertex) <= 1e-4);
        CHECK(best > 0);
        CHECK(best < grid.size() - 1);
    }
    SUBCASE("positive moderation steepens the curve") {
        Rng rng(2);
        std::vector<double> x(500), z(500), y(500);
        for (int i = 0; i < 500; ++i) {
            x[i] = rng.uniform();
            z[i] = 1 + static_cast<double>(rng.below(6));
            y[i] = x[i] + 0.8 * x[i] * z[i] + 0.05 * rng.normal();
        }
        const auto r = fit_model(spec("y", {"x"}, "z"), table({{"y", y}, {"x", x}, {"z", z}}));
        REQUIRE(r.coefficient("x*z").estimate > 0);
        const std::vector<double> grid{0.1, 0.9}, levels{1, 5};
        const auto c = predicted_curve(r, "x", grid, levels);
        REQUIRE(c.size() == 4);
        CHECK(c[3].prediction - c[2].prediction > c[1].prediction - c[0].prediction);
        CHECK(c[0].moderator_level == 1.0);
        CHECK_FALSE(c[0].extrapolated);
        const std::vector<double> wide{-1.0};
        CHECK(predicted_curve(r, "x", wide, levels)[0].extrapolated);
    }
    SUBCASE("fit passes through the design means") {
        Rng rng(3);
        std::vector<double> x(300), z(300), c(300), y(300);
        for (int i = 0; i < 300; ++i) {
            x[i] = rng.normal();
            z[i] = rng.uniform(1, 5);
            c[i] = rng.normal();
            y[i] = x[i] - x[i] * x[i] + c[i] + rng.normal();
        }
        const auto r = fit_model(spec("y", {"x"}, "z", {"c"}), table({{"y", y}, {"x", x}, {"z", z}, {"c", c}}));
        double at_means = 0;
        for (std::size_t j = 0; j < r.coefficients.size(); ++j) at_means += r.coefficients[j].estimate * r.design_means[j];
        CHECK(at_means == doctest::Approx(r.outcome_mean).epsilon(1e-10));
    }
}
