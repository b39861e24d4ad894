#include "spanning/stats.hpp"

#include "spanning/csv.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

namespace spanning {
namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Two-sided p-value of a t statistic.
double two_sided_p(double t, double df) {
    if (std::isnan(t)) return 1.0;
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

} // namespace

void AnalysisTable::add_column(std::string name, std::vector<double> values) {
    if (has(name)) throw StatsError("duplicate column '" + name + "'");
    if (!names_.empty() && values.size() != rows_)
        throw StatsError("column '" + name + "' has " + std::to_string(values.size()) + " rows, expected " +
                         std::to_string(rows_));
    rows_ = values.size();
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
}

bool AnalysisTable::has(std::string_view name) const { return contains(names_, name); }

const std::vector<double>& AnalysisTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return columns_[i];
    throw StatsError("unknown column '" + std::string(name) + "'");
}

AnalysisTable AnalysisTable::complete_cases(std::span<const std::string> columns) const {
    std::vector<const std::vector<double>*> cols;
    for (const auto& c : columns) cols.push_back(&column(c));
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < rows_; ++r)
        if (std::none_of(cols.begin(), cols.end(), [r](const auto* c) { return std::isnan((*c)[r]); }))
            keep.push_back(r);

    AnalysisTable out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        std::vector<double> v;
        v.reserve(keep.size());
        for (std::size_t r : keep) v.push_back(columns_[i][r]);
        out.add_column(names_[i], std::move(v));
    }
    out.rows_ = keep.size();
    return out;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StatsError("correlation of columns with different lengths");
    if (x.size() < 3) throw StatsError("correlation needs at least three rows");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw StatsError("correlation with a zero-variance column");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const AnalysisTable& table, std::span<const std::string> columns) {
    const AnalysisTable complete = table.complete_cases(columns);
    const std::size_t n = complete.rows();
    if (n < 3) throw StatsError("correlation needs at least three complete rows");
    for (const auto& c : columns) {
        const auto& v = complete.column(c);
        if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); }))
            throw StatsError("column '" + c + "' has zero variance");
    }

    CorrelationMatrix m;
    m.columns.assign(columns.begin(), columns.end());
    m.n = n;
    const long df = static_cast<long>(n) - 2;
    m.cells.assign(columns.size(), std::vector<Correlation>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
        for (std::size_t j = i; j < columns.size(); ++j) {
            Correlation c;
            c.df = df;
            c.r = i == j ? 1.0 : pearson_r(complete.column(columns[i]), complete.column(columns[j]));
            if (std::fabs(c.r) >= 1.0) {
                c.p = 0.0;
            } else {
                const double t = c.r * std::sqrt(static_cast<double>(df) / (1.0 - c.r * c.r));
                c.p = two_sided_p(t, static_cast<double>(df));
            }
            m.cells[i][j] = c;
            m.cells[j][i] = c;
        }
    }
    return m;
}

void CorrelationMatrix::write_csv(std::ostream& out) const {
    std::vector<std::string> header{"variable"};
    header.insert(header.end(), columns.begin(), columns.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        std::vector<std::string> row{columns[i]};
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (i == j) row.push_back("1");
            else row.push_back(csv::format(j > i ? cells[i][j].r : cells[i][j].p));
        }
        csv::write_row(out, row);
    }
    out << "# df=" << (cells.empty() ? 0 : cells[0][0].df) << "\n# n=" << n << '\n';
}

Centering parse_centering(std::string_view name) {
    if (name == "none") return Centering::None;
    if (name == "mean") return Centering::Mean;
    throw StatsError("unknown centering '" + std::string(name) + "' (expected none or mean)");
}

std::vector<std::string> RegressionSpec::columns() const {
    std::vector<std::string> cols{outcome};
    cols.insert(cols.end(), controls.begin(), controls.end());
    cols.insert(cols.end(), predictors.begin(), predictors.end());
    if (moderator) cols.push_back(*moderator);
    return cols;
}

void RegressionSpec::validate(const AnalysisTable& table) const {
    const auto cols = columns();
    for (const auto& c : cols)
        if (!table.has(c)) throw StatsError("model '" + name + "' references unknown column '" + c + "'");
    std::set<std::string> seen;
    for (std::size_t i = 1; i < cols.size(); ++i)
        if (!seen.insert(cols[i]).second)
            throw StatsError("model '" + name + "' uses column '" + cols[i] + "' more than once");
    if (seen.contains(outcome)) throw StatsError("model '" + name + "' uses its outcome as a regressor");
    if (predictors.empty() && controls.empty()) throw StatsError("model '" + name + "' has no regressors");
}

std::string squared_term(std::string_view predictor) { return std::string(predictor) + "^2"; }

std::string product_term(std::string_view lhs, std::string_view moderator) {
    return std::string(lhs) + "*" + std::string(moderator);
}

Design build_design(const RegressionSpec& spec, const AnalysisTable& table) {
    spec.validate(table);
    const auto n = static_cast<Eigen::Index>(table.rows());

    Design d;
    auto centered = [&](const std::string& name) {
        const auto& raw = table.column(name);
        const double c = spec.centering == Centering::Mean ? mean_of(raw) : 0.0;
        d.centers[name] = c;
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = raw[static_cast<std::size_t>(i)] - c;
        return v;
    };

    std::vector<Eigen::VectorXd> cols;
    cols.push_back(Eigen::VectorXd::Ones(n));
    d.terms.emplace_back(kInterceptTerm);
    for (const auto& c : spec.controls) {
        cols.push_back(Eigen::Map<const Eigen::VectorXd>(table.column(c).data(), n));
        d.terms.push_back(c);
    }
    std::vector<Eigen::VectorXd> linear;
    for (const auto& p : spec.predictors) {
        linear.push_back(centered(p));
        cols.push_back(linear.back());
        d.terms.push_back(p);
        cols.push_back(linear.back().array().square().matrix());
        d.terms.push_back(squared_term(p));
    }
    if (spec.moderator) {
        const Eigen::VectorXd z = centered(*spec.moderator);
        cols.push_back(z);
        d.terms.push_back(*spec.moderator);
        for (std::size_t k = 0; k < spec.predictors.size(); ++k) {
            cols.push_back(linear[k].cwiseProduct(z));
            d.terms.push_back(product_term(spec.predictors[k], *spec.moderator));
            cols.push_back(linear[k].array().square().matrix().cwiseProduct(z));
            d.terms.push_back(product_term(squared_term(spec.predictors[k]), *spec.moderator));
        }
    }

    d.x.resize(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) d.x.col(static_cast<Eigen::Index>(j)) = cols[j];
    return d;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

const Coefficient& RegressionResult::coefficient(std::string_view term) const {
    for (const auto& c : coefficients)
        if (c.term == term) return c;
    throw StatsError("model has no term '" + std::string(term) + "'");
}

void RegressionResult::write_csv(std::ostream& out) const {
    csv::write_row(out, {"term", "coefficient", "std_error", "t", "p", "stars"});
    for (const auto& c : coefficients)
        csv::write_row(out, {c.term, csv::format(c.estimate), csv::format(c.std_error), csv::format(c.t),
                             csv::format(c.p), c.stars});
    out << "# adjusted_r2=" << csv::format(adjusted_r2) << "\n# r2=" << csv::format(r2) << "\n# n=" << n << '\n';
}

RegressionResult ols_fit(const Design& design, std::span<const double> outcome) {
    const Eigen::MatrixXd& x = design.x;
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (static_cast<Eigen::Index>(outcome.size()) != n) throw StatsError("outcome length differs from design rows");
    if (static_cast<Eigen::Index>(design.terms.size()) != p) throw StatsError("design term names do not match columns");
    if (n <= p)
        throw StatsError("need more observations (" + std::to_string(n) + ") than design columns (" +
                         std::to_string(p) + ")");
    const bool has_intercept = !design.terms.empty() && design.terms.front() == kInterceptTerm;

    const Eigen::Map<const Eigen::VectorXd> y(outcome.data(), n);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

    // Equilibrate columns so the rank test is scale free; |R e_j| = |X e_j|.
    const Eigen::VectorXd norms = r.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < p; ++j)
        if (norms[j] == 0.0) throw StatsError("rank-deficient design: term '" + design.terms[static_cast<std::size_t>(j)] + "' is identically zero");
    const Eigen::MatrixXd scaled = r * norms.cwiseInverse().asDiagonal();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    if (sv[p - 1] / sv[0] < kRankTolerance) {
        std::set<std::size_t> involved;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (sv[k] / sv[0] >= kRankTolerance) continue;
            const Eigen::VectorXd null_dir = svd.matrixV().col(k);
            for (Eigen::Index j = 0; j < p; ++j)
                if (std::fabs(null_dir[j]) > 1e-6) involved.insert(static_cast<std::size_t>(j));
        }
        std::string terms;
        for (std::size_t j : involved) terms += (terms.empty() ? "" : ", ") + design.terms[j];
        throw StatsError("rank-deficient design; collinear terms: " + terms);
    }

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * beta;
    const double rss = resid.squaredNorm();
    const long df = static_cast<long>(n - p);
    const double sigma2 = rss / static_cast<double>(df);

    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::VectorXd var = (r_inv * r_inv.transpose()).diagonal() * sigma2;

    RegressionResult res;
    res.n = static_cast<std::size_t>(n);
    res.residual_df = df;
    for (Eigen::Index j = 0; j < p; ++j) {
        Coefficient c;
        c.term = design.terms[static_cast<std::size_t>(j)];
        c.estimate = beta[j];
        c.std_error = std::sqrt(std::max(var[j], 0.0));
        if (c.std_error > 0.0) c.t = c.estimate / c.std_error;
        else c.t = c.estimate == 0.0 ? std::nan("") : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
        c.p = two_sided_p(c.t, static_cast<double>(df));
        c.stars = significance_stars(c.p);
        res.coefficients.push_back(std::move(c));
    }

    const double y_mean = y.mean();
    const double tss = has_intercept ? (y.array() - y_mean).square().sum() : y.squaredNorm();
    res.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    const double k = static_cast<double>(has_intercept ? p - 1 : p);
    const double nd = static_cast<double>(n);
    res.adjusted_r2 = 1.0 - (1.0 - res.r2) * (has_intercept ? nd - 1.0 : nd) / (nd - k - (has_intercept ? 1.0 : 0.0));
    res.residuals.assign(resid.data(), resid.data() + n);
    res.outcome_mean = y_mean;
    res.design_means.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) res.design_means[static_cast<std::size_t>(j)] = x.col(j).mean();
    res.centers = design.centers;
    return res;
}

RegressionResult fit_model(const RegressionSpec& spec, const AnalysisTable& table) {
    spec.validate(table);
    const auto cols = spec.columns();
    const AnalysisTable complete = table.complete_cases(cols);
    const Design design = build_design(spec, complete);
    RegressionResult res = ols_fit(design, complete.column(spec.outcome));
    res.spec = spec;
    for (const auto& c : cols) {
        const auto& v = complete.column(c);
        if (v.empty()) continue;
        res.raw_means[c] = mean_of(v);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        res.raw_ranges[c] = {*lo, *hi};
    }
    return res;
}

double predict(const RegressionResult& result, const std::map<std::string, double>& raw_values) {
    if (!result.spec) throw StatsError("prediction needs a model fitted with fit_model");
    const RegressionSpec& spec = *result.spec;
    std::map<std::string, double> design_mean;
    for (std::size_t j = 0; j < result.coefficients.size(); ++j)
        design_mean[result.coefficients[j].term] = result.design_means[j];

    auto given = [&](const std::string& name) -> std::optional<double> {
        auto it = raw_values.find(name);
        if (it == raw_values.end()) return std::nullopt;
        auto c = result.centers.find(name);
        return it->second - (c == result.centers.end() ? 0.0 : c->second);
    };

    std::map<std::string, double> row;
    row[std::string(kInterceptTerm)] = 1.0;
    for (const auto& c : spec.controls) row[c] = given(c).value_or(design_mean.at(c));
    for (const auto& p : spec.predictors) {
        const auto v = given(p);
        row[p] = v ? *v : design_mean.at(p);
        row[squared_term(p)] = v ? *v * *v : design_mean.at(squared_term(p));
    }
    if (spec.moderator) {
        const std::string& z = *spec.moderator;
        const auto zv = given(z);
        row[z] = zv ? *zv : design_mean.at(z);
        for (const auto& p : spec.predictors) {
            const auto xv = given(p);
            const std::string lin = product_term(p, z);
            const std::string sq = product_term(squared_term(p), z);
            if (!xv && !zv) {
                row[lin] = design_mean.at(lin);
                row[sq] = design_mean.at(sq);
            } else {
                row[lin] = row[p] * row[z];
                row[sq] = row[squared_term(p)] * row[z];
            }
        }
    }

    double y = 0.0;
    for (const auto& c : result.coefficients) y += c.estimate * row.at(c.term);
    return y;
}

std::vector<CurvePoint> predicted_curve(const RegressionResult& result, const std::string& predictor,
                                        std::span<const double> grid, std::span<const double> moderator_levels) {
    if (!result.spec) throw StatsError("curves need a model fitted with fit_model");
    const RegressionSpec& spec = *result.spec;
    if (!contains(spec.predictors, predictor))
        throw StatsError("model '" + spec.name + "' has no predictor '" + predictor + "'");

    std::vector<std::optional<double>> levels;
    if (spec.moderator) {
        if (moderator_levels.empty()) levels.push_back(result.raw_means.at(*spec.moderator));
        for (double l : moderator_levels) levels.push_back(l);
    } else {
        levels.push_back(std::nullopt);
    }

    const auto [lo, hi] = result.raw_ranges.at(predictor);
    std::vector<CurvePoint> out;
    for (const auto& level : levels) {
        for (double g : grid) {
            std::map<std::string, double> values{{predictor, g}};
            if (level) values[*spec.moderator] = *level;
            out.push_back({predictor, g, level, predict(result, values), g < lo || g > hi});
        }
    }
    return out;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points) {
    csv::write_row(out, {"predictor", "predictor_value", "moderator_level", "prediction", "extrapolated"});
    for (const auto& p : points)
        csv::write_row(out, {p.predictor, csv::format(p.predictor_value), csv::format(p.moderator_level),
                             csv::format(p.prediction), p.extrapolated ? "1" : "0"});
}

} // namespace spanning
