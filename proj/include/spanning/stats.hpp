#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spanning {

class StatsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Named numeric columns of equal length. NaN marks a missing cell.
class AnalysisTable {
public:
    void add_column(std::string name, std::vector<double> values);

    bool has(std::string_view name) const;
    // Throws StatsError naming the column when it is absent.
    const std::vector<double>& column(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }
    std::size_t rows() const { return rows_; }

    // Rows with a value in every listed column (listwise deletion).
    AnalysisTable complete_cases(std::span<const std::string> columns) const;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::size_t rows_ = 0;
};

// Two-pass product-moment correlation. Throws StatsError on length mismatch,
// fewer than three rows, or a constant column.
double pearson_r(std::span<const double> x, std::span<const double> y);

struct Correlation {
    double r = 0.0;
    double p = 0.0;
    long df = 0;
};

struct CorrelationMatrix {
    std::vector<std::string> columns;
    std::vector<std::vector<Correlation>> cells;  // symmetric
    std::size_t n = 0;

    // Square CSV: r above the diagonal, p below, 1 on it; df and n as
    // trailing "# key=value" lines.
    void write_csv(std::ostream& out) const;
};

// Pairwise over complete cases of `columns`. p-values from Student's t with
// N - 2 degrees of freedom.
CorrelationMatrix pearson_matrix(const AnalysisTable& table, std::span<const std::string> columns);

enum class Centering { None, Mean };

Centering parse_centering(std::string_view name);

// Each predictor contributes x and x^2. A moderator z adds z, x*z and x^2*z.
struct RegressionSpec {
    std::string name;
    std::string outcome;
    std::vector<std::string> controls;
    std::vector<std::string> predictors;
    std::optional<std::string> moderator;
    Centering centering = Centering::None;

    // Every column the model reads, outcome first.
    std::vector<std::string> columns() const;
    // Throws StatsError for unknown columns or duplicated terms.
    void validate(const AnalysisTable& table) const;
};

struct Design {
    Eigen::MatrixXd x;
    std::vector<std::string> terms;  // "(Intercept)", controls, "x", "x^2", ..., "z", "x*z", "x^2*z", ...
    std::map<std::string, double> centers;  // subtracted from predictors/moderator before forming terms
};

inline constexpr std::string_view kInterceptTerm = "(Intercept)";
std::string squared_term(std::string_view predictor);
std::string product_term(std::string_view lhs, std::string_view moderator);

// Column order: intercept, controls, (x, x^2) per predictor, moderator,
// (x*z, x^2*z) per predictor.
Design build_design(const RegressionSpec& spec, const AnalysisTable& table);

struct Coefficient {
    std::string term;
    double estimate = 0.0;
    double std_error = 0.0;
    double t = 0.0;
    double p = 0.0;
    std::string stars;
};

// Significance marks: *** p < 0.001, ** p < 0.05, * p < 0.1.
std::string significance_stars(double p);

struct RegressionResult {
    std::vector<Coefficient> coefficients;  // design order, intercept first
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    std::size_t n = 0;
    long residual_df = 0;
    std::vector<double> residuals;

    // Filled by fit_model for prediction.
    std::optional<RegressionSpec> spec;
    std::vector<double> design_means;
    std::map<std::string, double> centers;
    std::map<std::string, double> raw_means;
    std::map<std::string, std::pair<double, double>> raw_ranges;
    double outcome_mean = 0.0;

    const Coefficient& coefficient(std::string_view term) const;
    const Coefficient& intercept() const { return coefficients.front(); }

    // term,coefficient,std_error,t,p,stars rows followed by
    // "# adjusted_r2=", "# r2=" and "# n=" footer lines.
    void write_csv(std::ostream& out) const;
};

// Least squares via Householder QR. The intercept, when present, must be the
// first design column. Throws StatsError when N <= columns or when the
// column-equilibrated design has condition ratio below 1e-10, naming the
// collinear terms.
RegressionResult ols_fit(const Design& design, std::span<const double> outcome);

inline constexpr double kRankTolerance = 1e-10;

// Listwise deletion, design construction and fit, keeping what prediction needs.
RegressionResult fit_model(const RegressionSpec& spec, const AnalysisTable& table);

// Prediction from raw (uncentered) values. Columns not given are held at
// their sample means; products involving the moderator use the given level.
double predict(const RegressionResult& result, const std::map<std::string, double>& raw_values);

struct CurvePoint {
    std::string predictor;
    double predictor_value = 0.0;
    std::optional<double> moderator_level;
    double prediction = 0.0;
    bool extrapolated = false;
};

// Long-format curve over `grid` for each moderator level (or a single curve
// when the model has no moderator). Grid values outside the observed
// predictor range are flagged.
std::vector<CurvePoint> predicted_curve(const RegressionResult& result, const std::string& predictor,
                                        std::span<const double> grid, std::span<const double> moderator_levels);

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points);

} // namespace spanning
