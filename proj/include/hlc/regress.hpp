#ifndef HLC_REGRESS_HPP
#define HLC_REGRESS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hlc/error.hpp"
#include "hlc/series.hpp"

namespace hlc::regress {

inline constexpr std::string_view intercept_name = "const";

/// Singular values below this fraction of the largest flag rank deficiency.
inline constexpr double rank_tolerance = 1e-10;

/// Regression sample after listwise deletion. Column 0 is the intercept when present.
struct DesignMatrix {
    std::string response_name;
    Unit response_unit = Unit::dimensionless;
    Eigen::VectorXd response;
    Eigen::MatrixXd regressors;
    std::vector<std::string> names;
    std::vector<QuarterIndex> rows;
    bool has_intercept = true;
};

struct RowRange {
    std::optional<QuarterIndex> first;
    std::optional<QuarterIndex> last;

    bool contains(QuarterIndex q) const { return (!first || q >= *first) && (!last || q <= *last); }
};

/// Collects the rows of `frame` (within `range`) where the response and every
/// regressor are present.
inline DesignMatrix make_design(const Frame& frame, std::string_view response,
                                const std::vector<std::string>& regressors, bool intercept = true,
                                RowRange range = {}) {
    const auto& y = frame.column(response);
    std::vector<const QuarterlySeries*> xs;
    for (const auto& name : regressors) xs.push_back(&frame.column(name));

    DesignMatrix d;
    d.response_name = y.name();
    d.response_unit = y.unit();
    d.has_intercept = intercept;
    if (intercept) d.names.emplace_back(intercept_name);
    d.names.insert(d.names.end(), regressors.begin(), regressors.end());

    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        if (!range.contains(frame.quarter(r)) || !y[r]) continue;
        if (std::all_of(xs.begin(), xs.end(), [r](const QuarterlySeries* x) { return (*x)[r].has_value(); })) {
            keep.push_back(r);
        }
    }
    const auto n = static_cast<Eigen::Index>(keep.size());
    const auto p = static_cast<Eigen::Index>(d.names.size());
    d.response.resize(n);
    d.regressors.resize(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t r = keep[static_cast<std::size_t>(i)];
        d.rows.push_back(frame.quarter(r));
        d.response(i) = *y[r];
        Eigen::Index j = 0;
        if (intercept) d.regressors(i, j++) = 1.0;
        for (const auto* x : xs) d.regressors(i, j++) = *(*x)[r];
    }
    return d;
}

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
};

struct FitResult {
    std::string response_name;
    Unit response_unit = Unit::dimensionless;
    bool has_intercept = true;
    std::vector<Coefficient> coefficients;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double residual_stderr = 0.0;
    double f_statistic = std::numeric_limits<double>::quiet_NaN();
    int n_obs = 0;
    int df_residual = 0;
    std::vector<QuarterIndex> rows;
    QuarterlySeries fitted;
    QuarterlySeries residuals;
    std::vector<std::string> warnings;

    const Coefficient& coefficient(std::string_view name) const {
        for (const auto& c : coefficients) {
            if (c.name == name) return c;
        }
        throw DataError("fit has no coefficient '" + std::string(name) + "'");
    }
    double estimate(std::string_view name) const { return coefficient(name).estimate; }
};

namespace detail {

inline QuarterlySeries scatter(const std::vector<QuarterIndex>& rows, const Eigen::VectorXd& v, std::string name,
                               Unit unit) {
    if (rows.empty()) return QuarterlySeries(std::move(name), unit, QuarterIndex(), {});
    std::vector<Observation> out(static_cast<std::size_t>(rows.back() - rows.front()) + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[static_cast<std::size_t>(rows[i] - rows.front())] = v(static_cast<Eigen::Index>(i));
    }
    return QuarterlySeries(std::move(name), unit, rows.front(), std::move(out));
}

inline std::string join(const std::vector<std::string>& names) {
    std::string s;
    for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
    return s;
}

}  // namespace detail

/// Least squares through a Householder QR of the column-equilibrated design,
/// with classical (homoskedastic) inference statistics.
inline FitResult ols_fit(const DesignMatrix& d) {
    const Eigen::Index n = d.regressors.rows();
    const Eigen::Index p = d.regressors.cols();
    if (p == 0) throw DataError("design for '" + d.response_name + "' has no columns");
    if (n <= p) {
        throw DataError("insufficient data for '" + d.response_name + "': " + std::to_string(n) +
                        " observations for " + std::to_string(p) + " parameters");
    }

    Eigen::VectorXd scale = d.regressors.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(scale(j) > 0.0) || !std::isfinite(scale(j))) {
            throw SingularDesignError("singular design for '" + d.response_name + "': column '" +
                                      d.names[static_cast<std::size_t>(j)] + "' is zero or non-finite");
        }
    }
    const Eigen::MatrixXd xs = d.regressors * scale.cwiseInverse().asDiagonal();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(xs, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(p - 1) < rank_tolerance * sv(0)) {
        std::vector<std::string> involved;
        for (Eigen::Index k = 0; k < p; ++k) {
            if (sv(k) >= rank_tolerance * sv(0)) continue;
            const Eigen::VectorXd v = svd.matrixV().col(k);
            const double vmax = v.cwiseAbs().maxCoeff();
            for (Eigen::Index j = 0; j < p; ++j) {
                const auto& name = d.names[static_cast<std::size_t>(j)];
                if (std::abs(v(j)) > 1e-6 * vmax && std::find(involved.begin(), involved.end(), name) == involved.end()) {
                    involved.push_back(name);
                }
            }
        }
        throw SingularDesignError("singular design for '" + d.response_name + "': collinear columns {" +
                                  detail::join(involved) + "}");
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(xs);
    const Eigen::VectorXd scaled_beta = qr.solve(d.response);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    // diag((Xs'Xs)^-1) = squared row norms of R^-1
    const Eigen::VectorXd unscaled_var = r_inv.rowwise().squaredNorm();

    const Eigen::VectorXd beta = scaled_beta.cwiseQuotient(scale);
    const Eigen::VectorXd fitted = d.regressors * beta;
    const Eigen::VectorXd resid = d.response - fitted;

    FitResult f;
    f.response_name = d.response_name;
    f.response_unit = d.response_unit;
    f.has_intercept = d.has_intercept;
    f.n_obs = static_cast<int>(n);
    f.df_residual = static_cast<int>(n - p);
    f.rows = d.rows;

    const double rss = resid.squaredNorm();
    const double tss = d.has_intercept ? (d.response.array() - d.response.mean()).square().sum()
                                       : d.response.squaredNorm();
    const double df = static_cast<double>(n - p);
    const double sigma2 = rss / df;
    f.residual_stderr = std::sqrt(sigma2);

    for (Eigen::Index j = 0; j < p; ++j) {
        f.coefficients.push_back({d.names[static_cast<std::size_t>(j)], beta(j),
                                  std::sqrt(sigma2 * unscaled_var(j)) / scale(j)});
    }

    if (tss > 0.0) {
        f.r_squared = 1.0 - rss / tss;
    } else {
        f.r_squared = 0.0;
        f.warnings.push_back("response '" + d.response_name + "' is constant over the sample; R^2 set to 0");
    }
    const double k0 = d.has_intercept ? 1.0 : 0.0;
    f.adj_r_squared = 1.0 - (1.0 - f.r_squared) * (static_cast<double>(n) - k0) / df;
    const double model_df = static_cast<double>(p) - k0;
    if (model_df > 0.0 && tss > 0.0) {
        f.f_statistic = ((tss - rss) / model_df) / sigma2;
    }

    f.fitted = detail::scatter(d.rows, fitted, d.response_name, d.response_unit);
    f.residuals = detail::scatter(d.rows, resid, d.response_name, d.response_unit);
    return f;
}

/// Linear prediction over every quarter of `frame`; missing where an input is.
inline QuarterlySeries predict(const FitResult& fit, const Frame& frame) {
    std::vector<const QuarterlySeries*> cols;
    for (const auto& c : fit.coefficients) {
        cols.push_back(c.name == intercept_name ? nullptr : &frame.column(c.name));
    }
    std::vector<Observation> out(frame.rows());
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        double acc = 0.0;
        bool ok = true;
        for (std::size_t j = 0; j < cols.size() && ok; ++j) {
            if (!cols[j]) {
                acc += fit.coefficients[j].estimate;
            } else if (auto v = (*cols[j])[r]) {
                acc += fit.coefficients[j].estimate * *v;
            } else {
                ok = false;
            }
        }
        if (ok) out[r] = acc;
    }
    return QuarterlySeries(fit.response_name, fit.response_unit, frame.start(), std::move(out));
}

// ---------------------------------------------------------------------------
// Error correction model
//
//   dy_t = b0 + sum_j b_j dx_j + gamma * (y_{t-1} - sum_j a_j x_j)
//
// estimated in its unrestricted linear form
//
//   dy_t = b0 + sum_j b_j dx_j + gamma * y_{t-1} + sum_j theta_j x_j
//
// with the long-run coefficients recovered as a_j = -theta_j / gamma.
// ---------------------------------------------------------------------------

struct NamedValue {
    std::string name;
    double value = 0.0;
};

struct EcmFit {
    std::string response_name;
    std::string lagged_response_name;  ///< column holding y_{t-1} in the unrestricted design
    double intercept = 0.0;
    std::vector<NamedValue> short_run;  ///< b_j on the differenced terms
    double gamma = 0.0;
    std::vector<NamedValue> level;      ///< theta_j on the level terms
    std::vector<NamedValue> long_run;   ///< a_j = -theta_j / gamma
    FitResult underlying;
};

inline std::string differenced_name(std::string_view response) { return "d_" + std::string(response); }
inline std::string lagged_level_name(std::string_view response) { return std::string(response) + "_lag1"; }

namespace detail {

inline std::vector<QuarterlySeries> collect(const Frame& f) {
    return {f.columns().begin(), f.columns().end()};
}

inline EcmFit unpack_ecm(FitResult fit, const std::string& response, const std::vector<std::string>& short_names,
                         const std::vector<std::string>& level_names) {
    EcmFit e;
    e.response_name = response;
    e.lagged_response_name = lagged_level_name(response);
    e.intercept = fit.estimate(intercept_name);
    for (const auto& n : short_names) e.short_run.push_back({n, fit.estimate(n)});
    e.gamma = fit.estimate(e.lagged_response_name);
    for (const auto& n : level_names) e.level.push_back({n, fit.estimate(n)});
    if (e.gamma == 0.0) throw DomainError("ECM adjustment coefficient is exactly 0; long-run coefficients undefined");
    if (e.gamma >= 0.0) {
        fit.warnings.push_back("ECM adjustment coefficient gamma = " + std::to_string(e.gamma) +
                               " is not negative; no error correction");
    }
    for (const auto& t : e.level) e.long_run.push_back({t.name, -t.value / e.gamma});
    e.underlying = std::move(fit);
    return e;
}

}  // namespace detail

/// Builds the unrestricted ECM frame: response level, its difference, its
/// first lag, and the supplied short-run and level terms.
inline Frame ecm_frame(const QuarterlySeries& response, const Frame& short_run_terms, const Frame& level_terms) {
    std::vector<QuarterlySeries> cols{response, diff(response).renamed(differenced_name(response.name())),
                                      lag(response, 1).renamed(lagged_level_name(response.name()))};
    for (const auto& c : detail::collect(short_run_terms)) cols.push_back(c);
    for (const auto& c : detail::collect(level_terms)) cols.push_back(c);
    return align(cols);
}

/// Fits the unrestricted ECM by OLS on rows within `range`.
inline EcmFit ecm_fit(const QuarterlySeries& response, const Frame& short_run_terms, const Frame& level_terms,
                      RowRange range = {}) {
    const Frame f = ecm_frame(response, short_run_terms, level_terms);
    const auto short_names = short_run_terms.column_names();
    const auto level_names = level_terms.column_names();
    std::vector<std::string> regressors = short_names;
    regressors.push_back(lagged_level_name(response.name()));
    regressors.insert(regressors.end(), level_names.begin(), level_names.end());
    auto fit = ols_fit(make_design(f, differenced_name(response.name()), regressors, true, range));
    return detail::unpack_ecm(std::move(fit), response.name(), short_names, level_names);
}

/// Predicted change from the restricted form, given the previous level and
/// the current short-run and level term values (ordered as in the fit).
inline double ecm_restricted_delta(const EcmFit& fit, double previous_level, std::span<const double> short_values,
                                   std::span<const double> level_values) {
    double acc = fit.intercept;
    for (std::size_t j = 0; j < fit.short_run.size(); ++j) acc += fit.short_run[j].value * short_values[j];
    double equilibrium = 0.0;
    for (std::size_t j = 0; j < fit.long_run.size(); ++j) equilibrium += fit.long_run[j].value * level_values[j];
    return acc + fit.gamma * (previous_level - equilibrium);
}

namespace detail {

/// Unrestricted dy given y_{t-1}; empty when a term is missing at row r.
inline Observation ecm_delta(const EcmFit& fit, const std::vector<const QuarterlySeries*>& short_cols,
                             const std::vector<const QuarterlySeries*>& level_cols, std::size_t r,
                             double previous_level) {
    double acc = fit.intercept + fit.gamma * previous_level;
    for (std::size_t j = 0; j < short_cols.size(); ++j) {
        auto v = (*short_cols[j])[r];
        if (!v) return std::nullopt;
        acc += fit.short_run[j].value * *v;
    }
    for (std::size_t j = 0; j < level_cols.size(); ++j) {
        auto v = (*level_cols[j])[r];
        if (!v) return std::nullopt;
        acc += fit.level[j].value * *v;
    }
    return acc;
}

}  // namespace detail

/// Restricted-form fitted changes over `frame`, using observed lagged levels.
inline QuarterlySeries ecm_restricted_fitted(const EcmFit& fit, const Frame& frame) {
    const auto& y = frame.column(fit.response_name);
    std::vector<Observation> out(frame.rows());
    std::vector<double> sv(fit.short_run.size()), lv(fit.long_run.size());
    for (std::size_t r = 1; r < frame.rows(); ++r) {
        if (!y[r - 1]) continue;
        bool ok = true;
        for (std::size_t j = 0; j < sv.size() && ok; ++j) {
            auto v = frame.column(fit.short_run[j].name)[r];
            ok = v.has_value();
            if (ok) sv[j] = *v;
        }
        for (std::size_t j = 0; j < lv.size() && ok; ++j) {
            auto v = frame.column(fit.long_run[j].name)[r];
            ok = v.has_value();
            if (ok) lv[j] = *v;
        }
        if (ok) out[r] = ecm_restricted_delta(fit, *y[r - 1], sv, lv);
    }
    return QuarterlySeries(differenced_name(fit.response_name), y.unit(), frame.start(), std::move(out));
}

enum class ForecastMode { static_, dynamic };

/// Level forecasts from `start` to the end of `frame`.
///
/// Static mode adds each predicted change to the observed previous level.
/// Dynamic mode starts from the observed level at start-1 and feeds its own
/// predictions back; once a term is missing the path stops.
inline QuarterlySeries ecm_forecast(const EcmFit& fit, const Frame& frame, QuarterIndex start,
                                    ForecastMode mode = ForecastMode::dynamic) {
    const auto& y = frame.column(fit.response_name);
    std::vector<const QuarterlySeries*> short_cols, level_cols;
    for (const auto& t : fit.short_run) short_cols.push_back(&frame.column(t.name));
    for (const auto& t : fit.level) level_cols.push_back(&frame.column(t.name));

    const auto initial = y.at(start.prev());
    if (!initial) {
        throw DataError("ECM forecast from " + start.to_string() + " needs the observed level at " +
                        start.prev().to_string());
    }
    if (start > frame.last()) return QuarterlySeries(fit.response_name, y.unit(), start, {});

    const auto first = static_cast<std::size_t>(start - frame.start());
    std::vector<Observation> out(frame.rows() - first);
    Observation previous = initial;
    for (std::size_t r = first; r < frame.rows(); ++r) {
        if (mode == ForecastMode::static_) previous = y[r - 1];
        if (!previous) continue;
        auto delta = detail::ecm_delta(fit, short_cols, level_cols, r, *previous);
        Observation level = delta ? Observation(*previous + *delta) : std::nullopt;
        out[r - first] = level;
        if (mode == ForecastMode::dynamic) previous = level;
    }
    return QuarterlySeries(fit.response_name, y.unit(), start, std::move(out));
}

// ---------------------------------------------------------------------------
// Lag scan
// ---------------------------------------------------------------------------

struct LagScanEntry {
    int lag = 0;
    std::optional<double> r_squared;  ///< empty when the lag is unusable
    int n_obs = 0;
    std::string note;
};

struct LagScanResult {
    std::vector<LagScanEntry> entries;
    std::optional<int> best_lag;
};

/// R^2 of a univariate regression (with intercept) of `response` on
/// `candidate` lagged by each k in [lo, hi].
inline LagScanResult lag_scan(const QuarterlySeries& response, const QuarterlySeries& candidate, int lo, int hi) {
    if (lo < 0 || hi < lo) {
        throw DomainError("lag range must satisfy 0 <= lo <= hi, got " + std::to_string(lo) + ".." + std::to_string(hi));
    }
    LagScanResult out;
    std::optional<double> best;
    for (int k = lo; k <= hi; ++k) {
        LagScanEntry e;
        e.lag = k;
        const std::string xname = "x_lag" + std::to_string(k);
        try {
            auto f = align({response.renamed("y"), lag(candidate, k).renamed(xname)});
            auto fit = ols_fit(make_design(f, "y", {xname}));
            e.r_squared = fit.r_squared;
            e.n_obs = fit.n_obs;
            if (!best || fit.r_squared > *best) {
                best = fit.r_squared;
                out.best_lag = k;
            }
        } catch (const DataError& err) {
            e.note = err.what();
        } catch (const SingularDesignError& err) {
            e.note = err.what();
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

}  // namespace hlc::regress

#endif  // HLC_REGRESS_HPP
