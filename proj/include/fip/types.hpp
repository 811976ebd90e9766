#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>

namespace fip {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Floating-point comparison policy shared by every check in the library.
///
/// The statements being certified are exact-arithmetic statements; each
/// inequality is evaluated relative to the max-norm of the data involved,
/// using these thresholds.
struct TolerancePolicy {
    double feas_tol = 1e-9;    ///< relative feasibility tolerance
    double strict_tol = 1e-9;  ///< strict-positivity threshold
    double rank_tol = 1e-10;   ///< singular-value cutoff, relative to the largest

    void validate() const;
};

/// Strictly increasing cash-flow dates 0 < x_1 < ... < x_N, in year fractions.
class DateGrid {
public:
    explicit DateGrid(Vector dates);

    Index size() const { return dates_.size(); }
    double operator[](Index j) const { return dates_(j); }
    const Vector& dates() const { return dates_; }
    double horizon() const { return dates_(dates_.size() - 1); }

    /// Index of the grid date matching t within date_tol, if any.
    std::optional<Index> find(double t, double date_tol = 1e-9) const;

    bool operator==(const DateGrid& other) const;

private:
    Vector dates_;
};

/// Observed price system: M instruments, their prices, and an M x N matrix of
/// cash flows on a common date grid. Instruments with an all-zero row are
/// legitimate and retained.
struct Market {
    Market(DateGrid grid, Vector prices, Matrix cashflows);

    DateGrid grid;
    Vector prices;     // length M
    Matrix cashflows;  // M x N

    Index instrument_count() const { return prices.size(); }
    Index date_count() const { return grid.size(); }
};

/// Position vector over a market's instruments; short positions allowed.
struct Portfolio {
    explicit Portfolio(Vector p);

    Vector positions;

    Index size() const { return positions.size(); }
};

/// Piecewise-linear discount curve anchored at g(0) = 1, with exponential
/// long-end decay beyond the last knot:
///
///   g(t) = linear interpolation of the knots      for t in [0, x_N],
///   g(t) = exp(-long_end_yield * (t - x_N)) g(x_N) for t > x_N.
///
/// Knot values other than the anchor may be any finite reals; curves arising
/// from price fitting can be signed.
class DiscountCurve {
public:
    DiscountCurve(Vector knot_times, Vector knot_values, double long_end_yield = 0.0);

    /// Builds a curve from values on a date grid, prepending the t=0 anchor.
    static DiscountCurve from_grid_values(const DateGrid& grid, const Vector& values,
                                          double long_end_yield = 0.0);

    double operator()(double t) const;

    const Vector& knot_times() const { return knot_times_; }
    const Vector& knot_values() const { return knot_values_; }
    double long_end_yield() const { return long_end_yield_; }

    /// True when every knot value exceeds the threshold.
    bool strictly_positive(double threshold = 0.0) const;

private:
    Vector knot_times_;
    Vector knot_values_;
    double long_end_yield_;
};

/// Expected liability cash flows on the market's grid. No sign restriction:
/// negative entries are asset-like inflows.
struct LiabilitySchedule {
    LiabilitySchedule(DateGrid grid, Vector amounts);

    DateGrid grid;
    Vector amounts;  // length N
};

double curve_eval(const DiscountCurve& curve, double t);
Vector curve_vector(const DiscountCurve& curve, const DateGrid& grid);

double portfolio_price(const Market& market, const Portfolio& q);
Vector portfolio_cashflows(const Market& market, const Portfolio& q);

}  // namespace fip
