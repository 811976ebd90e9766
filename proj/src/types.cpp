#include "fip/types.hpp"

#include <algorithm>
#include <cmath>

namespace fip {

void TolerancePolicy::validate() const {
    if (!(feas_tol > 0.0) || !(strict_tol > 0.0) || !(rank_tol > 0.0)) {
        throw std::invalid_argument("TolerancePolicy: all tolerances must be strictly positive");
    }
}

DateGrid::DateGrid(Vector dates) : dates_(std::move(dates)) {
    if (dates_.size() < 1) {
        throw std::invalid_argument("DateGrid: at least one date required");
    }
    if (!dates_.allFinite()) {
        throw std::invalid_argument("DateGrid: dates must be finite");
    }
    if (dates_(0) <= 0.0) {
        throw std::invalid_argument("DateGrid: dates must be strictly positive");
    }
    for (Index j = 1; j < dates_.size(); ++j) {
        if (!(dates_(j) > dates_(j - 1))) {
            throw std::invalid_argument(
                "DateGrid: dates must be strictly increasing (duplicates rejected)");
        }
    }
}

std::optional<Index> DateGrid::find(double t, double date_tol) const {
    for (Index j = 0; j < dates_.size(); ++j) {
        if (std::abs(dates_(j) - t) <= date_tol) return j;
    }
    return std::nullopt;
}

bool DateGrid::operator==(const DateGrid& other) const {
    return dates_.size() == other.dates_.size() && dates_ == other.dates_;
}

Market::Market(DateGrid g, Vector p, Matrix c)
    : grid(std::move(g)), prices(std::move(p)), cashflows(std::move(c)) {
    if (prices.size() < 1) {
        throw std::invalid_argument("Market: at least one instrument required");
    }
    if (cashflows.rows() != prices.size() || cashflows.cols() != grid.size()) {
        throw std::invalid_argument("Market: cash-flow matrix must be M x N");
    }
    if (!prices.allFinite() || !cashflows.allFinite()) {
        throw std::invalid_argument("Market: prices and cash flows must be finite");
    }
}

Portfolio::Portfolio(Vector p) : positions(std::move(p)) {
    if (!positions.allFinite()) {
        throw std::invalid_argument("Portfolio: positions must be finite");
    }
}

DiscountCurve::DiscountCurve(Vector knot_times, Vector knot_values, double long_end_yield)
    : knot_times_(std::move(knot_times)),
      knot_values_(std::move(knot_values)),
      long_end_yield_(long_end_yield) {
    if (knot_times_.size() < 1 || knot_times_.size() != knot_values_.size()) {
        throw std::invalid_argument("DiscountCurve: knot times and values must match, size >= 1");
    }
    if (knot_times_(0) != 0.0) {
        throw std::invalid_argument("DiscountCurve: first knot time must be 0");
    }
    if (knot_values_(0) != 1.0) {
        throw std::invalid_argument("DiscountCurve: anchor value g(0) must be 1");
    }
    for (Index j = 1; j < knot_times_.size(); ++j) {
        if (!(knot_times_(j) > knot_times_(j - 1))) {
            throw std::invalid_argument("DiscountCurve: knot times must be strictly increasing");
        }
    }
    if (!knot_values_.allFinite()) {
        throw std::invalid_argument("DiscountCurve: knot values must be finite");
    }
    if (!(long_end_yield_ >= 0.0) || !std::isfinite(long_end_yield_)) {
        throw std::invalid_argument("DiscountCurve: long-end yield must be nonnegative");
    }
}

DiscountCurve DiscountCurve::from_grid_values(const DateGrid& grid, const Vector& values,
                                              double long_end_yield) {
    if (values.size() != grid.size()) {
        throw std::invalid_argument("DiscountCurve: one value per grid date required");
    }
    Vector times(grid.size() + 1);
    Vector vals(grid.size() + 1);
    times(0) = 0.0;
    vals(0) = 1.0;
    times.tail(grid.size()) = grid.dates();
    vals.tail(grid.size()) = values;
    return DiscountCurve(std::move(times), std::move(vals), long_end_yield);
}

double DiscountCurve::operator()(double t) const {
    if (!(t >= 0.0)) {
        throw std::domain_error("DiscountCurve: evaluation requires t >= 0");
    }
    const Index n = knot_times_.size();
    const double last_time = knot_times_(n - 1);
    if (t >= last_time) {
        return std::exp(-long_end_yield_ * (t - last_time)) * knot_values_(n - 1);
    }
    // locate the segment [t_i, t_{i+1}) containing t
    const double* begin = knot_times_.data();
    const double* pos = std::upper_bound(begin, begin + n, t);
    const Index i = static_cast<Index>(pos - begin) - 1;
    const double w = (t - knot_times_(i)) / (knot_times_(i + 1) - knot_times_(i));
    return knot_values_(i) + w * (knot_values_(i + 1) - knot_values_(i));
}

bool DiscountCurve::strictly_positive(double threshold) const {
    return (knot_values_.array() > threshold).all();
}

double curve_eval(const DiscountCurve& curve, double t) { return curve(t); }

Vector curve_vector(const DiscountCurve& curve, const DateGrid& grid) {
    Vector out(grid.size());
    for (Index j = 0; j < grid.size(); ++j) out(j) = curve(grid[j]);
    return out;
}

LiabilitySchedule::LiabilitySchedule(DateGrid g, Vector a)
    : grid(std::move(g)), amounts(std::move(a)) {
    if (amounts.size() != grid.size()) {
        throw std::invalid_argument("LiabilitySchedule: one amount per grid date required");
    }
    if (!amounts.allFinite()) {
        throw std::invalid_argument("LiabilitySchedule: amounts must be finite");
    }
}

double portfolio_price(const Market& market, const Portfolio& q) {
    if (q.size() != market.instrument_count()) {
        throw std::invalid_argument("portfolio_price: position count must match instruments");
    }
    return q.positions.dot(market.prices);
}

Vector portfolio_cashflows(const Market& market, const Portfolio& q) {
    if (q.size() != market.instrument_count()) {
        throw std::invalid_argument("portfolio_cashflows: position count must match instruments");
    }
    return market.cashflows.transpose() * q.positions;
}

}  // namespace fip
