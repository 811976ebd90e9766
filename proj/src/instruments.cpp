#include "fip/instruments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fip {

CouponBondSpec::CouponBondSpec(double f, std::vector<double> dates, std::vector<double> cs)
    : face(f), coupon_dates(std::move(dates)), coupons(std::move(cs)) {
    if (!(face > 0.0) || !std::isfinite(face)) {
        throw std::invalid_argument("CouponBondSpec: face value must be strictly positive");
    }
    if (coupon_dates.empty() || coupon_dates.size() != coupons.size()) {
        throw std::invalid_argument("CouponBondSpec: one coupon per date required");
    }
    if (coupon_dates.front() <= 0.0) {
        throw std::invalid_argument("CouponBondSpec: coupon dates must be strictly positive");
    }
    for (std::size_t k = 1; k < coupon_dates.size(); ++k) {
        if (!(coupon_dates[k] > coupon_dates[k - 1])) {
            throw std::invalid_argument("CouponBondSpec: coupon dates must be strictly increasing");
        }
    }
    for (double c : coupons) {
        if (!std::isfinite(c)) throw std::invalid_argument("CouponBondSpec: coupons must be finite");
    }
}

Vector bond_row(const CouponBondSpec& spec, const DateGrid& grid, double date_tol) {
    Vector row = Vector::Zero(grid.size());
    for (std::size_t k = 0; k < spec.coupon_dates.size(); ++k) {
        const auto j = grid.find(spec.coupon_dates[k], date_tol);
        if (!j.has_value()) {
            throw std::invalid_argument("bond_row: coupon date " +
                                        std::to_string(spec.coupon_dates[k]) +
                                        " is not on the grid");
        }
        row(*j) = spec.coupons[k];
    }
    row(*grid.find(spec.maturity(), date_tol)) += spec.face;
    return row;
}

SwapUniverseSpec::SwapUniverseSpec(double acc, std::vector<SwapTerms> sw, Vector fixings)
    : accrual(acc), swaps(std::move(sw)), repo_fixings(std::move(fixings)) {
    if (!(accrual > 0.0) || !std::isfinite(accrual)) {
        throw std::invalid_argument("SwapUniverseSpec: accrual period must be strictly positive");
    }
    if (repo_fixings.size() < 1 || !repo_fixings.allFinite()) {
        throw std::invalid_argument("SwapUniverseSpec: at least one finite repo fixing required");
    }
    if (swaps.empty()) {
        throw std::invalid_argument("SwapUniverseSpec: at least one swap required");
    }
    for (const SwapTerms& terms : swaps) {
        if (terms.periods < 1 || terms.periods > repo_fixings.size()) {
            throw std::invalid_argument(
                "SwapUniverseSpec: swap maturity must lie on the fixing grid");
        }
        if (!std::isfinite(terms.fixed_rate)) {
            throw std::invalid_argument("SwapUniverseSpec: fixed rates must be finite");
        }
    }
}

DateGrid SwapUniverseSpec::grid() const {
    Vector dates(date_count());
    for (Index j = 0; j < date_count(); ++j) dates(j) = static_cast<double>(j + 1) * accrual;
    return DateGrid(std::move(dates));
}

SwapRepoMatrices swap_repo_matrices(const SwapUniverseSpec& spec) {
    const Index m = spec.swap_count();
    const Index n = spec.date_count();
    SwapRepoMatrices out{Matrix::Zero(m, n), Matrix::Zero(m, n), Matrix::Zero(m, n)};
    for (Index i = 0; i < m; ++i) {
        const Index maturity = spec.swaps[static_cast<std::size_t>(i)].periods;
        const double fixed = spec.accrual * spec.swaps[static_cast<std::size_t>(i)].fixed_rate;
        for (Index j = 0; j < maturity; ++j) {
            out.fixed_leg(i, j) = fixed;
            out.floating_leg(i, j) = spec.repo_fixings(j);
        }
        out.redemption(i, maturity - 1) = 1.0;
    }
    return out;
}

Market synthetic_market(const SwapUniverseSpec& spec) {
    const SwapRepoMatrices m = swap_repo_matrices(spec);
    return Market(spec.grid(), Vector::Ones(spec.swap_count()), m.fixed_leg + m.redemption);
}

ExecutionLedger execution_schedule(const SwapUniverseSpec& spec, const Portfolio& q) {
    if (q.size() != spec.swap_count()) {
        throw std::invalid_argument("execution_schedule: one position per swap required");
    }
    const SwapRepoMatrices mats = swap_repo_matrices(spec);
    const DateGrid grid = spec.grid();

    ExecutionLedger ledger;
    ledger.initial_repo_investment = q.positions.sum();
    ledger.entries.reserve(static_cast<std::size_t>(spec.date_count()));

    for (Index j = 0; j < spec.date_count(); ++j) {
        LedgerEntry entry{};
        entry.date = grid[j];
        for (Index i = 0; i < spec.swap_count(); ++i) {
            const Index maturity = spec.swaps[static_cast<std::size_t>(i)].periods;
            if (j < maturity) {
                entry.repo_receipt += q.positions(i) * (spec.repo_fixings(j) + 1.0);
            }
            if (j < maturity - 1) {
                entry.repo_reinvest += q.positions(i);
            }
        }
        entry.floating_offset = mats.floating_leg.col(j).dot(q.positions);
        entry.fixed_interest = mats.fixed_leg.col(j).dot(q.positions);
        entry.net = entry.repo_receipt - entry.repo_reinvest - entry.floating_offset +
                    entry.fixed_interest;
        ledger.entries.push_back(entry);
    }
    return ledger;
}

}  // namespace fip
