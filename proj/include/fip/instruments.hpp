#pragma once

#include "fip/types.hpp"

#include <vector>

namespace fip {

/// Fixed-coupon bond: coupons c_k at dates T_1 < ... < T_n, face value added
/// at the final date (the maturity).
struct CouponBondSpec {
    CouponBondSpec(double face, std::vector<double> coupon_dates, std::vector<double> coupons);

    double face;
    std::vector<double> coupon_dates;
    std::vector<double> coupons;

    double maturity() const { return coupon_dates.back(); }
};

/// Cash-flow row of the bond on the given grid: coupon at each coupon date,
/// coupon plus face at maturity, zero elsewhere. Every coupon date must match
/// a grid date within date_tol.
Vector bond_row(const CouponBondSpec& spec, const DateGrid& grid, double date_tol = 1e-9);

struct SwapTerms {
    int periods;       // maturity in accrual periods
    double fixed_rate;
};

/// Universe of overnight-indexed receiver swaps financed by a rolled repo
/// investment. Floating payment dates and repo roll dates coincide with the
/// grid {accrual, 2 accrual, ..., N accrual}; the fixings define N.
struct SwapUniverseSpec {
    SwapUniverseSpec(double accrual, std::vector<SwapTerms> swaps, Vector repo_fixings);

    double accrual;               // years per period
    std::vector<SwapTerms> swaps;
    Vector repo_fixings;          // one floating rate per grid date

    Index swap_count() const { return static_cast<Index>(swaps.size()); }
    Index date_count() const { return repo_fixings.size(); }
    DateGrid grid() const;
};

/// The three payment matrices of the swap-repo construction, all M x N:
/// fixed_leg holds the fixed swap payments (accrual * rate while the swap is
/// live), floating_leg the floating payments (the fixing while live), and
/// redemption a single unit entry per row at the swap's maturity date.
struct SwapRepoMatrices {
    Matrix fixed_leg;     // S
    Matrix floating_leg;  // Xi
    Matrix redemption;    // F
};

SwapRepoMatrices swap_repo_matrices(const SwapUniverseSpec& spec);

/// The synthetic coupon-bond market: cash flows fixed_leg + redemption (the
/// floating legs cancel against the repo), every price equal to 1.
Market synthetic_market(const SwapUniverseSpec& spec);

/// Per-date cash movements when running the swap-repo strategy for a
/// portfolio q of swaps.
struct LedgerEntry {
    double date;
    double repo_receipt;     // floating interest plus notional returned by live repos
    double repo_reinvest;    // notional rolled into the next period
    double floating_offset;  // floating legs owed on the swaps
    double fixed_interest;   // fixed legs received
    double net;              // repo_receipt - repo_reinvest - floating_offset + fixed_interest
};

struct ExecutionLedger {
    double initial_repo_investment;  // total notional invested at inception (swaps cost zero)
    std::vector<LedgerEntry> entries;
};

/// The dated execution schedule of the strategy. Per-date nets equal the
/// portfolio cash flows in the synthetic market.
ExecutionLedger execution_schedule(const SwapUniverseSpec& spec, const Portfolio& q);

}  // namespace fip
