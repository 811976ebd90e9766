#pragma once

#include "fip/types.hpp"

#include <optional>

namespace fip {

enum class ArbitrageLevel {
    LawOfOnePriceFails,
    StrictArbitrage,
    Arbitrage,
    ArbitrageFree,
};

const char* to_string(ArbitrageLevel level);

/// Outcome of the full arbitrage check. Exactly one level applies.
///
/// ArbitrageFree carries a strictly positive witness curve. The arbitrage
/// levels carry a violating portfolio normalized to unit max-norm; for level
/// Arbitrage a nonnegative (but not strictly positive) curve is attached when
/// one exists. non_unique flags a discount vector that is not unique because
/// rank(C) < N.
struct ArbitrageVerdict {
    ArbitrageLevel level;
    std::optional<DiscountCurve> witness_curve;
    std::optional<Portfolio> violating_portfolio;
    bool non_unique = false;
};

/// Either a (possibly signed) discount curve reproducing P = C g(x), or a
/// portfolio with q'C = 0 and q'P != 0.
struct LawOfOnePriceResult {
    bool holds;
    std::optional<DiscountCurve> curve;
    std::optional<Portfolio> portfolio;
    bool non_unique = false;
};

/// Either a nonnegative discount curve reproducing all prices, or a strict
/// arbitrage: a portfolio with q'P < 0 and q'C >= 0.
struct StrictArbitrageCheck {
    std::optional<DiscountCurve> curve;
    std::optional<Portfolio> portfolio;
    bool non_unique = false;

    bool strict_arbitrage_found() const { return portfolio.has_value(); }
};

LawOfOnePriceResult check_law_of_one_price(const Market& market, const TolerancePolicy& tol = {});

StrictArbitrageCheck check_strict_arbitrage(const Market& market, const TolerancePolicy& tol = {});

/// Full classification. Diagnoses the weakest failed level first: a law-of-
/// one-price failure preempts the arbitrage searches, a strict arbitrage
/// preempts the plain one. ArbitrageFree means a strictly positive discount
/// vector was found by maximizing the minimum discount component.
ArbitrageVerdict check_arbitrage(const Market& market, const TolerancePolicy& tol = {});

}  // namespace fip
