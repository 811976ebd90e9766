#pragma once

#include "fip/arbitrage.hpp"
#include "fip/types.hpp"

#include <optional>
#include <stdexcept>

namespace fip {

/// Whether any portfolio dominates the liabilities, q'C >= Z. Exactly one of
/// portfolio / obstruction is present: the obstruction is a vector v >= 0
/// with C v = 0 and Z . v > 0, proving the super-replication set empty.
struct FeasibilityCertificate {
    bool feasible;
    std::optional<Portfolio> portfolio;
    std::optional<Vector> obstruction;
    std::optional<Index> qualifying_instrument;  // single instrument that dominates alone
};

/// Least-cost super-replication outcome.
struct SuperReplicationResult {
    Portfolio portfolio;
    double cost;            // q'P
    Vector slack;           // q'C - Z, componentwise >= 0 within tolerance
    Vector dual_discount;   // v >= 0 with C v = P and cost = Z . v
    bool possibly_non_unique = false;
    bool rank_deficient = false;  // rank(C) < M: existence hypothesis unverified
};

class InfeasibleLiabilityError : public std::runtime_error {
public:
    explicit InfeasibleLiabilityError(Vector obstruction);
    const Vector& obstruction() const { return obstruction_; }

private:
    Vector obstruction_;
};

class ArbitragePrecludedError : public std::runtime_error {
public:
    explicit ArbitragePrecludedError(ArbitrageVerdict verdict);
    const ArbitrageVerdict& verdict() const { return verdict_; }

private:
    ArbitrageVerdict verdict_;
};

class UnboundedBelowError : public std::runtime_error {
public:
    explicit UnboundedBelowError(Vector ray);
    const Vector& ray() const { return ray_; }

private:
    Vector ray_;
};

/// Portfolio with q'C = Z, when the liabilities lie in the row space of C.
std::optional<Portfolio> replicate_exact(const Market& market, const LiabilitySchedule& liab,
                                         const TolerancePolicy& tol = {});

/// Fast sufficient check: an instrument with nonnegative cash flows whose
/// effective dates coincide with the liability dates (Z_j != 0 iff C_ij > 0).
std::optional<Index> sufficient_instrument(const Market& market, const LiabilitySchedule& liab);

FeasibilityCertificate check_feasibility(const Market& market, const LiabilitySchedule& liab,
                                         const TolerancePolicy& tol = {});

/// min q'P over {q : q'C >= Z}. Requires an arbitrage-free market (throws
/// ArbitragePrecludedError otherwise) and feasible liabilities (throws
/// InfeasibleLiabilityError with the obstruction). A rank-deficient C is
/// flagged, not rejected; should the solve still come back unbounded,
/// UnboundedBelowError carries the ray.
SuperReplicationResult superreplicate(const Market& market, const LiabilitySchedule& liab,
                                      const TolerancePolicy& tol = {});

/// Rolls cash flows between consecutive liability dates forward at face
/// value, as if held in a cash buffer. Columns after the last liability date
/// are unchanged; prices are unchanged.
Market aggregate_buffer(const Market& market, const LiabilitySchedule& liab);

/// Same aggregation, with intermediate flows accumulated at curve-implied
/// forward factors g(x_s)/g(x_{j_k}). Preserves P = C g(x) whenever it held.
Market aggregate_forward(const Market& market, const LiabilitySchedule& liab,
                         const DiscountCurve& curve, const TolerancePolicy& tol = {});

/// Ridge-regularized quadratic hedge: the unique minimizer of
/// |Z - q'C|^2 + lambda |q|^2, via the normal equations (C C' + lambda I) q = C Z'.
Portfolio hedge_quadratic(const Market& market, const LiabilitySchedule& liab, double lambda);

}  // namespace fip
