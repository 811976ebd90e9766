#include "fip/arbitrage.hpp"

#include "fip/lp.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace fip {

namespace {

Vector normalized_max_norm(Vector v) {
    const double norm = v.cwiseAbs().maxCoeff();
    if (norm > 0.0) v /= norm;
    return v;
}

bool rank_deficient_columns(const Matrix& c, const TolerancePolicy& tol) {
    Eigen::JacobiSVD<Matrix> svd(c);
    svd.setThreshold(tol.rank_tol);
    return svd.rank() < c.cols();
}

// Feasibility of {C v = P, v >= 0}. Feasible: the nonnegative discount
// vector; infeasible: the Farkas multipliers y with y'C <= 0 and y'P > 0,
// whose negation is a strict arbitrage.
lp::LpOutcome solve_nonnegative_discount(const Market& market, const TolerancePolicy& tol) {
    lp::LpProblem problem;
    problem.objective = Vector::Zero(market.date_count());
    problem.eq_lhs = market.cashflows;
    problem.eq_rhs = market.prices;
    return lp::solve(problem, tol);
}

// max t subject to C v = P, v - t 1 >= 0, v >= 0, t >= 0: the strictly
// positive witness search. Variables are [v; t].
lp::LpOutcome solve_max_min_discount(const Market& market, const TolerancePolicy& tol) {
    const Index n = market.date_count();
    lp::LpProblem problem;
    problem.objective = Vector::Zero(n + 1);
    problem.objective(n) = -1.0;
    problem.eq_lhs = Matrix::Zero(market.instrument_count(), n + 1);
    problem.eq_lhs.leftCols(n) = market.cashflows;
    problem.eq_rhs = market.prices;
    problem.ineq_lhs = Matrix::Zero(n, n + 1);
    problem.ineq_lhs.leftCols(n) = Matrix::Identity(n, n);
    problem.ineq_lhs.col(n) = -Vector::Ones(n);
    problem.ineq_rhs = Vector::Zero(n);
    return lp::solve(problem, tol);
}

}  // namespace

const char* to_string(ArbitrageLevel level) {
    switch (level) {
        case ArbitrageLevel::LawOfOnePriceFails: return "LawOfOnePriceFails";
        case ArbitrageLevel::StrictArbitrage: return "StrictArbitrage";
        case ArbitrageLevel::Arbitrage: return "Arbitrage";
        case ArbitrageLevel::ArbitrageFree: return "ArbitrageFree";
    }
    return "unknown";
}

LawOfOnePriceResult check_law_of_one_price(const Market& market, const TolerancePolicy& tol) {
    tol.validate();
    // Least squares of P against the column space of C; the residual is
    // orthogonal to it, so a significant residual is itself the violating
    // portfolio: q'C = 0 and q'P = |q|^2 > 0.
    Eigen::JacobiSVD<Matrix> svd(market.cashflows, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol.rank_tol);
    const Vector v = svd.solve(market.prices);
    const Vector residual = market.prices - market.cashflows * v;
    const double price_scale = market.prices.cwiseAbs().maxCoeff();

    LawOfOnePriceResult result;
    if (residual.cwiseAbs().maxCoeff() <= tol.feas_tol * price_scale) {
        result.holds = true;
        result.curve = DiscountCurve::from_grid_values(market.grid, v);
        result.non_unique = rank_deficient_columns(market.cashflows, tol);
    } else {
        result.holds = false;
        result.portfolio = Portfolio(normalized_max_norm(residual));
    }
    return result;
}

StrictArbitrageCheck check_strict_arbitrage(const Market& market, const TolerancePolicy& tol) {
    tol.validate();
    const lp::LpOutcome outcome = solve_nonnegative_discount(market, tol);

    StrictArbitrageCheck result;
    if (outcome.status == lp::LpStatus::Optimal) {
        result.curve = DiscountCurve::from_grid_values(market.grid, outcome.primal->cwiseMax(0.0));
        result.non_unique = rank_deficient_columns(market.cashflows, tol);
        return result;
    }
    if (outcome.status != lp::LpStatus::Infeasible || !outcome.farkas.has_value()) {
        throw std::runtime_error("check_strict_arbitrage: unexpected solver outcome");
    }
    result.portfolio = Portfolio(normalized_max_norm(-*outcome.farkas));
    return result;
}

ArbitrageVerdict check_arbitrage(const Market& market, const TolerancePolicy& tol) {
    tol.validate();

    LawOfOnePriceResult lop = check_law_of_one_price(market, tol);
    if (!lop.holds) {
        ArbitrageVerdict verdict;
        verdict.level = ArbitrageLevel::LawOfOnePriceFails;
        verdict.violating_portfolio = std::move(lop.portfolio);
        return verdict;
    }

    StrictArbitrageCheck strict = check_strict_arbitrage(market, tol);
    if (strict.strict_arbitrage_found()) {
        ArbitrageVerdict verdict;
        verdict.level = ArbitrageLevel::StrictArbitrage;
        verdict.violating_portfolio = std::move(strict.portfolio);
        return verdict;
    }

    const Index n = market.date_count();
    const lp::LpOutcome maxmin = solve_max_min_discount(market, tol);

    Vector discount;
    double min_component = 0.0;
    if (maxmin.status == lp::LpStatus::Optimal) {
        discount = maxmin.primal->head(n);
        min_component = (*maxmin.primal)(n);
    } else if (maxmin.status == lp::LpStatus::Unbounded) {
        // The minimum component can be pushed arbitrarily high; walk the ray
        // until it clears 1.
        const Vector& point = *maxmin.primal;
        const Vector& ray = *maxmin.farkas;
        Vector moved = point;
        if (ray(n) > 0.0) moved += std::max(0.0, (1.0 - point(n)) / ray(n)) * ray;
        discount = moved.head(n);
        min_component = moved(n);
    } else {
        throw std::runtime_error("check_arbitrage: witness search unexpectedly infeasible");
    }

    if (min_component > tol.strict_tol) {
        ArbitrageVerdict verdict;
        verdict.level = ArbitrageLevel::ArbitrageFree;
        verdict.witness_curve = DiscountCurve::from_grid_values(market.grid, discount);
        verdict.non_unique = rank_deficient_columns(market.cashflows, tol);
        return verdict;
    }

    // No strictly positive discount vector: hunt the arbitrage portfolio via
    //   q'P <= 0,  q'C >= 0,  sum_j (q'C)_j = 1,
    // the normalization turning "some strictly positive component" into a
    // linear constraint.
    const Index m = market.instrument_count();
    lp::LpProblem search;
    search.objective = Vector::Zero(m);
    search.eq_lhs = (market.cashflows * Vector::Ones(n)).transpose();
    search.eq_rhs = Vector::Ones(1);
    search.ineq_lhs = Matrix::Zero(n + 1, m);
    search.ineq_lhs.topRows(n) = market.cashflows.transpose();
    search.ineq_lhs.row(n) = -market.prices.transpose();
    search.ineq_rhs = Vector::Zero(n + 1);
    for (Index j = 0; j < m; ++j) search.free_vars.push_back(j);

    const std::optional<Vector> q = lp::feasible_point(search, tol);
    if (q.has_value()) {
        ArbitrageVerdict verdict;
        const double price = q->dot(market.prices);
        const double price_scale = market.prices.cwiseAbs().maxCoeff();
        verdict.level = price < -tol.strict_tol * price_scale ? ArbitrageLevel::StrictArbitrage
                                                              : ArbitrageLevel::Arbitrage;
        verdict.violating_portfolio = Portfolio(normalized_max_norm(*q));
        if (verdict.level == ArbitrageLevel::Arbitrage) {
            // nonnegative-but-not-positive curve, when the earlier check found one
            verdict.witness_curve = std::move(strict.curve);
        }
        verdict.non_unique = strict.non_unique;
        return verdict;
    }

    // Numerical borderline: the maximized minimum component sits below the
    // strict threshold yet no arbitrage portfolio exists. Report the
    // nonnegative witness rather than fabricate a portfolio.
    ArbitrageVerdict verdict;
    verdict.level = ArbitrageLevel::ArbitrageFree;
    verdict.witness_curve = DiscountCurve::from_grid_values(market.grid, discount);
    verdict.non_unique = rank_deficient_columns(market.cashflows, tol);
    return verdict;
}

}  // namespace fip
