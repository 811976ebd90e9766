#include "fip/replication.hpp"

#include "fip/lp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace fip {

namespace {

void require_same_grid(const Market& market, const LiabilitySchedule& liab, const char* who) {
    if (!(market.grid == liab.grid)) {
        throw std::invalid_argument(std::string(who) + ": liability grid must equal market grid");
    }
}

Vector normalized_max_norm(Vector v) {
    const double norm = v.cwiseAbs().maxCoeff();
    if (norm > 0.0) v /= norm;
    return v;
}

// Effective liability dates use exact zeros: Z is input data, not a computed
// quantity.
std::vector<Index> liability_dates(const Vector& amounts) {
    std::vector<Index> out;
    for (Index j = 0; j < amounts.size(); ++j) {
        if (amounts(j) != 0.0) out.push_back(j);
    }
    return out;
}

// The super-replication constraints C' q >= Z over unrestricted q.
lp::LpProblem domination_problem(const Market& market, const Vector& amounts) {
    const Index m = market.instrument_count();
    lp::LpProblem problem;
    problem.objective = Vector::Zero(m);
    problem.ineq_lhs = market.cashflows.transpose();
    problem.ineq_rhs = amounts;
    for (Index i = 0; i < m; ++i) problem.free_vars.push_back(i);
    return problem;
}

}  // namespace

InfeasibleLiabilityError::InfeasibleLiabilityError(Vector obstruction)
    : std::runtime_error("super-replication infeasible: nonnegative v with Cv = 0 and Z.v > 0"),
      obstruction_(std::move(obstruction)) {}

ArbitragePrecludedError::ArbitragePrecludedError(ArbitrageVerdict verdict)
    : std::runtime_error(std::string("market admits ") + to_string(verdict.level) +
                         "; least-cost super-replication requires an arbitrage-free market"),
      verdict_(std::move(verdict)) {}

UnboundedBelowError::UnboundedBelowError(Vector ray)
    : std::runtime_error("super-replication cost unbounded below along a cash-flow-dominating ray"),
      ray_(std::move(ray)) {}

std::optional<Portfolio> replicate_exact(const Market& market, const LiabilitySchedule& liab,
                                         const TolerancePolicy& tol) {
    tol.validate();
    require_same_grid(market, liab, "replicate_exact");
    Eigen::JacobiSVD<Matrix> svd(market.cashflows.transpose(),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol.rank_tol);
    const Vector q = svd.solve(liab.amounts);
    const Vector residual = market.cashflows.transpose() * q - liab.amounts;
    const double scale = std::max(liab.amounts.cwiseAbs().maxCoeff(),
                                  market.cashflows.cwiseAbs().maxCoeff() *
                                      q.cwiseAbs().maxCoeff());
    if (residual.cwiseAbs().maxCoeff() <= tol.feas_tol * scale) {
        return Portfolio(q);
    }
    return std::nullopt;
}

std::optional<Index> sufficient_instrument(const Market& market, const LiabilitySchedule& liab) {
    require_same_grid(market, liab, "sufficient_instrument");
    for (Index i = 0; i < market.instrument_count(); ++i) {
        if ((market.cashflows.row(i).array() < 0.0).any()) continue;
        bool matches = true;
        for (Index j = 0; j < market.date_count(); ++j) {
            const bool liability_here = liab.amounts(j) != 0.0;
            const bool pays_here = market.cashflows(i, j) > 0.0;
            if (liability_here != pays_here) {
                matches = false;
                break;
            }
        }
        if (matches) return i;
    }
    return std::nullopt;
}

FeasibilityCertificate check_feasibility(const Market& market, const LiabilitySchedule& liab,
                                         const TolerancePolicy& tol) {
    tol.validate();
    require_same_grid(market, liab, "check_feasibility");

    FeasibilityCertificate cert;
    cert.qualifying_instrument = sufficient_instrument(market, liab);
    if (cert.qualifying_instrument.has_value()) {
        // scale t e_i so that every effective date is covered
        const Index i = *cert.qualifying_instrument;
        const double top = std::max(liab.amounts.maxCoeff(), 0.0);
        double min_flow = 0.0;
        for (Index j : liability_dates(liab.amounts)) {
            const double flow = market.cashflows(i, j);
            min_flow = min_flow == 0.0 ? flow : std::min(min_flow, flow);
        }
        Vector q = Vector::Zero(market.instrument_count());
        q(i) = min_flow > 0.0 ? top / min_flow : 0.0;
        cert.feasible = true;
        cert.portfolio = Portfolio(std::move(q));
        return cert;
    }

    const lp::LpOutcome outcome = lp::solve(domination_problem(market, liab.amounts), tol);
    if (outcome.status == lp::LpStatus::Optimal) {
        cert.feasible = true;
        cert.portfolio = Portfolio(*outcome.primal);
        return cert;
    }
    if (outcome.status != lp::LpStatus::Infeasible || !outcome.farkas.has_value()) {
        throw std::runtime_error("check_feasibility: unexpected solver outcome");
    }
    cert.feasible = false;
    cert.obstruction = normalized_max_norm(outcome.farkas->cwiseMax(0.0));
    return cert;
}

SuperReplicationResult superreplicate(const Market& market, const LiabilitySchedule& liab,
                                      const TolerancePolicy& tol) {
    tol.validate();
    require_same_grid(market, liab, "superreplicate");

    ArbitrageVerdict verdict = check_arbitrage(market, tol);
    if (verdict.level != ArbitrageLevel::ArbitrageFree) {
        throw ArbitragePrecludedError(std::move(verdict));
    }

    Eigen::JacobiSVD<Matrix> svd(market.cashflows);
    svd.setThreshold(tol.rank_tol);
    const bool rank_deficient = svd.rank() < market.instrument_count();

    FeasibilityCertificate cert = check_feasibility(market, liab, tol);
    if (!cert.feasible) {
        throw InfeasibleLiabilityError(std::move(*cert.obstruction));
    }

    lp::LpProblem problem = domination_problem(market, liab.amounts);
    problem.objective = market.prices;
    const lp::LpOutcome outcome = lp::solve(problem, tol);

    if (outcome.status == lp::LpStatus::Unbounded) {
        throw UnboundedBelowError(*outcome.farkas);
    }
    if (outcome.status != lp::LpStatus::Optimal) {
        throw InfeasibleLiabilityError(outcome.farkas.value_or(Vector::Zero(market.date_count())));
    }

    SuperReplicationResult result{Portfolio(*outcome.primal),
                                  *outcome.objective_value,
                                  Vector(),
                                  *outcome.dual_ineq,
                                  outcome.possibly_non_unique,
                                  rank_deficient};
    result.slack = market.cashflows.transpose() * result.portfolio.positions - liab.amounts;
    return result;
}

Market aggregate_buffer(const Market& market, const LiabilitySchedule& liab) {
    require_same_grid(market, liab, "aggregate_buffer");
    const std::vector<Index> dates = liability_dates(liab.amounts);
    if (dates.empty()) {
        throw std::invalid_argument("aggregate_buffer: liability schedule is identically zero");
    }

    Matrix agg = market.cashflows;
    Index window_start = 0;  // first column of the current aggregation window
    for (Index jk : dates) {
        for (Index i = 0; i < market.instrument_count(); ++i) {
            double sum = 0.0;
            for (Index s = window_start; s <= jk; ++s) sum += market.cashflows(i, s);
            for (Index s = window_start; s < jk; ++s) agg(i, s) = 0.0;
            agg(i, jk) = sum;
        }
        window_start = jk + 1;
    }
    // columns after the last liability date stay as they are
    return Market(market.grid, market.prices, std::move(agg));
}

Market aggregate_forward(const Market& market, const LiabilitySchedule& liab,
                         const DiscountCurve& curve, const TolerancePolicy& tol) {
    tol.validate();
    require_same_grid(market, liab, "aggregate_forward");
    const std::vector<Index> dates = liability_dates(liab.amounts);
    if (dates.empty()) {
        throw std::invalid_argument("aggregate_forward: liability schedule is identically zero");
    }

    const Vector g = curve_vector(curve, market.grid);
    if (!(g.array() > tol.strict_tol).all()) {
        throw std::invalid_argument(
            "aggregate_forward: curve must be strictly positive on the grid");
    }

    Matrix agg = market.cashflows;
    Index window_start = 0;
    for (Index jk : dates) {
        for (Index i = 0; i < market.instrument_count(); ++i) {
            double sum = 0.0;
            for (Index s = window_start; s <= jk; ++s) {
                sum += g(s) / g(jk) * market.cashflows(i, s);
            }
            for (Index s = window_start; s < jk; ++s) agg(i, s) = 0.0;
            agg(i, jk) = sum;
        }
        window_start = jk + 1;
    }
    return Market(market.grid, market.prices, std::move(agg));
}

Portfolio hedge_quadratic(const Market& market, const LiabilitySchedule& liab, double lambda) {
    require_same_grid(market, liab, "hedge_quadratic");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw std::invalid_argument("hedge_quadratic: lambda must be strictly positive");
    }
    const Index m = market.instrument_count();
    const Matrix normal = market.cashflows * market.cashflows.transpose() +
                          lambda * Matrix::Identity(m, m);
    const Vector rhs = market.cashflows * liab.amounts;
    return Portfolio(normal.ldlt().solve(rhs));
}

}  // namespace fip
