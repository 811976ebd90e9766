#pragma once

// Shared helpers for the test suites: deterministic generators for markets,
// curves and linear programs, plus independent verifiers used as oracles.

#include "fip/arbitrage.hpp"
#include "fip/lp.hpp"
#include "fip/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace fip::testing {

// splitmix64: portable and stable across platforms, unlike the standard
// library distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t bits() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool chance(double p) { return uniform() < p; }
    Index below(Index n) { return static_cast<Index>(bits() % static_cast<std::uint64_t>(n)); }
    int int_between(int lo, int hi) { return lo + static_cast<int>(below(hi - lo + 1)); }

private:
    std::uint64_t state_;
};

inline Vector random_grid_dates(Rng& rng, Index n) {
    Vector dates(n);
    double t = 0.0;
    for (Index j = 0; j < n; ++j) {
        t += 0.25 * static_cast<double>(rng.int_between(1, 4));
        dates(j) = t;
    }
    return dates;
}

inline Vector random_positive_discount(Rng& rng, const Vector& dates) {
    Vector g(dates.size());
    for (Index j = 0; j < dates.size(); ++j) {
        g(j) = std::exp(-rng.uniform(0.0, 0.12) * dates(j));
    }
    return g;
}

// Entries from a bounded quarter-integer set, mildly sparse.
inline Matrix random_cashflows(Rng& rng, Index m, Index n, bool nonnegative = false) {
    Matrix c = Matrix::Zero(m, n);
    for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (rng.chance(0.35)) continue;
            const int lo = nonnegative ? 0 : -8;
            c(i, j) = 0.25 * static_cast<double>(rng.int_between(lo, 8));
        }
    }
    return c;
}

inline Market random_af_market(Rng& rng, Index m, Index n) {
    const Vector dates = random_grid_dates(rng, n);
    const Matrix c = random_cashflows(rng, m, n);
    const Vector g = random_positive_discount(rng, dates);
    return Market(DateGrid(dates), c * g, c);
}

inline Market random_perturbed_market(Rng& rng, Index m, Index n) {
    const Vector dates = random_grid_dates(rng, n);
    const Matrix c = random_cashflows(rng, m, n);
    const Vector g = random_positive_discount(rng, dates);
    Vector prices = c * g;
    for (Index i = 0; i < m; ++i) {
        if (rng.chance(0.7)) prices(i) += rng.uniform(-0.3, 0.3);
    }
    return Market(DateGrid(dates), prices, c);
}

// Square lower-triangular coupon-bond-like market: well conditioned and
// arbitrage-free by construction.
inline Market random_triangular_af_market(Rng& rng, Index n) {
    const Vector dates = random_grid_dates(rng, n);
    Matrix c = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        const double coupon = 0.25 * static_cast<double>(rng.int_between(0, 2));
        for (Index j = 0; j < i; ++j) c(i, j) = coupon;
        c(i, i) = 1.0 + coupon;
    }
    const Vector g = random_positive_discount(rng, dates);
    return Market(DateGrid(dates), c * g, c);
}

// Fixed rate making each synthetic swap-repo bond price exactly 1 under the
// given curve: R = (1 - g(n d)) / (d * sum_{k<=n} g(k d)).
inline double par_rate(const DiscountCurve& curve, double accrual, int periods) {
    double annuity = 0.0;
    for (int k = 1; k <= periods; ++k) annuity += curve(accrual * static_cast<double>(k));
    return (1.0 - curve(accrual * static_cast<double>(periods))) / (accrual * annuity);
}

// --------------------------------------------------------------------------
// independent verifiers

inline double data_scale(const lp::LpProblem& p) {
    double scale = std::max(1.0, p.objective.cwiseAbs().maxCoeff());
    if (p.num_eq() > 0) {
        scale = std::max({scale, p.eq_lhs.cwiseAbs().maxCoeff(), p.eq_rhs.cwiseAbs().maxCoeff()});
    }
    if (p.num_ineq() > 0) {
        scale = std::max(
            {scale, p.ineq_lhs.cwiseAbs().maxCoeff(), p.ineq_rhs.cwiseAbs().maxCoeff()});
    }
    return scale;
}

inline bool point_feasible(const lp::LpProblem& p, const Vector& w, double eps) {
    std::vector<bool> is_free(static_cast<std::size_t>(p.num_vars()), false);
    for (Index j : p.free_vars) is_free[static_cast<std::size_t>(j)] = true;
    const double margin = eps * std::max(1.0, w.cwiseAbs().maxCoeff()) * data_scale(p);
    for (Index i = 0; i < p.num_eq(); ++i) {
        if (std::abs(p.eq_lhs.row(i).dot(w) - p.eq_rhs(i)) > margin) return false;
    }
    for (Index k = 0; k < p.num_ineq(); ++k) {
        if (p.ineq_lhs.row(k).dot(w) < p.ineq_rhs(k) - margin) return false;
    }
    for (Index j = 0; j < p.num_vars(); ++j) {
        if (!is_free[static_cast<std::size_t>(j)] && w(j) < -margin) return false;
    }
    return true;
}

// Re-checks an infeasibility certificate by direct arithmetic.
inline bool farkas_valid(const lp::LpProblem& p, const Vector& y, double eps) {
    if (y.size() != p.num_eq() + p.num_ineq()) return false;
    std::vector<bool> is_free(static_cast<std::size_t>(p.num_vars()), false);
    for (Index j : p.free_vars) is_free[static_cast<std::size_t>(j)] = true;

    Vector combination = Vector::Zero(p.num_vars());
    double rhs_value = 0.0;
    if (p.num_eq() > 0) {
        combination += p.eq_lhs.transpose() * y.head(p.num_eq());
        rhs_value += p.eq_rhs.dot(y.head(p.num_eq()));
    }
    if (p.num_ineq() > 0) {
        combination += p.ineq_lhs.transpose() * y.tail(p.num_ineq());
        rhs_value += p.ineq_rhs.dot(y.tail(p.num_ineq()));
    }
    const double margin = eps * data_scale(p) * std::max(1.0, y.cwiseAbs().maxCoeff());
    for (Index k = 0; k < p.num_ineq(); ++k) {
        if (y(p.num_eq() + k) < -margin) return false;
    }
    for (Index j = 0; j < p.num_vars(); ++j) {
        if (is_free[static_cast<std::size_t>(j)]) {
            if (std::abs(combination(j)) > margin) return false;
        } else if (combination(j) > margin) {
            return false;
        }
    }
    return rhs_value > margin;
}

// Brute-force status classifier for problems whose variables are all
// nonnegative (pointed feasible set): vertices decide feasibility, extreme
// rays of the recession cone decide boundedness.
struct OracleResolution {
    lp::LpStatus status;
    double objective;  // meaningful when Optimal
};

inline OracleResolution oracle_resolution(const lp::LpProblem& p, const TolerancePolicy& tol) {
    const std::vector<Vector> vertices = lp::enumerate_vertices(p, tol);
    if (vertices.empty()) return {lp::LpStatus::Infeasible, 0.0};

    lp::LpProblem cone;
    const Index n = p.num_vars();
    cone.objective = Vector::Zero(n);
    cone.eq_lhs = Matrix::Zero(p.num_eq() + 1, n);
    cone.eq_rhs = Vector::Zero(p.num_eq() + 1);
    if (p.num_eq() > 0) cone.eq_lhs.topRows(p.num_eq()) = p.eq_lhs;
    cone.eq_lhs.row(p.num_eq()) = Vector::Ones(n).transpose();
    cone.eq_rhs(p.num_eq()) = 1.0;
    if (p.num_ineq() > 0) {
        cone.ineq_lhs = p.ineq_lhs;
        cone.ineq_rhs = Vector::Zero(p.num_ineq());
    }
    for (const Vector& ray : lp::enumerate_vertices(cone, tol)) {
        if (p.objective.dot(ray) < -1e-9 * data_scale(p)) {
            return {lp::LpStatus::Unbounded, 0.0};
        }
    }

    double best = p.objective.dot(vertices.front());
    for (const Vector& v : vertices) best = std::min(best, p.objective.dot(v));
    return {lp::LpStatus::Optimal, best};
}

// All-nonnegative-variable random instance with bounded integer data.
inline lp::LpProblem random_lp(Rng& rng) {
    lp::LpProblem p;
    const Index n = rng.int_between(2, 6);
    const Index me = rng.int_between(0, 2);
    const Index mi = rng.int_between(me == 0 ? 1 : 0, 6);
    p.objective = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) p.objective(j) = rng.int_between(-4, 4);
    p.eq_lhs = Matrix::Zero(me, n);
    p.eq_rhs = Vector::Zero(me);
    for (Index i = 0; i < me; ++i) {
        for (Index j = 0; j < n; ++j) p.eq_lhs(i, j) = rng.int_between(-4, 4);
        p.eq_rhs(i) = rng.int_between(-4, 4);
    }
    p.ineq_lhs = Matrix::Zero(mi, n);
    p.ineq_rhs = Vector::Zero(mi);
    for (Index k = 0; k < mi; ++k) {
        for (Index j = 0; j < n; ++j) p.ineq_lhs(k, j) = rng.int_between(-4, 4);
        p.ineq_rhs(k) = rng.int_between(-4, 4);
    }
    return p;
}

}  // namespace fip::testing
