#pragma once

#include "fip/types.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace fip::lp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus status);

/// Dense linear program in the form
///
///   minimize    objective . w
///   subject to  eq_lhs w = eq_rhs,
///               ineq_lhs w >= ineq_rhs,
///               w_j >= 0 for every j not listed in free_vars.
///
/// Either constraint block may be empty.
struct LpProblem {
    Vector objective;
    Matrix eq_lhs = Matrix(0, 0);
    Vector eq_rhs = Vector(0);
    Matrix ineq_lhs = Matrix(0, 0);
    Vector ineq_rhs = Vector(0);
    std::vector<Index> free_vars;

    Index num_vars() const { return objective.size(); }
    Index num_eq() const { return eq_rhs.size(); }
    Index num_ineq() const { return ineq_rhs.size(); }

    void validate() const;
};

/// Resolution of an LpProblem.
///
/// Optimal: primal, objective_value and both dual vectors are set;
///   dual_eq is sign-free, dual_ineq is nonnegative, and the dual objective
///   eq_rhs . dual_eq + ineq_rhs . dual_ineq matches objective_value.
/// Infeasible: farkas holds a certificate y over the stacked rows [eq; ineq]
///   with y' [eq_lhs; ineq_lhs] <= 0 on nonnegative variables (= 0 on free
///   ones), y >= 0 on the inequality rows, and y . [eq_rhs; ineq_rhs] > 0.
/// Unbounded: primal holds a feasible point and farkas a ray r (in variable
///   space) along which the objective strictly decreases.
struct LpOutcome {
    LpStatus status = LpStatus::Optimal;
    std::optional<Vector> primal;
    std::optional<double> objective_value;
    std::optional<Vector> dual_eq;
    std::optional<Vector> dual_ineq;
    std::optional<Vector> farkas;
    bool possibly_non_unique = false;
};

/// Two-phase dense simplex with Bland's rule. Deterministic: identical inputs
/// give identical outcomes.
LpOutcome solve(const LpProblem& problem, const TolerancePolicy& tol = {});

/// Phase-1 only: a point satisfying all constraints, or nothing.
std::optional<Vector> feasible_point(const LpProblem& problem, const TolerancePolicy& tol = {});

/// Brute-force enumeration of all basic feasible solutions (vertices) of the
/// constraint polyhedron, ignoring the objective. Testing oracle; guarded to
/// at most 12 variables.
std::vector<Vector> enumerate_vertices(const LpProblem& problem, const TolerancePolicy& tol = {});

/// Writes the problem in a plain-text fixed format: objective row first, then
/// one line per constraint row.
void dump(const LpProblem& problem, std::ostream& os);

/// While alive, every problem handed to solve() on this thread is appended to
/// the given stream. Debug aid behind the CLI's --dump-lp flag.
class ScopedDump {
public:
    explicit ScopedDump(std::ostream& os);
    ~ScopedDump();
    ScopedDump(const ScopedDump&) = delete;
    ScopedDump& operator=(const ScopedDump&) = delete;

private:
    std::ostream* previous_;
};

}  // namespace fip::lp
