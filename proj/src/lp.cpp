#include "fip/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace fip::lp {

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

void LpProblem::validate() const {
    const Index n = num_vars();
    if (n < 1) throw std::invalid_argument("LpProblem: at least one variable required");
    if (!objective.allFinite()) throw std::invalid_argument("LpProblem: objective must be finite");
    if (num_eq() > 0) {
        if (eq_lhs.rows() != num_eq() || eq_lhs.cols() != n) {
            throw std::invalid_argument("LpProblem: equality block dimensions inconsistent");
        }
        if (!eq_lhs.allFinite() || !eq_rhs.allFinite()) {
            throw std::invalid_argument("LpProblem: equality block must be finite");
        }
    }
    if (num_ineq() > 0) {
        if (ineq_lhs.rows() != num_ineq() || ineq_lhs.cols() != n) {
            throw std::invalid_argument("LpProblem: inequality block dimensions inconsistent");
        }
        if (!ineq_lhs.allFinite() || !ineq_rhs.allFinite()) {
            throw std::invalid_argument("LpProblem: inequality block must be finite");
        }
    }
    std::vector<bool> seen(n, false);
    for (Index j : free_vars) {
        if (j < 0 || j >= n) throw std::invalid_argument("LpProblem: free variable index out of range");
        if (seen[j]) throw std::invalid_argument("LpProblem: duplicate free variable index");
        seen[j] = true;
    }
}

namespace {

thread_local std::ostream* t_dump_sink = nullptr;

// Standard form: all variables nonnegative, all rows equalities. Free
// variables are split w = w+ - w-, inequality rows get a surplus column, rows
// are scaled to unit max-norm and flipped so the right-hand side is
// nonnegative.
struct ColRef {
    Index var;    // original variable, or -1 for surplus
    double sign;  // +1 / -1 for split halves, 0 for surplus
};

struct StandardForm {
    Matrix body;       // m x ncols
    Vector rhs;        // m, nonnegative
    Vector cost;       // ncols
    Vector row_scale;  // m
    Vector row_flip;   // m, entries +-1
    std::vector<ColRef> cols;
    Index num_eq = 0;
    Index num_ineq = 0;
};

StandardForm make_standard_form(const LpProblem& p) {
    const Index n = p.num_vars();
    const Index me = p.num_eq();
    const Index mi = p.num_ineq();
    const Index m = me + mi;

    std::vector<bool> is_free(n, false);
    for (Index j : p.free_vars) is_free[j] = true;

    StandardForm sf;
    sf.num_eq = me;
    sf.num_ineq = mi;
    for (Index j = 0; j < n; ++j) {
        sf.cols.push_back({j, +1.0});
        if (is_free[j]) sf.cols.push_back({j, -1.0});
    }
    const Index nstruct = static_cast<Index>(sf.cols.size());
    for (Index k = 0; k < mi; ++k) sf.cols.push_back({-1, 0.0});
    const Index ncols = nstruct + mi;

    sf.body = Matrix::Zero(m, ncols);
    sf.rhs = Vector::Zero(m);
    sf.cost = Vector::Zero(ncols);
    sf.row_scale = Vector::Ones(m);
    sf.row_flip = Vector::Ones(m);

    for (Index c = 0; c < nstruct; ++c) {
        sf.cost(c) = sf.cols[c].sign * p.objective(sf.cols[c].var);
    }

    auto fill_row = [&](Index r, const Vector& coeffs, double b, Index surplus) {
        double scale = coeffs.cwiseAbs().maxCoeff();
        if (!(scale > 0.0)) scale = 1.0;
        sf.row_scale(r) = scale;
        for (Index c = 0; c < nstruct; ++c) {
            sf.body(r, c) = sf.cols[c].sign * coeffs(sf.cols[c].var) / scale;
        }
        if (surplus >= 0) sf.body(r, nstruct + surplus) = -1.0;
        double rhs = b / scale;
        if (rhs < 0.0) {
            sf.body.row(r) = -sf.body.row(r);
            rhs = -rhs;
            sf.row_flip(r) = -1.0;
        }
        sf.rhs(r) = rhs;
    };

    for (Index i = 0; i < me; ++i) {
        fill_row(i, p.eq_lhs.row(i).transpose(), p.eq_rhs(i), -1);
    }
    for (Index k = 0; k < mi; ++k) {
        fill_row(me + k, p.ineq_lhs.row(k).transpose(), p.ineq_rhs(k), k);
    }
    return sf;
}

// Maps a standard-form point (or direction) back to original variables.
Vector to_original(const StandardForm& sf, const Vector& wstd, Index n) {
    Vector w = Vector::Zero(n);
    for (Index c = 0; c < static_cast<Index>(sf.cols.size()); ++c) {
        if (sf.cols[c].sign != 0.0) w(sf.cols[c].var) += sf.cols[c].sign * wstd(c);
    }
    return w;
}

// Row multipliers in standard-form space correspond to flip/scale-adjusted
// multipliers on the original rows.
Vector to_row_duals(const StandardForm& sf, const Vector& yprime) {
    return (sf.row_flip.array() * yprime.array() / sf.row_scale.array()).matrix();
}

// Dense tableau with the artificial block kept throughout so that row duals
// can be read off its columns. Artificial variables never re-enter the basis.
class Simplex {
public:
    Simplex(const StandardForm& sf, const TolerancePolicy& tol)
        : sf_(sf),
          tol_(tol),
          m_(sf.body.rows()),
          ncols_(sf.body.cols()),
          t_(Matrix::Zero(m_ + 1, ncols_ + m_ + 1)),
          basis_(static_cast<std::size_t>(m_)),
          in_basis_(static_cast<std::size_t>(ncols_ + m_), false) {
        t_.topLeftCorner(m_, ncols_) = sf.body;
        t_.block(0, ncols_, m_, m_) = Matrix::Identity(m_, m_);
        t_.col(rhs_col()).head(m_) = sf.rhs;
        for (Index i = 0; i < m_; ++i) {
            basis_[static_cast<std::size_t>(i)] = ncols_ + i;
            in_basis_[static_cast<std::size_t>(ncols_ + i)] = true;
        }
        // phase-1 reduced costs: minimize the artificial total
        t_.row(m_).head(ncols_) = -sf.body.colwise().sum();
        t_(m_, rhs_col()) = -sf.rhs.sum();
    }

    Index rhs_col() const { return ncols_ + m_; }

    bool phase1() {
        const LpStatus status = iterate(tol_.feas_tol);
        if (status != LpStatus::Optimal) {
            throw std::runtime_error("lp::solve: phase-1 objective cannot be unbounded");
        }
        const double value = -t_(m_, rhs_col());
        return value <= tol_.feas_tol * std::max(1.0, sf_.rhs.sum());
    }

    // Pivots basic artificials onto structural columns where possible; rows
    // that admit no pivot are redundant and their artificial stays inert.
    void drive_out_artificials() {
        for (Index i = 0; i < m_; ++i) {
            if (basis_[static_cast<std::size_t>(i)] < ncols_) continue;
            for (Index j = 0; j < ncols_; ++j) {
                if (!in_basis_[static_cast<std::size_t>(j)] &&
                    std::abs(t_(i, j)) > tol_.feas_tol) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    void set_phase2_costs() {
        Vector cb(m_);
        for (Index i = 0; i < m_; ++i) {
            const Index b = basis_[static_cast<std::size_t>(i)];
            cb(i) = b < ncols_ ? sf_.cost(b) : 0.0;
        }
        for (Index j = 0; j < ncols_ + m_; ++j) {
            const double cj = j < ncols_ ? sf_.cost(j) : 0.0;
            t_(m_, j) = cj - cb.dot(t_.col(j).head(m_));
        }
        t_(m_, rhs_col()) = -cb.dot(t_.col(rhs_col()).head(m_));
    }

    LpStatus phase2() { return iterate(entering_eps()); }

    double entering_eps() const {
        const double cost_scale = sf_.cost.size() > 0 ? sf_.cost.cwiseAbs().maxCoeff() : 0.0;
        return tol_.feas_tol * std::max(1.0, cost_scale);
    }

    Vector std_point() const {
        Vector w = Vector::Zero(ncols_);
        for (Index i = 0; i < m_; ++i) {
            const Index b = basis_[static_cast<std::size_t>(i)];
            if (b < ncols_) w(b) = t_(i, rhs_col());
        }
        return w;
    }

    Vector std_direction(Index s) const {
        Vector r = Vector::Zero(ncols_);
        r(s) = 1.0;
        for (Index i = 0; i < m_; ++i) {
            const Index b = basis_[static_cast<std::size_t>(i)];
            if (b < ncols_) r(b) = -t_(i, s);
        }
        return r;
    }

    Vector row_duals_phase1() const {
        Vector y(m_);
        for (Index k = 0; k < m_; ++k) y(k) = 1.0 - t_(m_, ncols_ + k);
        return y;
    }

    Vector row_duals_phase2() const {
        Vector y(m_);
        for (Index k = 0; k < m_; ++k) y(k) = -t_(m_, ncols_ + k);
        return y;
    }

    Index unbounded_col() const { return unbounded_col_; }

    // Zero reduced cost on a nonbasic column whose simplex direction moves the
    // original variables signals alternate optima.
    bool alternate_optimum_direction(Index n) const {
        const double eps = entering_eps();
        const Vector w = to_original(sf_, std_point(), n);
        const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
        for (Index j = 0; j < ncols_; ++j) {
            if (in_basis_[static_cast<std::size_t>(j)]) continue;
            if (std::abs(t_(m_, j)) > eps) continue;
            const Vector dir = to_original(sf_, std_direction(j), n);
            if (dir.cwiseAbs().maxCoeff() > 1e-7 * scale) return true;
        }
        return false;
    }

private:
    LpStatus iterate(double eps) {
        const Index cap = 5000 + 200 * (m_ + ncols_);
        for (Index iter = 0;; ++iter) {
            if (iter > cap) throw std::runtime_error("lp::solve: simplex iteration cap exceeded");
            Index entering = -1;
            for (Index j = 0; j < ncols_; ++j) {
                if (in_basis_[static_cast<std::size_t>(j)]) continue;
                if (t_(m_, j) < -eps) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return LpStatus::Optimal;

            Index leave = -1;
            double best_ratio = 0.0;
            for (Index i = 0; i < m_; ++i) {
                const double d = t_(i, entering);
                if (d <= tol_.feas_tol) continue;
                const double ratio = t_(i, rhs_col()) / d;
                if (leave < 0) {
                    leave = i;
                    best_ratio = ratio;
                    continue;
                }
                const double band = tol_.feas_tol * (1.0 + std::abs(best_ratio));
                if (ratio < best_ratio - band) {
                    leave = i;
                    best_ratio = ratio;
                } else if (ratio <= best_ratio + band &&
                           basis_[static_cast<std::size_t>(i)] <
                               basis_[static_cast<std::size_t>(leave)]) {
                    leave = i;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
            if (leave < 0) {
                unbounded_col_ = entering;
                return LpStatus::Unbounded;
            }
            pivot(leave, entering);
        }
    }

    void pivot(Index r, Index s) {
        in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = false;
        in_basis_[static_cast<std::size_t>(s)] = true;
        basis_[static_cast<std::size_t>(r)] = s;
        t_.row(r) /= t_(r, s);
        t_(r, s) = 1.0;
        for (Index i = 0; i <= m_; ++i) {
            if (i == r) continue;
            const double f = t_(i, s);
            if (f != 0.0) {
                t_.row(i) -= f * t_.row(r);
                t_(i, s) = 0.0;
            }
        }
    }

    const StandardForm& sf_;
    TolerancePolicy tol_;
    Index m_;
    Index ncols_;
    Matrix t_;
    std::vector<Index> basis_;
    std::vector<bool> in_basis_;
    Index unbounded_col_ = -1;
};

// No constraint rows at all: the origin is feasible and the objective decides.
LpOutcome solve_unconstrained(const LpProblem& p, const TolerancePolicy& tol) {
    const Index n = p.num_vars();
    std::vector<bool> is_free(n, false);
    for (Index j : p.free_vars) is_free[j] = true;
    const double eps = tol.feas_tol * std::max(1.0, p.objective.cwiseAbs().maxCoeff());

    LpOutcome out;
    for (Index j = 0; j < n; ++j) {
        const double cj = p.objective(j);
        const bool descending = is_free[j] ? std::abs(cj) > eps : cj < -eps;
        if (descending) {
            Vector ray = Vector::Zero(n);
            ray(j) = (is_free[j] && cj > 0.0) ? -1.0 : 1.0;
            out.status = LpStatus::Unbounded;
            out.primal = Vector::Zero(n);
            out.farkas = ray;
            return out;
        }
    }
    out.status = LpStatus::Optimal;
    out.primal = Vector::Zero(n);
    out.objective_value = 0.0;
    out.dual_eq = Vector(0);
    out.dual_ineq = Vector(0);
    for (Index j = 0; j < n; ++j) {
        if (std::abs(p.objective(j)) <= eps) out.possibly_non_unique = true;
    }
    return out;
}

void normalize_max_norm(Vector& v) {
    const double norm = v.cwiseAbs().maxCoeff();
    if (norm > 0.0) v /= norm;
}

}  // namespace

LpOutcome solve(const LpProblem& problem, const TolerancePolicy& tol) {
    tol.validate();
    problem.validate();
    if (t_dump_sink != nullptr) dump(problem, *t_dump_sink);

    if (problem.num_eq() + problem.num_ineq() == 0) {
        return solve_unconstrained(problem, tol);
    }

    const StandardForm sf = make_standard_form(problem);
    Simplex simplex(sf, tol);

    if (!simplex.phase1()) {
        LpOutcome out;
        out.status = LpStatus::Infeasible;
        Vector y = to_row_duals(sf, simplex.row_duals_phase1());
        normalize_max_norm(y);
        out.farkas = std::move(y);
        return out;
    }

    simplex.drive_out_artificials();
    simplex.set_phase2_costs();
    const LpStatus status = simplex.phase2();
    const Index n = problem.num_vars();

    if (status == LpStatus::Unbounded) {
        LpOutcome out;
        out.status = LpStatus::Unbounded;
        out.primal = to_original(sf, simplex.std_point(), n);
        out.farkas = to_original(sf, simplex.std_direction(simplex.unbounded_col()), n);
        return out;
    }

    LpOutcome out;
    out.status = LpStatus::Optimal;
    Vector w = to_original(sf, simplex.std_point(), n);
    out.objective_value = problem.objective.dot(w);
    out.primal = std::move(w);
    const Vector y = to_row_duals(sf, simplex.row_duals_phase2());
    out.dual_eq = y.head(problem.num_eq());
    out.dual_ineq = y.tail(problem.num_ineq()).cwiseMax(0.0);
    out.possibly_non_unique = simplex.alternate_optimum_direction(n);
    return out;
}

std::optional<Vector> feasible_point(const LpProblem& problem, const TolerancePolicy& tol) {
    tol.validate();
    problem.validate();
    if (problem.num_eq() + problem.num_ineq() == 0) {
        return Vector::Zero(problem.num_vars());
    }
    const StandardForm sf = make_standard_form(problem);
    Simplex simplex(sf, tol);
    if (!simplex.phase1()) return std::nullopt;
    return to_original(sf, simplex.std_point(), problem.num_vars());
}

std::vector<Vector> enumerate_vertices(const LpProblem& problem, const TolerancePolicy& tol) {
    tol.validate();
    problem.validate();
    const Index n = problem.num_vars();
    if (n > 12) {
        throw std::invalid_argument("enumerate_vertices: guarded to at most 12 variables");
    }
    std::vector<bool> is_free(n, false);
    for (Index j : problem.free_vars) is_free[j] = true;

    struct Row {
        Vector coeffs;
        double rhs;
        bool is_eq;
    };
    std::vector<Row> rows;
    for (Index i = 0; i < problem.num_eq(); ++i) {
        rows.push_back({problem.eq_lhs.row(i).transpose(), problem.eq_rhs(i), true});
    }
    for (Index k = 0; k < problem.num_ineq(); ++k) {
        rows.push_back({problem.ineq_lhs.row(k).transpose(), problem.ineq_rhs(k), false});
    }
    for (Index j = 0; j < n; ++j) {
        if (is_free[j]) continue;
        Vector bound = Vector::Zero(n);
        bound(j) = 1.0;
        rows.push_back({std::move(bound), 0.0, false});
    }

    const Index total = static_cast<Index>(rows.size());
    std::vector<Vector> vertices;
    if (total < n) return vertices;

    auto satisfied = [&](const Vector& w) {
        for (const Row& row : rows) {
            const double lhs = row.coeffs.dot(w);
            const double margin =
                tol.feas_tol *
                std::max(1.0, row.coeffs.cwiseAbs().maxCoeff() * w.cwiseAbs().maxCoeff() +
                                  std::abs(row.rhs));
            if (row.is_eq) {
                if (std::abs(lhs - row.rhs) > margin) return false;
            } else if (lhs < row.rhs - margin) {
                return false;
            }
        }
        return true;
    };

    std::vector<Index> comb(static_cast<std::size_t>(n));
    std::iota(comb.begin(), comb.end(), Index{0});
    Matrix system(n, n);
    Vector rhs(n);

    for (;;) {
        for (Index i = 0; i < n; ++i) {
            system.row(i) = rows[static_cast<std::size_t>(comb[static_cast<std::size_t>(i)])]
                                .coeffs.transpose();
            rhs(i) = rows[static_cast<std::size_t>(comb[static_cast<std::size_t>(i)])].rhs;
        }
        Eigen::FullPivLU<Matrix> lu(system);
        lu.setThreshold(tol.rank_tol);
        if (lu.isInvertible()) {
            const Vector w = lu.solve(rhs);
            if (w.allFinite() && satisfied(w)) {
                const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
                bool duplicate = false;
                for (const Vector& v : vertices) {
                    if ((v - w).cwiseAbs().maxCoeff() <= 1e-7 * scale) {
                        duplicate = true;
                        break;
                    }
                }
                if (!duplicate) vertices.push_back(w);
            }
        }

        // advance to the next n-combination of row indices
        Index pos = n - 1;
        while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == total - n + pos) --pos;
        if (pos < 0) break;
        ++comb[static_cast<std::size_t>(pos)];
        for (Index i = pos + 1; i < n; ++i) {
            comb[static_cast<std::size_t>(i)] = comb[static_cast<std::size_t>(i - 1)] + 1;
        }
    }

    std::sort(vertices.begin(), vertices.end(), [](const Vector& a, const Vector& b) {
        for (Index i = 0; i < a.size(); ++i) {
            if (a(i) != b(i)) return a(i) < b(i);
        }
        return false;
    });
    return vertices;
}

void dump(const LpProblem& problem, std::ostream& os) {
    const auto flags = os.flags();
    const auto precision = os.precision();
    os.precision(12);
    os << "lp vars=" << problem.num_vars() << " eq=" << problem.num_eq()
       << " ineq=" << problem.num_ineq() << '\n';
    os << "min:";
    for (Index j = 0; j < problem.num_vars(); ++j) os << ' ' << problem.objective(j);
    os << '\n';
    os << "free:";
    if (problem.free_vars.empty()) {
        os << " none";
    } else {
        for (Index j : problem.free_vars) os << ' ' << j;
    }
    os << '\n';
    for (Index i = 0; i < problem.num_eq(); ++i) {
        os << "eq[" << i << "]:";
        for (Index j = 0; j < problem.num_vars(); ++j) os << ' ' << problem.eq_lhs(i, j);
        os << " = " << problem.eq_rhs(i) << '\n';
    }
    for (Index k = 0; k < problem.num_ineq(); ++k) {
        os << "ineq[" << k << "]:";
        for (Index j = 0; j < problem.num_vars(); ++j) os << ' ' << problem.ineq_lhs(k, j);
        os << " >= " << problem.ineq_rhs(k) << '\n';
    }
    os << "end\n";
    os.flags(flags);
    os.precision(precision);
}

ScopedDump::ScopedDump(std::ostream& os) : previous_(t_dump_sink) { t_dump_sink = &os; }

ScopedDump::~ScopedDump() { t_dump_sink = previous_; }

}  // namespace fip::lp
