// Independent references for the solver tests. The vertex oracle never
// pivots: it enumerates every square active set, so agreement with the
// simplex is meaningful. The binary-enumeration oracle reuses solve_lp by
// design, isolating the branch-and-bound logic as the only difference.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "milp/problem.hpp"
#include "milp/simplex.hpp"

namespace mipred::oracles {

using milp::kInf;
using milp::LpStatus;
using milp::MilpProblem;
using milp::Relation;
using milp::Sense;
using milp::VarKind;

struct OracleResult {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

// Enumerates all n-subsets of {constraint rows as equalities} union {bound
// rows}, solves each square system, and keeps the best feasible point. Valid
// for box-bounded problems, where the feasible set is a polytope whose
// optimum (when the set is nonempty) is attained at such a point.
inline OracleResult vertex_enum_lp(const MilpProblem& p, double tol = 1e-7) {
    const int n = p.variable_count();
    std::vector<Eigen::RowVectorXd> lhs;
    std::vector<double> rhs;
    for (int i = 0; i < p.constraint_count(); ++i) {
        Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
        for (const auto& [idx, coef] : p.constraint(i).terms) a(idx) = coef;
        lhs.push_back(a);
        rhs.push_back(p.constraint(i).rhs);
    }
    for (int j = 0; j < n; ++j) {
        const auto& v = p.variable(j);
        if (std::isfinite(v.lower)) {
            Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
            a(j) = 1.0;
            lhs.push_back(a);
            rhs.push_back(v.lower);
        }
        if (std::isfinite(v.upper)) {
            Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
            a(j) = 1.0;
            lhs.push_back(a);
            rhs.push_back(v.upper);
        }
    }
    const int total = static_cast<int>(lhs.size());

    Eigen::VectorXd cost = Eigen::VectorXd::Zero(n);
    for (const auto& [idx, coef] : p.objective_terms()) cost(idx) = coef;
    const bool maximize = p.objective_sense() == Sense::Maximize;

    const auto feasible_point = [&](const Eigen::VectorXd& x) {
        for (int j = 0; j < n; ++j) {
            const auto& v = p.variable(j);
            if (x(j) < v.lower - tol || x(j) > v.upper + tol) return false;
        }
        for (int i = 0; i < p.constraint_count(); ++i) {
            const double act = lhs[static_cast<size_t>(i)].dot(x);
            const double scale = 1.0 + std::abs(rhs[static_cast<size_t>(i)]);
            switch (p.constraint(i).rel) {
                case Relation::LessEqual:
                    if (act > rhs[static_cast<size_t>(i)] + tol * scale) return false;
                    break;
                case Relation::GreaterEqual:
                    if (act < rhs[static_cast<size_t>(i)] - tol * scale) return false;
                    break;
                case Relation::Equal:
                    if (std::abs(act - rhs[static_cast<size_t>(i)]) > tol * scale) return false;
                    break;
            }
        }
        return true;
    };

    OracleResult best;
    std::vector<int> pick(static_cast<size_t>(n), 0);
    const auto consider = [&](const std::vector<int>& active) {
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd b(n);
        for (int k = 0; k < n; ++k) {
            A.row(k) = lhs[static_cast<size_t>(active[static_cast<size_t>(k)])];
            b(k) = rhs[static_cast<size_t>(active[static_cast<size_t>(k)])];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible()) return;
        Eigen::VectorXd x = lu.solve(b);
        if (!x.allFinite() || !feasible_point(x)) return;
        const double obj = cost.dot(x) + p.objective_constant();
        const bool better = maximize ? obj > best.objective : obj < best.objective;
        if (!best.feasible || better) {
            best.feasible = true;
            best.objective = obj;
            best.x.assign(x.data(), x.data() + n);
        }
    };

    std::vector<int> active;
    const std::function<void(int)> recurse = [&](int from) {
        if (static_cast<int>(active.size()) == n) {
            consider(active);
            return;
        }
        const int need = n - static_cast<int>(active.size());
        for (int i = from; i + need <= total; ++i) {
            active.push_back(i);
            recurse(i + 1);
            active.pop_back();
        }
    };
    if (n <= total) recurse(0);
    return best;
}

// Fixes every binary assignment in turn and solves the continuous remainder
// with the engine under test.
inline OracleResult binary_enum_milp(const MilpProblem& p,
                                     const milp::SolverConfig& cfg = milp::SolverConfig{}) {
    std::vector<int> binaries;
    for (int j = 0; j < p.variable_count(); ++j)
        if (p.variable(j).kind == VarKind::Binary) binaries.push_back(j);
    const int k = static_cast<int>(binaries.size());
    const bool maximize = p.objective_sense() == Sense::Maximize;

    OracleResult best;
    for (long mask = 0; mask < (1L << k); ++mask) {
        MilpProblem fixed = p;
        for (int b = 0; b < k; ++b) {
            const double v = (mask >> b) & 1 ? 1.0 : 0.0;
            auto& var = fixed.variable(binaries[static_cast<size_t>(b)]);
            if (v < var.lower || v > var.upper) goto next_mask;
            var.lower = var.upper = v;
        }
        {
            milp::LpSolution lp = milp::solve_lp(fixed, cfg);
            if (lp.status == LpStatus::Optimal) {
                const bool better =
                    maximize ? lp.objective > best.objective : lp.objective < best.objective;
                if (!best.feasible || better) {
                    best.feasible = true;
                    best.objective = lp.objective;
                    best.x = lp.values;
                }
            }
        }
    next_mask:;
    }
    return best;
}

}  // namespace mipred::oracles
