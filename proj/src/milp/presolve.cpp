#include "milp/presolve.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

namespace mipred::milp {

namespace {

constexpr double kFtol = 1e-9;
constexpr double kItol = 1e-7;

struct WorkVar {
    double lo, up, value = 0.0;
    VarKind kind;
    bool fixed = false;
    bool substituted = false;
};

struct WorkRow {
    std::map<int, double> terms;
    Relation rel;
    double rhs;
    bool alive = true;
};

class Presolver {
public:
    explicit Presolver(const MilpProblem& p) : src_(p) {
        const int n = p.variable_count();
        vars_.reserve(static_cast<size_t>(n));
        var_rows_.resize(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) {
            const Variable& v = p.variable(j);
            vars_.push_back(WorkVar{v.lower, v.upper, 0.0, v.kind, false, false});
        }
        rows_.reserve(static_cast<size_t>(p.constraint_count()));
        for (int i = 0; i < p.constraint_count(); ++i) {
            const Constraint& c = p.constraint(i);
            WorkRow row;
            row.rel = c.rel;
            row.rhs = c.rhs;
            for (const auto& [idx, coef] : c.terms) {
                row.terms.emplace(idx, coef);
                var_rows_[static_cast<size_t>(idx)].push_back(i);
            }
            rows_.push_back(std::move(row));
        }
        for (const auto& [idx, coef] : p.objective_terms()) obj_[idx] = coef;
        obj_const_ = p.objective_constant();
    }

    PresolveResult run() {
        for (size_t i = 0; i < rows_.size(); ++i) queue_.push_back(static_cast<int>(i));
        for (size_t j = 0; j < vars_.size(); ++j) {
            WorkVar& v = vars_[j];
            if (v.lo > v.up + kFtol) return fail("variable bounds cross");
            if (v.up - v.lo <= kFtol && !v.fixed) fix(static_cast<int>(j), 0.5 * (v.lo + v.up));
        }
        long steps = 0;
        const long step_cap = 50L * static_cast<long>(rows_.size() + vars_.size()) + 10000;
        while (!queue_.empty()) {
            if (infeasible_) return fail(message_);
            if (++steps > step_cap) break;  // stop reducing, never loop forever
            const int ri = queue_.front();
            queue_.pop_front();
            process_row(ri);
            if (infeasible_) return fail(message_);
        }
        return emit();
    }

private:
    PresolveResult fail(const std::string& why) {
        PresolveResult r;
        r.infeasible = true;
        r.message = why.empty() ? "presolve detected infeasibility" : why;
        r.original_variable_count = src_.variable_count();
        return r;
    }

    void mark_infeasible(const std::string& why) {
        infeasible_ = true;
        message_ = why;
    }

    void enqueue_rows_of(int var) {
        for (int ri : var_rows_[static_cast<size_t>(var)])
            if (rows_[static_cast<size_t>(ri)].alive) queue_.push_back(ri);
    }

    void fix(int var, double value) {
        WorkVar& v = vars_[static_cast<size_t>(var)];
        if (v.fixed || v.substituted) return;
        if (value < v.lo - kItol || value > v.up + kItol) {
            mark_infeasible("fixing a variable outside its bounds");
            return;
        }
        value = std::min(std::max(value, v.lo), v.up);
        if (v.kind == VarKind::Binary) {
            if (std::abs(value) > kItol && std::abs(value - 1.0) > kItol) {
                mark_infeasible("binary variable forced to a fractional value");
                return;
            }
            value = std::abs(value) <= kItol ? 0.0 : 1.0;
        }
        v.fixed = true;
        v.value = value;
        v.lo = v.up = value;
        enqueue_rows_of(var);
    }

    // Tightens one side; snaps binary bounds onto {0, 1}.
    void tighten(int var, double lo, double up) {
        WorkVar& v = vars_[static_cast<size_t>(var)];
        if (v.fixed || v.substituted) return;
        bool changed = false;
        if (lo > v.lo + kFtol) { v.lo = lo; changed = true; }
        if (up < v.up - kFtol) { v.up = up; changed = true; }
        if (!changed) return;
        if (v.kind == VarKind::Binary) {
            if (v.up < 1.0 - kItol) v.up = 0.0;
            if (v.lo > kItol) v.lo = 1.0;
        }
        if (v.lo > v.up + kItol) {
            mark_infeasible("bound tightening crossed");
            return;
        }
        if (v.up - v.lo <= kFtol) {
            fix(var, 0.5 * (v.lo + v.up));
        } else {
            enqueue_rows_of(var);
        }
    }

    // Folds fixed variables into the rhs and returns the live term count.
    int compact(WorkRow& row) {
        for (auto it = row.terms.begin(); it != row.terms.end();) {
            const WorkVar& v = vars_[static_cast<size_t>(it->first)];
            if (v.fixed) {
                row.rhs -= it->second * v.value;
                it = row.terms.erase(it);
            } else if (std::abs(it->second) < 1e-12) {
                it = row.terms.erase(it);
            } else {
                ++it;
            }
        }
        return static_cast<int>(row.terms.size());
    }

    void process_row(int ri) {
        WorkRow& row = rows_[static_cast<size_t>(ri)];
        if (!row.alive) return;
        const int live = compact(row);
        if (live == 0) {
            const bool ok = row.rel == Relation::LessEqual   ? row.rhs >= -activity_tol(row)
                            : row.rel == Relation::GreaterEqual ? row.rhs <= activity_tol(row)
                                                                : std::abs(row.rhs) <= activity_tol(row);
            if (!ok) mark_infeasible("empty row unsatisfied");
            row.alive = false;
            return;
        }
        if (live == 1) {
            singleton(row);
            return;
        }
        if (live == 2 && row.rel == Relation::Equal && doubleton(ri, row)) return;
        activity(row);
    }

    static double activity_tol(const WorkRow& row) {
        double scale = std::abs(row.rhs);
        for (const auto& [idx, coef] : row.terms) scale = std::max(scale, std::abs(coef));
        return kFtol * (1.0 + scale);
    }

    void singleton(WorkRow& row) {
        const auto [var, coef] = *row.terms.begin();
        const double v = row.rhs / coef;
        switch (row.rel) {
            case Relation::Equal: fix(var, v); break;
            case Relation::LessEqual:
                if (coef > 0) tighten(var, -kInf, v);
                else tighten(var, v, kInf);
                break;
            case Relation::GreaterEqual:
                if (coef > 0) tighten(var, v, kInf);
                else tighten(var, -kInf, v);
                break;
        }
        row.alive = false;
    }

    // a x + b y = r  ->  y = (r - a x) / b, eliminating a continuous y.
    bool doubleton(int ri, WorkRow& row) {
        auto it = row.terms.begin();
        const auto [v1, c1] = *it++;
        const auto [v2, c2] = *it;
        int x, y;
        double a, b;
        const bool cont1 = vars_[static_cast<size_t>(v1)].kind == VarKind::Continuous;
        const bool cont2 = vars_[static_cast<size_t>(v2)].kind == VarKind::Continuous;
        if (cont2 && (!cont1 || std::abs(c2) >= std::abs(c1))) {
            x = v1; a = c1; y = v2; b = c2;
        } else if (cont1) {
            x = v2; a = c2; y = v1; b = c1;
        } else {
            return false;  // two binaries, leave the row to the solver
        }
        if (std::abs(b) < 1e-9) return false;
        const double r = row.rhs;

        // Fold y's bounds onto x: a x = r - b y with y in [ly, uy].
        const WorkVar& yv = vars_[static_cast<size_t>(y)];
        double ax_lo, ax_hi;
        if (b > 0) { ax_lo = r - b * yv.up; ax_hi = r - b * yv.lo; }
        else { ax_lo = r - b * yv.lo; ax_hi = r - b * yv.up; }
        if (a > 0) tighten(x, ax_lo / a, ax_hi / a);
        else if (a < 0) tighten(x, ax_hi / a, ax_lo / a);
        else {
            // Degenerate: the row pins y directly.
            fix(y, r / b);
            row.alive = false;
            return true;
        }
        if (infeasible_) return true;

        // Rewrite every other occurrence of y as r/b - (a/b) x.
        for (int rk : var_rows_[static_cast<size_t>(y)]) {
            if (rk == ri) continue;
            WorkRow& other = rows_[static_cast<size_t>(rk)];
            if (!other.alive) continue;
            auto found = other.terms.find(y);
            if (found == other.terms.end()) continue;
            const double beta = found->second;
            other.terms.erase(found);
            other.rhs -= beta * r / b;
            other.terms[x] += beta * (-a / b);
            var_rows_[static_cast<size_t>(x)].push_back(rk);
            queue_.push_back(rk);
        }
        auto oy = obj_.find(y);
        if (oy != obj_.end()) {
            const double beta = oy->second;
            obj_.erase(oy);
            obj_const_ += beta * r / b;
            obj_[x] += beta * (-a / b);
        }
        vars_[static_cast<size_t>(y)].substituted = true;
        subs_.push_back(Substitution{y, x, a, b, r});
        row.alive = false;
        return true;
    }

    void activity(WorkRow& row) {
        double minact = 0.0, maxact = 0.0;
        for (const auto& [idx, coef] : row.terms) {
            const WorkVar& v = vars_[static_cast<size_t>(idx)];
            minact += coef > 0 ? coef * v.lo : coef * v.up;
            maxact += coef > 0 ? coef * v.up : coef * v.lo;
        }
        const double tol = activity_tol(row);
        const bool need_le = row.rel != Relation::GreaterEqual;  // activity <= rhs required
        const bool need_ge = row.rel != Relation::LessEqual;     // activity >= rhs required
        if (need_le) {
            if (minact > row.rhs + tol) { mark_infeasible("row activity exceeds rhs"); return; }
            if (std::isfinite(minact) && minact >= row.rhs - tol) {
                // Row only holds with every variable at its minimizing bound.
                force_to_bounds(row, true);
                return;
            }
        }
        if (need_ge) {
            if (maxact < row.rhs - tol) { mark_infeasible("row activity below rhs"); return; }
            if (std::isfinite(maxact) && maxact <= row.rhs + tol) {
                force_to_bounds(row, false);
                return;
            }
        }
        const bool redundant =
            (!need_le || (std::isfinite(maxact) && maxact <= row.rhs + tol)) &&
            (!need_ge || (std::isfinite(minact) && minact >= row.rhs - tol));
        if (redundant) row.alive = false;
    }

    void force_to_bounds(WorkRow& row, bool minimizing) {
        std::vector<std::pair<int, double>> fixes;
        for (const auto& [idx, coef] : row.terms) {
            const WorkVar& v = vars_[static_cast<size_t>(idx)];
            const bool at_lo = (coef > 0) == minimizing;
            fixes.emplace_back(idx, at_lo ? v.lo : v.up);
        }
        row.alive = false;
        for (const auto& [idx, value] : fixes) {
            fix(idx, value);
            if (infeasible_) return;
        }
    }

    PresolveResult emit() {
        PresolveResult res;
        res.original_variable_count = src_.variable_count();
        std::vector<int> remap(vars_.size(), -1);
        for (size_t j = 0; j < vars_.size(); ++j) {
            const WorkVar& v = vars_[j];
            if (v.fixed) {
                res.fixed.emplace_back(static_cast<int>(j), v.value);
                continue;
            }
            if (v.substituted) continue;
            const Variable& o = src_.variable(static_cast<int>(j));
            double lo = v.lo, up = v.up;
            if (v.kind == VarKind::Binary) { lo = std::max(lo, 0.0); up = std::min(up, 1.0); }
            remap[j] = res.problem.add_variable(o.name, lo, up, v.kind);
            res.kept.push_back(static_cast<int>(j));
        }
        int ri = 0;
        for (auto& row : rows_) {
            ++ri;
            if (!row.alive) continue;
            if (compact(row) == 0) {
                const double tol = activity_tol(row);
                const bool ok = row.rel == Relation::LessEqual ? row.rhs >= -tol
                                : row.rel == Relation::GreaterEqual ? row.rhs <= tol
                                                                    : std::abs(row.rhs) <= tol;
                if (!ok) return fail("fully fixed row unsatisfied");
                continue;
            }
            std::vector<std::pair<int, double>> terms;
            terms.reserve(row.terms.size());
            for (const auto& [idx, coef] : row.terms) {
                if (remap[static_cast<size_t>(idx)] < 0)
                    throw std::runtime_error("presolve kept a row over an eliminated variable");
                terms.emplace_back(remap[static_cast<size_t>(idx)], coef);
            }
            res.problem.add_constraint(src_.constraint(ri - 1).name, std::move(terms), row.rel,
                                       row.rhs);
        }
        std::vector<std::pair<int, double>> obj_terms;
        double constant = obj_const_;
        for (const auto& [idx, coef] : obj_) {
            const WorkVar& v = vars_[static_cast<size_t>(idx)];
            if (v.fixed) {
                constant += coef * v.value;
            } else if (!v.substituted) {
                obj_terms.emplace_back(remap[static_cast<size_t>(idx)], coef);
            } else {
                throw std::runtime_error("presolve objective references an eliminated variable");
            }
        }
        res.problem.set_objective(src_.objective_sense(), std::move(obj_terms), constant);
        res.substitutions = std::move(subs_);
        return res;
    }

    const MilpProblem& src_;
    std::vector<WorkVar> vars_;
    std::vector<WorkRow> rows_;
    std::vector<std::vector<int>> var_rows_;
    std::map<int, double> obj_;
    double obj_const_ = 0.0;
    std::deque<int> queue_;
    std::vector<Substitution> subs_;
    bool infeasible_ = false;
    std::string message_;
};

}  // namespace

std::vector<double> PresolveResult::postsolve(const std::vector<double>& reduced_values) const {
    if (reduced_values.size() != kept.size())
        throw std::runtime_error("postsolve: reduced solution size mismatch");
    std::vector<double> full(static_cast<size_t>(original_variable_count), 0.0);
    for (size_t j = 0; j < kept.size(); ++j)
        full[static_cast<size_t>(kept[j])] = reduced_values[j];
    for (const auto& [idx, value] : fixed) full[static_cast<size_t>(idx)] = value;
    for (auto it = substitutions.rbegin(); it != substitutions.rend(); ++it)
        full[static_cast<size_t>(it->var)] =
            (it->r - it->a * full[static_cast<size_t>(it->with)]) / it->b;
    return full;
}

PresolveResult presolve(const MilpProblem& problem) {
    problem.validate();
    Presolver ps(problem);
    return ps.run();
}

}  // namespace mipred::milp
