#include "milp/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace mipred::milp {

StandardForm build_standard_form(const MilpProblem& problem) {
    problem.validate();
    StandardForm f;
    const int ns = problem.variable_count();
    const int m = problem.constraint_count();
    f.A.setZero(m, ns);
    f.b.setZero(m);
    f.cost.setZero(ns);
    f.lo.resize(ns);
    f.up.resize(ns);
    f.rel.resize(static_cast<size_t>(m));
    for (int j = 0; j < ns; ++j) {
        f.lo(j) = problem.variable(j).lower;
        f.up(j) = problem.variable(j).upper;
    }
    for (int i = 0; i < m; ++i) {
        const Constraint& row = problem.constraint(i);
        for (const auto& [idx, coef] : row.terms) f.A(i, idx) = coef;
        f.b(i) = row.rhs;
        f.rel[static_cast<size_t>(i)] = row.rel;
    }
    f.maximize = problem.objective_sense() == Sense::Maximize;
    for (const auto& [idx, coef] : problem.objective_terms())
        f.cost(idx) = f.maximize ? -coef : coef;
    f.constant = problem.objective_constant();
    return f;
}

namespace {

enum ColState : uint8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2, kFree = 3 };

class BoundedSimplex {
public:
    BoundedSimplex(const StandardForm& form, const Eigen::VectorXd& lo, const Eigen::VectorXd& up,
                   const SolverConfig& cfg)
        : cfg_(cfg), m_(static_cast<int>(form.A.rows())), ns_(static_cast<int>(form.A.cols())) {
        nslack_ = m_;
        // Artificial columns are allocated lazily after the crash basis.
        T_.setZero(m_, ns_ + nslack_ + m_);
        lo_.setConstant(ns_ + nslack_ + m_, 0.0);
        up_.setConstant(ns_ + nslack_ + m_, 0.0);
        val_.setConstant(ns_ + nslack_ + m_, 0.0);
        state_.assign(static_cast<size_t>(ns_ + nslack_ + m_), kAtLower);
        T_.block(0, 0, m_, ns_) = form.A;
        b_ = form.b;
        lo_.head(ns_) = lo;
        up_.head(ns_) = up;
        for (int i = 0; i < m_; ++i) {
            const int sj = ns_ + i;
            T_(i, sj) = 1.0;
            switch (form.rel[static_cast<size_t>(i)]) {
                case Relation::LessEqual: lo_(sj) = 0.0; up_(sj) = kInf; break;
                case Relation::GreaterEqual: lo_(sj) = -kInf; up_(sj) = 0.0; break;
                case Relation::Equal: lo_(sj) = 0.0; up_(sj) = 0.0; break;
            }
        }
        for (int j = 0; j < ns_ + nslack_; ++j) init_nonbasic(j);
        basis_.assign(static_cast<size_t>(m_), -1);
        xB_.setZero(m_);
    }

    LpStatus run(const Eigen::VectorXd& structural_cost) {
        crash_basis();
        const double feas_scale = 1.0 + (b_.size() ? b_.cwiseAbs().maxCoeff() : 0.0);
        if (narts_ > 0) {
            Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols_);
            phase1.segment(ns_ + nslack_, narts_).setOnes();
            LpStatus st = iterate(phase1);
            if (st != LpStatus::Optimal)
                throw std::runtime_error("simplex: phase 1 did not terminate cleanly");
            if (objective_internal(phase1) > cfg_.feasibility_tol * feas_scale)
                return LpStatus::Infeasible;
            // Pin artificials at zero; any still basic sit at a degenerate 0.
            for (int a = 0; a < narts_; ++a) {
                const int j = ns_ + nslack_ + a;
                lo_(j) = up_(j) = 0.0;
                if (state_[static_cast<size_t>(j)] != kBasic) {
                    state_[static_cast<size_t>(j)] = kAtLower;
                    val_(j) = 0.0;
                }
            }
        }
        Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols_);
        cost.head(ns_) = structural_cost;
        return iterate(cost);
    }

    double objective(const Eigen::VectorXd& structural_cost) const {
        double v = 0.0;
        for (int j = 0; j < ns_; ++j) v += structural_cost(j) * value(j);
        return v;
    }

    Eigen::VectorXd structural_values() const {
        Eigen::VectorXd x(ns_);
        for (int j = 0; j < ns_; ++j) x(j) = value(j);
        return x;
    }

    long iterations() const { return iters_; }

private:
    double value(int j) const {
        if (state_[static_cast<size_t>(j)] == kBasic) {
            for (int i = 0; i < m_; ++i)
                if (basis_[static_cast<size_t>(i)] == j) return xB_(i);
        }
        return val_(j);
    }

    void init_nonbasic(int j) {
        if (std::isfinite(lo_(j))) {
            state_[static_cast<size_t>(j)] = kAtLower;
            val_(j) = lo_(j);
        } else if (std::isfinite(up_(j))) {
            state_[static_cast<size_t>(j)] = kAtUpper;
            val_(j) = up_(j);
        } else {
            state_[static_cast<size_t>(j)] = kFree;
            val_(j) = 0.0;
        }
    }

    // Crash: slack basic where its residual value is feasible, otherwise an
    // artificial column on a row flipped to a nonnegative residual.
    void crash_basis() {
        narts_ = 0;
        for (int i = 0; i < m_; ++i) {
            // Slacks start at zero, so the residual is b minus the
            // structural part only.
            double resid = b_(i);
            for (int j = 0; j < ns_; ++j) resid -= T_(i, j) * val_(j);
            const int sj = ns_ + i;
            if (resid >= lo_(sj) - 1e-11 && resid <= up_(sj) + 1e-11) {
                basis_[static_cast<size_t>(i)] = sj;
                state_[static_cast<size_t>(sj)] = kBasic;
                xB_(i) = resid;
            } else {
                if (resid < 0.0) {
                    T_.row(i) = -T_.row(i);
                    b_(i) = -b_(i);
                    resid = -resid;
                }
                const int aj = ns_ + nslack_ + narts_;
                T_(i, aj) = 1.0;
                lo_(aj) = 0.0;
                up_(aj) = kInf;
                basis_[static_cast<size_t>(i)] = aj;
                state_[static_cast<size_t>(aj)] = kBasic;
                xB_(i) = resid;
                ++narts_;
            }
        }
        ncols_ = ns_ + nslack_ + narts_;
    }

    double objective_internal(const Eigen::VectorXd& cost) const {
        double v = 0.0;
        for (int i = 0; i < m_; ++i) v += cost(basis_[static_cast<size_t>(i)]) * xB_(i);
        for (int j = 0; j < ncols_; ++j)
            if (state_[static_cast<size_t>(j)] != kBasic) v += cost(j) * val_(j);
        return v;
    }

    LpStatus iterate(const Eigen::VectorXd& cost) {
        Eigen::VectorXd cB(m_);
        for (int i = 0; i < m_; ++i) cB(i) = cost(basis_[static_cast<size_t>(i)]);
        Eigen::VectorXd d = cost.head(ncols_) -
                            (T_.leftCols(ncols_).transpose() * cB);
        double obj = objective_internal(cost);
        bool bland = false;
        int stall = 0;
        const int stall_threshold = 200 + 2 * (m_ + ncols_);
        const long iter_cap = 20000L + 200L * (m_ + ncols_);
        const double dtol = 1e-9;
        const double ptol = 1e-9;

        while (true) {
            if (iters_ > iter_cap)
                throw std::runtime_error("simplex: iteration cap exceeded (numeric breakdown)");

            int q = -1;
            int dir = 0;
            double best_score = dtol;
            for (int j = 0; j < ncols_; ++j) {
                const uint8_t st = state_[static_cast<size_t>(j)];
                if (st == kBasic) continue;
                if (lo_(j) == up_(j)) continue;  // fixed, never enters
                int cand_dir = 0;
                if (st == kAtLower && d(j) < -dtol) cand_dir = 1;
                else if (st == kAtUpper && d(j) > dtol) cand_dir = -1;
                else if (st == kFree && std::abs(d(j)) > dtol) cand_dir = d(j) < 0.0 ? 1 : -1;
                if (cand_dir == 0) continue;
                if (bland) { q = j; dir = cand_dir; break; }
                if (std::abs(d(j)) > best_score) {
                    best_score = std::abs(d(j));
                    q = j;
                    dir = cand_dir;
                }
            }
            if (q < 0) return LpStatus::Optimal;

            // Ratio test: bound flip of q competes with basic variables
            // hitting their bounds.
            double theta = kInf;
            bool flip = false;
            if (std::isfinite(lo_(q)) && std::isfinite(up_(q))) {
                theta = up_(q) - lo_(q);
                flip = true;
            }
            int r = -1;
            bool leave_to_upper = false;
            const double tie = 1e-10;
            for (int i = 0; i < m_; ++i) {
                const double alpha = T_(i, q) * dir;
                const int bi = basis_[static_cast<size_t>(i)];
                double cand;
                bool to_upper;
                if (alpha > ptol) {
                    cand = (xB_(i) - lo_(bi)) / alpha;
                    to_upper = false;
                } else if (alpha < -ptol) {
                    cand = (up_(bi) - xB_(i)) / (-alpha);
                    to_upper = true;
                } else {
                    continue;
                }
                if (!std::isfinite(cand)) continue;
                if (cand < 0.0) cand = 0.0;  // basic marginally past its bound
                bool take = false;
                if (cand < theta - tie) {
                    take = true;
                } else if (cand < theta + tie) {
                    if (r < 0) {
                        // Ties the bound-flip limit: the pivot wins only when
                        // strictly smaller, a flip is cheaper otherwise.
                        take = !flip || cand < theta;
                    } else if (bland) {
                        take = basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(r)];
                    } else {
                        take = std::abs(T_(i, q)) > std::abs(T_(r, q));
                    }
                }
                if (take) {
                    theta = std::min(theta, cand);
                    r = i;
                    flip = false;
                    leave_to_upper = to_upper;
                }
            }
            if (!std::isfinite(theta)) return LpStatus::Unbounded;

            const double delta = dir * theta;
            const double gain = d(q) * delta;  // <= 0 for an improving step
            if (r < 0) {
                // Bound flip, basis unchanged.
                for (int i = 0; i < m_; ++i) xB_(i) -= T_(i, q) * delta;
                state_[static_cast<size_t>(q)] = state_[static_cast<size_t>(q)] == kAtLower
                                                     ? kAtUpper
                                                     : kAtLower;
                val_(q) = state_[static_cast<size_t>(q)] == kAtLower ? lo_(q) : up_(q);
            } else {
                for (int i = 0; i < m_; ++i)
                    if (i != r) xB_(i) -= T_(i, q) * delta;
                const double enter_val = val_(q) + delta;
                const int leaving = basis_[static_cast<size_t>(r)];
                state_[static_cast<size_t>(leaving)] = leave_to_upper ? kAtUpper : kAtLower;
                val_(leaving) = leave_to_upper ? up_(leaving) : lo_(leaving);
                const double piv = T_(r, q);
                T_.row(r).head(ncols_) /= piv;
                for (int i = 0; i < m_; ++i) {
                    if (i == r) continue;
                    const double factor = T_(i, q);
                    if (factor != 0.0) T_.row(i).head(ncols_) -= factor * T_.row(r).head(ncols_);
                }
                const double dq = d(q);
                if (dq != 0.0) d.head(ncols_) -= dq * T_.row(r).head(ncols_).transpose();
                d(q) = 0.0;
                basis_[static_cast<size_t>(r)] = q;
                state_[static_cast<size_t>(q)] = kBasic;
                xB_(r) = enter_val;
            }
            obj += gain;
            ++iters_;
            if (gain > -1e-13 * (1.0 + std::abs(obj))) {
                if (++stall > stall_threshold) bland = true;
            } else {
                stall = 0;
            }
        }
    }

    SolverConfig cfg_;
    int m_;
    int ns_;
    int nslack_ = 0;
    int narts_ = 0;
    int ncols_ = 0;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> T_;
    Eigen::VectorXd b_;
    Eigen::VectorXd lo_, up_, val_, xB_;
    std::vector<int> basis_;
    std::vector<uint8_t> state_;
    long iters_ = 0;
};

}  // namespace

SimplexOutcome solve_standard_form(const StandardForm& form, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& up, const SolverConfig& config) {
    for (int j = 0; j < lo.size(); ++j)
        if (lo(j) > up(j))
            return SimplexOutcome{LpStatus::Infeasible, 0.0, Eigen::VectorXd(), 0};
    BoundedSimplex solver(form, lo, up, config);
    SimplexOutcome out;
    out.status = solver.run(form.cost);
    out.iterations = solver.iterations();
    if (out.status == LpStatus::Optimal) {
        out.objective = solver.objective(form.cost);
        out.x = solver.structural_values();
    }
    return out;
}

LpSolution solve_lp(const MilpProblem& problem, const SolverConfig& config) {
    if (problem.constraint_count() > kDenseRowCeiling ||
        problem.variable_count() > kDenseColCeiling)
        throw std::runtime_error(
            "problem exceeds the dense simplex ceiling; export it with write_lp_file instead");
    StandardForm form = build_standard_form(problem);
    SimplexOutcome out = solve_standard_form(form, form.lo, form.up, config);
    LpSolution sol;
    sol.iterations = out.iterations;
    switch (out.status) {
        case LpStatus::Optimal: {
            sol.status = LpStatus::Optimal;
            double v = out.objective;
            if (form.maximize) v = -v;
            sol.objective = v + form.constant;
            sol.values.assign(out.x.data(), out.x.data() + out.x.size());
            break;
        }
        case LpStatus::Infeasible: sol.status = LpStatus::Infeasible; break;
        case LpStatus::Unbounded: sol.status = LpStatus::Unbounded; break;
    }
    return sol;
}

}  // namespace mipred::milp
