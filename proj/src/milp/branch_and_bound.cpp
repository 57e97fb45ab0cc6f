#include "milp/branch_and_bound.hpp"

#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "milp/presolve.hpp"
#include "milp/simplex.hpp"

namespace mipred::milp {

namespace {

struct Node {
    double bound;      // parent relaxation value, objective sense = minimize
    long seq;          // FIFO tie-break
    std::vector<std::pair<int, int>> fixes;  // (binary column, 0 or 1)
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;  // smaller bound first
        return a.seq > b.seq;
    }
};

double relative_gap(double incumbent, double bound) {
    const double gap = incumbent - bound;
    if (gap <= 0.0) return 0.0;
    return gap / std::max(std::abs(incumbent), 1e-10);
}

}  // namespace

MilpSolution solve_milp(const MilpProblem& problem, const SolverConfig& config) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto out_of_time = [&] {
        if (config.time_limit_seconds <= 0.0) return false;
        return std::chrono::duration<double>(clock::now() - start).count() >
               config.time_limit_seconds;
    };

    PresolveResult pre = presolve(problem);
    MilpSolution sol;
    if (pre.infeasible) {
        sol.status = MilpStatus::Infeasible;
        return sol;
    }
    const MilpProblem& red = pre.problem;
    if (red.constraint_count() > kDenseRowCeiling || red.variable_count() > kDenseColCeiling)
        throw std::runtime_error(
            "presolved problem exceeds the dense simplex ceiling; export it with write_lp_file");

    const bool maximize = problem.objective_sense() == Sense::Maximize;
    if (red.variable_count() == 0) {
        sol.status = MilpStatus::Optimal;
        sol.objective = red.objective_constant();
        sol.best_bound = sol.objective;
        sol.values = pre.postsolve({});
        sol.has_incumbent = true;
        return sol;
    }

    StandardForm form = build_standard_form(red);
    std::vector<int> binaries;
    for (int j = 0; j < red.variable_count(); ++j)
        if (red.variable(j).kind == VarKind::Binary) binaries.push_back(j);

    // Internal objective space: minimize; constant excluded until reporting.
    const auto node_lp = [&](const std::vector<std::pair<int, int>>& fixes) {
        Eigen::VectorXd lo = form.lo, up = form.up;
        for (const auto& [col, val] : fixes) {
            lo(col) = static_cast<double>(val);
            up(col) = static_cast<double>(val);
        }
        return solve_standard_form(form, lo, up, config);
    };

    double incumbent = kInf;
    Eigen::VectorXd incumbent_x;
    bool have_incumbent = false;
    long nodes = 0;
    long seq = 0;
    bool hit_node_limit = false;
    bool hit_time_limit = false;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{-kInf, seq++, {}});

    while (!open.empty()) {
        const double frontier = open.top().bound;
        if (have_incumbent && relative_gap(incumbent, frontier) <= config.mipgap) break;
        if (nodes >= config.node_limit) { hit_node_limit = true; break; }
        if (out_of_time()) { hit_time_limit = true; break; }

        Node node = open.top();
        open.pop();
        ++nodes;
        // Prune against the incumbent; the epsilon keeps equal-valued
        // optima reachable while cutting true ties.
        const double prune_eps = 1e-12 * std::max(1.0, std::abs(incumbent));
        if (have_incumbent && node.bound >= incumbent - prune_eps) continue;

        SimplexOutcome lp = node_lp(node.fixes);
        if (lp.status == LpStatus::Infeasible) continue;
        if (lp.status == LpStatus::Unbounded) {
            if (node.fixes.empty())
                throw std::runtime_error("MILP relaxation is unbounded");
            continue;  // cannot happen below the root with bounded binaries
        }
        const double bound = std::max(lp.objective, node.bound);
        if (have_incumbent && bound >= incumbent - prune_eps) continue;

        // Most fractional binary, lowest index on ties.
        int branch_col = -1;
        double best_frac = config.integrality_tol;
        for (int col : binaries) {
            const double v = lp.x(col);
            if (std::min(std::abs(v), std::abs(v - 1.0)) <= config.integrality_tol) continue;
            const double score = std::min(v, 1.0 - v);
            if (score > best_frac + 1e-12) {
                best_frac = score;
                branch_col = col;
            }
        }

        if (branch_col < 0) {
            // Integral within tolerance: pin the binaries and re-solve so the
            // incumbent objective is the exact fixed-assignment LP value.
            std::vector<std::pair<int, int>> pin = node.fixes;
            for (int col : binaries) {
                const double v = lp.x(col);
                pin.emplace_back(col, v >= 0.5 ? 1 : 0);
            }
            SimplexOutcome exact = node_lp(pin);
            const SimplexOutcome& pick = exact.status == LpStatus::Optimal ? exact : lp;
            if (pick.objective < incumbent - prune_eps || !have_incumbent) {
                incumbent = pick.objective;
                incumbent_x = pick.x;
                have_incumbent = true;
            }
            continue;
        }

        Node down{bound, seq++, node.fixes};
        down.fixes.emplace_back(branch_col, 0);
        Node up{bound, seq++, node.fixes};
        up.fixes.emplace_back(branch_col, 1);
        open.push(std::move(down));
        open.push(std::move(up));
    }

    double frontier = incumbent;
    if (!open.empty()) frontier = std::min(frontier, open.top().bound);
    sol.nodes_explored = nodes;
    if (!have_incumbent) {
        sol.status = (hit_node_limit || hit_time_limit) ? MilpStatus::NodeLimit
                                                        : MilpStatus::Infeasible;
        return sol;
    }
    sol.has_incumbent = true;
    sol.relative_gap = relative_gap(incumbent, frontier);
    if (sol.relative_gap <= config.mipgap)
        sol.status = MilpStatus::Optimal;
    else
        sol.status = hit_node_limit ? MilpStatus::NodeLimit : MilpStatus::GapLimit;

    std::vector<double> reduced(incumbent_x.data(), incumbent_x.data() + incumbent_x.size());
    sol.values = pre.postsolve(reduced);
    const double constant = red.objective_constant();
    if (maximize) {
        sol.objective = -incumbent + constant;
        sol.best_bound = -frontier + constant;
    } else {
        sol.objective = incumbent + constant;
        sol.best_bound = frontier + constant;
    }
    return sol;
}

}  // namespace mipred::milp
