#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace mipred::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Hard ceiling for the dense simplex tableau. Models beyond this must be
// exported through write_lp_file and handed to an external solver.
inline constexpr int kDenseRowCeiling = 5000;
inline constexpr int kDenseColCeiling = 5000;

enum class VarKind { Continuous, Binary };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    VarKind kind = VarKind::Continuous;
};

// Sparse row: (variable index, coefficient) pairs, unique indices.
struct Constraint {
    std::string name;
    std::vector<std::pair<int, double>> terms;
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };
enum class MilpStatus { Optimal, Infeasible, GapLimit, NodeLimit };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> values;  // indexed like MilpProblem variables
    long iterations = 0;
};

struct MilpSolution {
    MilpStatus status = MilpStatus::Infeasible;
    double objective = 0.0;      // incumbent objective when one exists
    double best_bound = 0.0;
    double relative_gap = 0.0;
    std::vector<double> values;
    long nodes_explored = 0;
    bool has_incumbent = false;
};

struct SolverConfig {
    double mipgap = 1e-4;            // relative gap for MILP termination
    double feasibility_tol = 1e-7;
    double integrality_tol = 1e-6;
    long node_limit = 500000;
    double time_limit_seconds = 0.0; // 0 disables the limit
};

// Mixed binary-continuous linear program. The only integrality the type can
// express is binary; general integer variables are rejected by construction.
class MilpProblem {
public:
    // Returns the new variable's index. Throws on duplicate or empty name,
    // NaN bounds, lower > upper, or binary bounds outside [0, 1].
    int add_variable(const std::string& name, double lower, double upper, VarKind kind);

    // Terms must reference declared variables; duplicate indices are merged.
    int add_constraint(const std::string& name, std::vector<std::pair<int, double>> terms,
                       Relation rel, double rhs);

    void set_objective(Sense sense, std::vector<std::pair<int, double>> terms,
                       double constant = 0.0);

    int variable_count() const { return static_cast<int>(vars_.size()); }
    int constraint_count() const { return static_cast<int>(rows_.size()); }
    int binary_count() const;

    const Variable& variable(int i) const { return vars_.at(static_cast<size_t>(i)); }
    Variable& variable(int i) { return vars_.at(static_cast<size_t>(i)); }
    const Constraint& constraint(int i) const { return rows_.at(static_cast<size_t>(i)); }

    std::optional<int> find_variable(const std::string& name) const;

    Sense objective_sense() const { return sense_; }
    const std::vector<std::pair<int, double>>& objective_terms() const { return obj_terms_; }
    double objective_constant() const { return obj_constant_; }

    double value_of(const std::vector<double>& values, const std::string& name) const;

    // Checks every structural invariant (finite coefficients, sane bounds,
    // term indices in range). Throws std::runtime_error on violation.
    void validate() const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    std::unordered_map<std::string, int> index_;
    Sense sense_ = Sense::Minimize;
    std::vector<std::pair<int, double>> obj_terms_;
    double obj_constant_ = 0.0;
};

}  // namespace mipred::milp
