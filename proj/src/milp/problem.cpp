#include "milp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mipred::milp {

namespace {

void merge_terms(std::vector<std::pair<int, double>>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    size_t out = 0;
    for (size_t i = 0; i < terms.size();) {
        int idx = terms[i].first;
        double coef = 0.0;
        while (i < terms.size() && terms[i].first == idx) {
            coef += terms[i].second;
            ++i;
        }
        if (coef != 0.0) terms[out++] = {idx, coef};
    }
    terms.resize(out);
}

}  // namespace

int MilpProblem::add_variable(const std::string& name, double lower, double upper, VarKind kind) {
    if (name.empty()) throw std::runtime_error("variable name must not be empty");
    if (index_.count(name)) throw std::runtime_error("duplicate variable name: " + name);
    if (std::isnan(lower) || std::isnan(upper))
        throw std::runtime_error("NaN bound on variable " + name);
    if (lower > upper)
        throw std::runtime_error("lower bound exceeds upper bound on variable " + name);
    if (kind == VarKind::Binary && (lower < 0.0 || upper > 1.0))
        throw std::runtime_error("binary variable " + name + " must have bounds within [0, 1]");
    int idx = static_cast<int>(vars_.size());
    vars_.push_back(Variable{name, lower, upper, kind});
    index_.emplace(name, idx);
    return idx;
}

int MilpProblem::add_constraint(const std::string& name, std::vector<std::pair<int, double>> terms,
                                Relation rel, double rhs) {
    for (const auto& [idx, coef] : terms) {
        if (idx < 0 || idx >= variable_count())
            throw std::runtime_error("constraint " + name + " references undeclared variable");
        if (!std::isfinite(coef))
            throw std::runtime_error("constraint " + name + " has a non-finite coefficient");
    }
    if (!std::isfinite(rhs)) throw std::runtime_error("constraint " + name + " has non-finite rhs");
    merge_terms(terms);
    rows_.push_back(Constraint{name, std::move(terms), rel, rhs});
    return static_cast<int>(rows_.size()) - 1;
}

void MilpProblem::set_objective(Sense sense, std::vector<std::pair<int, double>> terms,
                                double constant) {
    for (const auto& [idx, coef] : terms) {
        if (idx < 0 || idx >= variable_count())
            throw std::runtime_error("objective references undeclared variable");
        if (!std::isfinite(coef)) throw std::runtime_error("objective has a non-finite coefficient");
    }
    if (!std::isfinite(constant)) throw std::runtime_error("objective constant is non-finite");
    merge_terms(terms);
    sense_ = sense;
    obj_terms_ = std::move(terms);
    obj_constant_ = constant;
}

int MilpProblem::binary_count() const {
    int n = 0;
    for (const auto& v : vars_)
        if (v.kind == VarKind::Binary) ++n;
    return n;
}

std::optional<int> MilpProblem::find_variable(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double MilpProblem::value_of(const std::vector<double>& values, const std::string& name) const {
    auto idx = find_variable(name);
    if (!idx) throw std::runtime_error("unknown variable: " + name);
    return values.at(static_cast<size_t>(*idx));
}

void MilpProblem::validate() const {
    for (const auto& v : vars_) {
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper)
            throw std::runtime_error("invalid bounds on variable " + v.name);
        if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0))
            throw std::runtime_error("binary variable " + v.name + " out of [0, 1]");
    }
    for (const auto& r : rows_) {
        for (const auto& [idx, coef] : r.terms) {
            if (idx < 0 || idx >= variable_count())
                throw std::runtime_error("constraint " + r.name + " references undeclared variable");
            if (!std::isfinite(coef))
                throw std::runtime_error("constraint " + r.name + " has a non-finite coefficient");
        }
        if (!std::isfinite(r.rhs))
            throw std::runtime_error("constraint " + r.name + " has non-finite rhs");
    }
    for (const auto& [idx, coef] : obj_terms_) {
        if (idx < 0 || idx >= variable_count())
            throw std::runtime_error("objective references undeclared variable");
        if (!std::isfinite(coef)) throw std::runtime_error("objective coefficient non-finite");
    }
}

}  // namespace mipred::milp
