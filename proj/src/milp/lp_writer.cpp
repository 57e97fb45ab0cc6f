#include "milp/lp_writer.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace mipred::milp {

namespace {

// LP format identifiers: must not start with a digit or '.', and must avoid
// operators and whitespace. Our generated names are already compliant; user
// names are validated rather than mangled.
void check_name(const std::string& name) {
    if (name.empty()) throw std::runtime_error("LP export: empty name");
    if (std::isdigit(static_cast<unsigned char>(name[0])) || name[0] == '.')
        throw std::runtime_error("LP export: name may not start with a digit: " + name);
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) continue;
        if (c == '_' || c == '.' || c == '[' || c == ']' || c == '(' || c == ')' || c == '#')
            continue;
        throw std::runtime_error("LP export: unsupported character in name: " + name);
    }
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_terms(std::ostream& out, const std::vector<std::pair<int, double>>& terms,
                 const MilpProblem& p, bool lead_written) {
    bool first = !lead_written;
    for (const auto& [idx, coef] : terms) {
        if (coef == 0.0) continue;
        if (first) {
            out << (coef < 0 ? "- " : "");
            first = false;
        } else {
            out << (coef < 0 ? " - " : " + ");
        }
        const double mag = std::abs(coef);
        if (mag != 1.0) out << num(mag) << ' ';
        out << p.variable(idx).name;
    }
    if (first) out << '0';
}

}  // namespace

void write_lp(const MilpProblem& problem, std::ostream& out) {
    problem.validate();
    std::unordered_set<std::string> seen;
    for (int j = 0; j < problem.variable_count(); ++j) {
        const std::string& name = problem.variable(j).name;
        check_name(name);
        if (!seen.insert(name).second)
            throw std::runtime_error("LP export: variable name collision: " + name);
    }
    std::unordered_set<std::string> row_seen;
    for (int i = 0; i < problem.constraint_count(); ++i) {
        const std::string& name = problem.constraint(i).name;
        check_name(name);
        if (!row_seen.insert(name).second)
            throw std::runtime_error("LP export: constraint name collision: " + name);
    }

    out << (problem.objective_sense() == Sense::Maximize ? "Maximize\n" : "Minimize\n");
    out << " obj: ";
    write_terms(out, problem.objective_terms(), problem, false);
    if (problem.objective_constant() != 0.0) {
        const double c = problem.objective_constant();
        out << (c < 0 ? " - " : " + ") << num(std::abs(c));
    }
    out << "\nSubject To\n";
    for (int i = 0; i < problem.constraint_count(); ++i) {
        const Constraint& row = problem.constraint(i);
        out << ' ' << row.name << ": ";
        write_terms(out, row.terms, problem, false);
        switch (row.rel) {
            case Relation::LessEqual: out << " <= "; break;
            case Relation::GreaterEqual: out << " >= "; break;
            case Relation::Equal: out << " = "; break;
        }
        out << num(row.rhs) << '\n';
    }
    out << "Bounds\n";
    for (int j = 0; j < problem.variable_count(); ++j) {
        const Variable& v = problem.variable(j);
        if (v.kind == VarKind::Binary) continue;  // declared below
        const bool lo_inf = std::isinf(v.lower);
        const bool up_inf = std::isinf(v.upper);
        if (lo_inf && up_inf) {
            out << ' ' << v.name << " free\n";
        } else if (lo_inf) {
            out << ' ' << v.name << " <= " << num(v.upper) << '\n';
        } else if (up_inf) {
            out << ' ' << v.name << " >= " << num(v.lower) << '\n';
        } else {
            out << ' ' << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << '\n';
        }
    }
    bool any_binary = false;
    for (int j = 0; j < problem.variable_count(); ++j)
        if (problem.variable(j).kind == VarKind::Binary) { any_binary = true; break; }
    if (any_binary) {
        out << "Binaries\n";
        int on_line = 0;
        for (int j = 0; j < problem.variable_count(); ++j) {
            if (problem.variable(j).kind != VarKind::Binary) continue;
            out << ' ' << problem.variable(j).name;
            if (++on_line == 8) {
                out << '\n';
                on_line = 0;
            }
        }
        if (on_line) out << '\n';
    }
    out << "End\n";
}

void write_lp_file(const MilpProblem& problem, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_lp(problem, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace mipred::milp
