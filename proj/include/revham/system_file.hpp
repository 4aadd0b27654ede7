#pragma once

#include "revham/expr.hpp"
#include "revham/involution.hpp"
#include "revham/linalg.hpp"

#include <string>
#include <vector>

namespace revham {

struct system_file_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One dynamical system: a closed-form Hamiltonian with involution,
/// symplectic form, truncation order, precision mode and expansion center.
///
/// Text format — key:value header lines, then the Hamiltonian:
///   dimension: 4
///   order: 4
///   mode: exact            # or float
///   involution: R0         # Id | -Id | R0 | R1 | R2 | diag(...) | rows [[..],..]
///   symplectic: standard   # standard | canonical | rows [[..],..]
///   center: 0 0 0 0
///   variables: x u y v     # optional; defaults x1 y1 x2 y2 (x3 y3)
///   constants: q=1 a=1 b=0 # optional, bound in the expression
///   H = <expression>       # remaining lines are joined
struct SystemFile {
    int dimension = 0;
    int order = 4;
    std::string mode = "exact"; // "exact" | "float"
    Mat<Rat> involution;
    std::string involution_spec;
    Mat<Rat> symplectic;
    std::string symplectic_spec = "standard";
    std::vector<Rat> center;
    std::vector<std::string> variables;
    std::vector<std::pair<std::string, Rat>> constants;
    std::string h_text;
    ExprAST h_ast;
};

SystemFile parse_system(const std::string& text);
SystemFile load_system(const std::string& path);
std::string dump_system_text(const SystemFile& s);
void dump_system(const SystemFile& s, const std::string& path);

std::vector<std::string> default_variable_names(int dimension);

} // namespace revham
