#pragma once

#include "revham/scalar.hpp"

#include <string>
#include <vector>

namespace revham {

struct parse_error : std::runtime_error {
    int line, col;
    parse_error(const std::string& msg, int l, int c)
        : std::runtime_error(msg + " at " + std::to_string(l) + ":" + std::to_string(c)), line(l), col(c)
    {}
};

struct SourceSpan {
    int line = 1, col = 1;
};

/// Expression tree for closed-form Hamiltonians: numbers, named variables,
/// + - * /, integer powers, sqrt. Nodes live in a pool; the tree is a value.
class ExprAST {
public:
    enum class Op { constant, variable, add, sub, mul, div, pow, sqrt, neg };

    struct Node {
        Op op;
        Rat value;        // constant
        int var = -1;     // variable index
        int a = -1, b = -1;
        int exponent = 0; // pow
        SourceSpan span;
    };

    int add_node(Node n)
    {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    const Node& node(int i) const { return nodes_[i]; }
    int root() const { return root_; }
    void set_root(int r) { root_ = r; }
    std::size_t size() const { return nodes_.size(); }

    /// Structural equality of the rooted trees (spans ignored).
    bool same_structure(const ExprAST& o) const { return same(root_, o, o.root_); }

private:
    bool same(int i, const ExprAST& o, int j) const
    {
        const Node &x = nodes_[i], &y = o.nodes_[j];
        if (x.op != y.op || x.var != y.var || x.exponent != y.exponent)
            return false;
        if (x.op == Op::constant && x.value != y.value)
            return false;
        if (x.a >= 0 && !same(x.a, o, y.a))
            return false;
        if (x.b >= 0 && !same(x.b, o, y.b))
            return false;
        return (x.a >= 0) == (y.a >= 0) && (x.b >= 0) == (y.b >= 0);
    }

    std::vector<Node> nodes_;
    int root_ = -1;
};

/// Parse with the given variable names (position = index) and bound
/// constants. Unknown identifiers, malformed syntax, and non-integer
/// exponents are reported with line/column.
ExprAST parse_hamiltonian(const std::string& text, const std::vector<std::string>& variables,
                          const std::vector<std::pair<std::string, Rat>>& constants);

/// Canonical fully-parenthesized form; parse(print(e)) reproduces the tree.
std::string print_expr(const ExprAST& e, const std::vector<std::string>& variables);

double eval_expr(const ExprAST& e, const std::vector<double>& point);

} // namespace revham
