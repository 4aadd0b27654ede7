#include "revham/expr.hpp"

#include <cctype>
#include <cmath>

namespace revham {

namespace {

struct Token {
    enum class Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
    Kind kind;
    std::string text;
    Rat value;
    int line, col;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) {}

    Token next()
    {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= s_.size()) {
            t.kind = Token::Kind::end;
            return t;
        }
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            std::string digits, frac;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                digits += advance();
            if (pos_ < s_.size() && s_[pos_] == '.') {
                advance();
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    frac += advance();
                if (frac.empty())
                    throw parse_error("malformed decimal literal", t.line, t.col);
            }
            t.kind = Token::Kind::number;
            t.text = digits + (frac.empty() ? "" : "." + frac);
            Rat v = digits.empty() ? Rat(0) : rat_from_string(digits);
            if (!frac.empty()) {
                Rat den = 1;
                for (size_t i = 0; i < frac.size(); ++i)
                    den *= 10;
                v += rat_from_string(frac) / den;
            }
            t.value = v;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < s_.size()
                   && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                t.text += advance();
            t.kind = Token::Kind::ident;
            return t;
        }
        advance();
        switch (c) {
        case '+': t.kind = Token::Kind::plus; return t;
        case '-': t.kind = Token::Kind::minus; return t;
        case '*': t.kind = Token::Kind::star; return t;
        case '/': t.kind = Token::Kind::slash; return t;
        case '^': t.kind = Token::Kind::caret; return t;
        case '(': t.kind = Token::Kind::lparen; return t;
        case ')': t.kind = Token::Kind::rparen; return t;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", t.line, t.col);
    }

private:
    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            if (s_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    char advance()
    {
        char c = s_[pos_++];
        ++col_;
        return c;
    }

    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars,
           const std::vector<std::pair<std::string, Rat>>& consts)
        : lex_(text), vars_(vars), consts_(consts)
    {
        cur_ = lex_.next();
    }

    ExprAST run()
    {
        int r = expr();
        expect(Token::Kind::end, "end of input");
        ast_.set_root(r);
        return std::move(ast_);
    }

private:
    void bump() { cur_ = lex_.next(); }

    void expect(Token::Kind k, const char* what)
    {
        if (cur_.kind != k)
            throw parse_error(std::string("expected ") + what, cur_.line, cur_.col);
        if (k != Token::Kind::end)
            bump();
    }

    int expr()
    {
        int lhs = term();
        while (cur_.kind == Token::Kind::plus || cur_.kind == Token::Kind::minus) {
            auto op = cur_.kind == Token::Kind::plus ? ExprAST::Op::add : ExprAST::Op::sub;
            SourceSpan sp{cur_.line, cur_.col};
            bump();
            int rhs = term();
            lhs = ast_.add_node({op, Rat(0), -1, lhs, rhs, 0, sp});
        }
        return lhs;
    }

    int term()
    {
        int lhs = unary();
        while (cur_.kind == Token::Kind::star || cur_.kind == Token::Kind::slash) {
            auto op = cur_.kind == Token::Kind::star ? ExprAST::Op::mul : ExprAST::Op::div;
            SourceSpan sp{cur_.line, cur_.col};
            bump();
            int rhs = unary();
            lhs = ast_.add_node({op, Rat(0), -1, lhs, rhs, 0, sp});
        }
        return lhs;
    }

    int unary()
    {
        if (cur_.kind == Token::Kind::minus) {
            SourceSpan sp{cur_.line, cur_.col};
            bump();
            int a = unary();
            return ast_.add_node({ExprAST::Op::neg, Rat(0), -1, a, -1, 0, sp});
        }
        if (cur_.kind == Token::Kind::plus) {
            bump();
            return unary();
        }
        return power();
    }

    int power()
    {
        int base = primary();
        if (cur_.kind == Token::Kind::caret) {
            SourceSpan sp{cur_.line, cur_.col};
            bump();
            int sign = 1;
            if (cur_.kind == Token::Kind::minus) {
                sign = -1;
                bump();
            }
            if (cur_.kind != Token::Kind::number || cur_.text.find('.') != std::string::npos)
                throw parse_error("exponent must be an integer", cur_.line, cur_.col);
            long e = std::stol(cur_.text);
            bump();
            return ast_.add_node({ExprAST::Op::pow, Rat(0), -1, base, -1, static_cast<int>(sign * e), sp});
        }
        return base;
    }

    int primary()
    {
        SourceSpan sp{cur_.line, cur_.col};
        if (cur_.kind == Token::Kind::number) {
            Rat v = cur_.value;
            bump();
            return ast_.add_node({ExprAST::Op::constant, v, -1, -1, -1, 0, sp});
        }
        if (cur_.kind == Token::Kind::ident) {
            std::string name = cur_.text;
            bump();
            if (name == "sqrt") {
                expect(Token::Kind::lparen, "'(' after sqrt");
                int a = expr();
                expect(Token::Kind::rparen, "')'");
                return ast_.add_node({ExprAST::Op::sqrt, Rat(0), -1, a, -1, 0, sp});
            }
            for (size_t i = 0; i < vars_.size(); ++i)
                if (vars_[i] == name)
                    return ast_.add_node({ExprAST::Op::variable, Rat(0), static_cast<int>(i), -1, -1, 0, sp});
            for (const auto& [cname, cval] : consts_)
                if (cname == name)
                    return ast_.add_node({ExprAST::Op::constant, cval, -1, -1, -1, 0, sp});
            throw parse_error("unknown identifier '" + name + "'", sp.line, sp.col);
        }
        if (cur_.kind == Token::Kind::lparen) {
            bump();
            int a = expr();
            expect(Token::Kind::rparen, "')'");
            return a;
        }
        throw parse_error("expected a number, identifier or '('", cur_.line, cur_.col);
    }

    Lexer lex_;
    Token cur_;
    ExprAST ast_;
    const std::vector<std::string>& vars_;
    const std::vector<std::pair<std::string, Rat>>& consts_;
};

} // namespace

ExprAST parse_hamiltonian(const std::string& text, const std::vector<std::string>& variables,
                          const std::vector<std::pair<std::string, Rat>>& constants)
{
    return Parser(text, variables, constants).run();
}

namespace {

std::string print_constant(const Rat& v)
{
    if (sgn(v) < 0)
        return "(-" + print_constant(Rat(-v)) + ")";
    if (v.get_den() == 1)
        return v.get_num().get_str();
    return "(" + v.get_num().get_str() + " / " + v.get_den().get_str() + ")";
}

std::string print_node(const ExprAST& e, int i, const std::vector<std::string>& vars)
{
    const auto& n = e.node(i);
    using Op = ExprAST::Op;
    switch (n.op) {
    case Op::constant: return print_constant(n.value);
    case Op::variable: return vars[n.var];
    case Op::add: return "(" + print_node(e, n.a, vars) + " + " + print_node(e, n.b, vars) + ")";
    case Op::sub: return "(" + print_node(e, n.a, vars) + " - " + print_node(e, n.b, vars) + ")";
    case Op::mul: return "(" + print_node(e, n.a, vars) + " * " + print_node(e, n.b, vars) + ")";
    case Op::div: return "(" + print_node(e, n.a, vars) + " / " + print_node(e, n.b, vars) + ")";
    case Op::pow: return print_node(e, n.a, vars) + "^" + std::to_string(n.exponent);
    case Op::sqrt: return "sqrt(" + print_node(e, n.a, vars) + ")";
    case Op::neg: return "(-" + print_node(e, n.a, vars) + ")";
    }
    return "?";
}

double eval_node(const ExprAST& e, int i, const std::vector<double>& x)
{
    const auto& n = e.node(i);
    using Op = ExprAST::Op;
    switch (n.op) {
    case Op::constant: return n.value.get_d();
    case Op::variable: return x[n.var];
    case Op::add: return eval_node(e, n.a, x) + eval_node(e, n.b, x);
    case Op::sub: return eval_node(e, n.a, x) - eval_node(e, n.b, x);
    case Op::mul: return eval_node(e, n.a, x) * eval_node(e, n.b, x);
    case Op::div: return eval_node(e, n.a, x) / eval_node(e, n.b, x);
    case Op::pow: return std::pow(eval_node(e, n.a, x), n.exponent);
    case Op::sqrt: return std::sqrt(eval_node(e, n.a, x));
    case Op::neg: return -eval_node(e, n.a, x);
    }
    return 0;
}

} // namespace

std::string print_expr(const ExprAST& e, const std::vector<std::string>& variables)
{
    return print_node(e, e.root(), variables);
}

double eval_expr(const ExprAST& e, const std::vector<double>& point)
{
    return eval_node(e, e.root(), point);
}

} // namespace revham
