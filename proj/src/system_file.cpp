#include "revham/system_file.hpp"

#include "revham/canonical.hpp"

#include <fstream>
#include <sstream>

namespace revham {

std::vector<std::string> default_variable_names(int dimension)
{
    std::vector<std::string> out;
    for (int i = 0; i < dimension; ++i)
        out.push_back(variable_name(i, dimension + dimension % 2));
    return out;
}

namespace {

std::vector<std::string> split_ws(const std::string& s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w)
        out.push_back(w);
    return out;
}

/// "[[a,b],[c,d]]" with rational entries.
Mat<Rat> parse_matrix_rows(const std::string& text, const std::string& field_name)
{
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> cur;
    std::string num;
    int depth = 0;
    auto flush_num = [&]() {
        if (!num.empty()) {
            cur.push_back(rat_from_string(num));
            num.clear();
        }
    };
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c)))
            continue;
        if (c == '[') {
            ++depth;
        } else if (c == ']') {
            flush_num();
            if (depth == 2 && !cur.empty()) {
                rows.push_back(cur);
                cur.clear();
            }
            --depth;
        } else if (c == ',') {
            flush_num();
        } else {
            num += c;
        }
    }
    if (rows.empty())
        throw system_file_error(field_name + ": empty matrix");
    for (const auto& r : rows)
        if (r.size() != rows.size())
            throw system_file_error(field_name + ": matrix must be square");
    return Mat<Rat>::from_rows(rows);
}

Mat<Rat> parse_involution_spec(const std::string& spec, int n)
{
    if (spec == "Id")
        return Mat<Rat>::identity(n);
    if (spec == "-Id")
        return involution_template<Rat>(n, 0);
    if (spec == "R0") {
        if (n != 4)
            throw system_file_error("involution R0 requires dimension 4");
        return involution_template<Rat>(4, 2);
    }
    if (spec == "R1") {
        if (n != 6)
            throw system_file_error("involution R1 requires dimension 6");
        return involution_template<Rat>(6, 2);
    }
    if (spec == "R2") {
        if (n != 6)
            throw system_file_error("involution R2 requires dimension 6");
        return involution_template<Rat>(6, 4);
    }
    if (spec.rfind("diag(", 0) == 0 && spec.back() == ')') {
        std::string inner = spec.substr(5, spec.size() - 6);
        for (auto& c : inner)
            if (c == ',')
                c = ' ';
        auto parts = split_ws(inner);
        if (static_cast<int>(parts.size()) != n)
            throw system_file_error("involution diag(...) needs " + std::to_string(n) + " entries");
        std::vector<Rat> d;
        for (const auto& p : parts)
            d.push_back(rat_from_string(p));
        return Mat<Rat>::diag(d);
    }
    if (spec.rfind("[[", 0) == 0)
        return parse_matrix_rows(spec, "involution");
    throw system_file_error("involution: unknown specification '" + spec + "'");
}

Mat<Rat> parse_symplectic_spec(const std::string& spec, int n, const Mat<Rat>& R)
{
    if (spec == "standard")
        return standard_symplectic<Rat>(n);
    if (spec == "canonical") {
        // infer the case from the diagonal canonical involution
        for (CaseTag t : {CaseTag::c42, CaseTag::c62, CaseTag::c64}) {
            if (case_dim(t) != n)
                continue;
            if (R == canonical_R<Rat>(t))
                return canonical_form<Rat>(t);
        }
        throw system_file_error("symplectic: canonical requires a canonical involution diag pattern");
    }
    if (spec.rfind("[[", 0) == 0)
        return parse_matrix_rows(spec, "symplectic");
    throw system_file_error("symplectic: unknown specification '" + spec + "'");
}

} // namespace

SystemFile parse_system(const std::string& text)
{
    SystemFile s;
    std::istringstream is(text);
    std::string line;
    std::string h_expr;
    bool in_h = false;
    std::string involution_spec, symplectic_spec = "standard", center_spec, vars_spec, consts_spec;

    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        if (in_h) {
            h_expr += " " + line;
            continue;
        }
        auto eq = line.find('=');
        auto colon = line.find(':');
        std::string key = line.substr(0, std::min(eq, colon));
        auto trim = [](std::string v) {
            auto a = v.find_first_not_of(" \t\r");
            auto b = v.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
        };
        key = trim(key);
        if (key == "H") {
            if (eq == std::string::npos)
                throw system_file_error("expected 'H = <expression>'");
            h_expr = line.substr(eq + 1);
            in_h = true;
            continue;
        }
        if (colon == std::string::npos)
            throw system_file_error("malformed header line: " + line);
        std::string value = trim(line.substr(colon + 1));
        if (key == "dimension")
            s.dimension = std::stoi(value);
        else if (key == "order")
            s.order = std::stoi(value);
        else if (key == "mode")
            s.mode = value;
        else if (key == "involution")
            involution_spec = value;
        else if (key == "symplectic")
            symplectic_spec = value;
        else if (key == "center")
            center_spec = value;
        else if (key == "variables")
            vars_spec = value;
        else if (key == "constants")
            consts_spec = value;
        else
            throw system_file_error("unknown header key '" + key + "'");
    }

    if (s.dimension != 4 && s.dimension != 6)
        throw system_file_error("dimension must be 4 or 6");
    if (s.order < 2)
        throw system_file_error("order must be at least 2");
    if (s.mode != "exact" && s.mode != "float")
        throw system_file_error("mode must be 'exact' or 'float'");
    if (involution_spec.empty())
        throw system_file_error("missing involution");
    if (h_expr.empty())
        throw system_file_error("missing Hamiltonian (H = ...)");

    s.involution_spec = involution_spec;
    s.involution = parse_involution_spec(involution_spec, s.dimension);
    s.symplectic_spec = symplectic_spec;
    s.symplectic = parse_symplectic_spec(symplectic_spec, s.dimension, s.involution);

    if (involution_defect(s.involution) != 0)
        throw system_file_error("involution: R^2 != Id");
    if ((s.symplectic + s.symplectic.transposed()).max_abs() != 0)
        throw system_file_error("symplectic: matrix is not antisymmetric");
    if (rank(s.symplectic) != s.dimension)
        throw system_file_error("symplectic: matrix is singular");
    if (symplectic_defect(s.involution, s.symplectic) != 0)
        throw system_file_error("involution: not symplectic for the given form (JR != R^T J)");

    if (center_spec.empty()) {
        s.center.assign(s.dimension, Rat(0));
    } else {
        for (const auto& w : split_ws(center_spec))
            s.center.push_back(rat_from_string(w));
        if (static_cast<int>(s.center.size()) != s.dimension)
            throw system_file_error("center: needs " + std::to_string(s.dimension) + " entries");
    }

    s.variables = vars_spec.empty() ? default_variable_names(s.dimension) : split_ws(vars_spec);
    if (static_cast<int>(s.variables.size()) != s.dimension)
        throw system_file_error("variables: needs " + std::to_string(s.dimension) + " names");

    for (const auto& w : split_ws(consts_spec)) {
        auto eq = w.find('=');
        if (eq == std::string::npos)
            throw system_file_error("constants: entries must look like name=value");
        s.constants.emplace_back(w.substr(0, eq), rat_from_string(w.substr(eq + 1)));
    }

    s.h_text = h_expr;
    s.h_ast = parse_hamiltonian(h_expr, s.variables, s.constants);
    return s;
}

SystemFile load_system(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw system_file_error("cannot open system file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str());
}

namespace {

std::string matrix_spec(const Mat<Rat>& M)
{
    std::string s = "[";
    for (int i = 0; i < M.rows(); ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < M.cols(); ++j)
            s += (j ? "," : "") + M(i, j).get_str();
        s += "]";
    }
    return s + "]";
}

} // namespace

std::string dump_system_text(const SystemFile& s)
{
    std::ostringstream os;
    os << "dimension: " << s.dimension << "\n";
    os << "order: " << s.order << "\n";
    os << "mode: " << s.mode << "\n";
    os << "involution: " << (s.involution_spec.empty() ? matrix_spec(s.involution) : s.involution_spec) << "\n";
    os << "symplectic: " << (s.symplectic_spec.empty() ? matrix_spec(s.symplectic) : s.symplectic_spec) << "\n";
    os << "center:";
    for (const auto& c : s.center)
        os << " " << c.get_str();
    os << "\n";
    os << "variables:";
    for (const auto& v : s.variables)
        os << " " << v;
    os << "\n";
    if (!s.constants.empty()) {
        os << "constants:";
        for (const auto& [k, v] : s.constants)
            os << " " << k << "=" << v.get_str();
        os << "\n";
    }
    os << "H = " << print_expr(s.h_ast, s.variables) << "\n";
    return os.str();
}

void dump_system(const SystemFile& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw system_file_error("cannot write system file: " + path);
    out << dump_system_text(s);
}

} // namespace revham
