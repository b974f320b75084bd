#include "ultraspec/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace ultraspec::expr {

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t pos;
    std::string text;
    double value = 0.0;
};

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto digit = [&](std::size_t k) { return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])); };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (digit(i) || (c == '.' && digit(i + 1))) {
            const std::size_t start = i;
            while (digit(i)) ++i;
            if (i < s.size() && s[i] == '.') {
                ++i;
                while (digit(i)) ++i;
            }
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t k = i + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (digit(k)) {
                    i = k;
                    while (digit(i)) ++i;
                }
            }
            double v = 0.0;
            const auto r = std::from_chars(s.data() + start, s.data() + i, v);
            if (r.ec != std::errc() || !std::isfinite(v))
                throw LexError("number out of range at position " + std::to_string(start), start, s[start]);
            out.push_back({Tok::Number, start, std::string(s.substr(start, i - start)), v});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({Tok::Ident, start, std::string(s.substr(start, i - start))});
            continue;
        }
        Tok k;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            default:
                throw LexError(std::string("unexpected character '") + c + "' at position " + std::to_string(i), i, c);
        }
        out.push_back({k, i, std::string(1, c)});
        ++i;
    }
    out.push_back({Tok::End, s.size(), ""});
    return out;
}

const std::array<std::string, 12> kFunctions = {"sin",  "cos",  "tan",  "exp",  "log",  "sqrt",
                                               "abs",  "sinh", "cosh", "tanh", "atan", "sign"};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double value = 0.0, std::string name = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->name = std::move(name);
    n->args = std::move(args);
    return n;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    NodePtr parse_all() {
        auto e = expr();
        if (peek().kind != Tok::End) fail({"operator", "end of input"});
        return e;
    }

private:
    const Token& peek() const { return t_[i_]; }
    const Token& take() { return t_[i_++]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const auto& tk = peek();
        std::string got = tk.kind == Tok::End ? "end of input" : "'" + tk.text + "'";
        std::string msg = "expected ";
        for (std::size_t k = 0; k < expected.size(); ++k) msg += (k ? " or " : "") + expected[k];
        msg += " at position " + std::to_string(tk.pos) + ", found " + got;
        throw ParseError(msg, tk.pos, std::move(expected));
    }

    NodePtr expr() {
        auto lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Op op = take().kind == Tok::Plus ? Op::Add : Op::Sub;
            lhs = make(op, {lhs, term()});
        }
        return lhs;
    }

    NodePtr term() {
        auto lhs = unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const Op op = take().kind == Tok::Star ? Op::Mul : Op::Div;
            lhs = make(op, {lhs, unary()});
        }
        return lhs;
    }

    NodePtr unary() {
        if (peek().kind == Tok::Minus) {
            take();
            return make(Op::Neg, {unary()});
        }
        return power();
    }

    NodePtr power() {
        auto base = primary();
        if (peek().kind == Tok::Caret) {
            take();
            return make(Op::Pow, {base, unary()});
        }
        return base;
    }

    NodePtr primary() {
        const Token& tk = peek();
        switch (tk.kind) {
            case Tok::Number:
                take();
                return make(Op::Number, {}, tk.value);
            case Tok::LParen: {
                take();
                auto e = expr();
                if (peek().kind != Tok::RParen) fail({"')'"});
                take();
                return e;
            }
            case Tok::Ident: {
                if (tk.text == "x") {
                    take();
                    return make(Op::Var);
                }
                if (tk.text == "pi") {
                    take();
                    return make(Op::Constant, {}, std::numbers::pi, "pi");
                }
                if (tk.text == "e") {
                    take();
                    return make(Op::Constant, {}, std::numbers::e, "e");
                }
                if (std::find(kFunctions.begin(), kFunctions.end(), tk.text) != kFunctions.end()) {
                    std::string name = take().text;
                    if (peek().kind != Tok::LParen) fail({"'('"});
                    take();
                    auto arg = expr();
                    if (peek().kind != Tok::RParen) fail({"')'"});
                    take();
                    return make(Op::Call, {arg}, 0.0, std::move(name));
                }
                fail({"number", "'x'", "'pi'", "'e'", "function name", "'('"});
            }
            default:
                fail({"number", "'x'", "'pi'", "'e'", "function name", "'('", "'-'"});
        }
    }

    std::vector<Token> t_;
    std::size_t i_ = 0;
};

double call(const std::string& f, double a) {
    if (f == "sin") return std::sin(a);
    if (f == "cos") return std::cos(a);
    if (f == "tan") return std::tan(a);
    if (f == "exp") return std::exp(a);
    if (f == "log") return std::log(a);
    if (f == "sqrt") return std::sqrt(a);
    if (f == "abs") return std::abs(a);
    if (f == "sinh") return std::sinh(a);
    if (f == "cosh") return std::cosh(a);
    if (f == "tanh") return std::tanh(a);
    if (f == "atan") return std::atan(a);
    if (f == "sign") return std::isnan(a) ? a : (a > 0) - (a < 0);
    throw std::logic_error("unknown function " + f);
}

double eval_node(const Node& n, double x) {
    switch (n.op) {
        case Op::Number:
        case Op::Constant: return n.value;
        case Op::Var: return x;
        case Op::Neg: return -eval_node(*n.args[0], x);
        case Op::Add: return eval_node(*n.args[0], x) + eval_node(*n.args[1], x);
        case Op::Sub: return eval_node(*n.args[0], x) - eval_node(*n.args[1], x);
        case Op::Mul: return eval_node(*n.args[0], x) * eval_node(*n.args[1], x);
        case Op::Div: return eval_node(*n.args[0], x) / eval_node(*n.args[1], x);
        case Op::Pow: return std::pow(eval_node(*n.args[0], x), eval_node(*n.args[1], x));
        case Op::Call: return call(n.name, eval_node(*n.args[0], x));
    }
    return 0.0;
}

void print(const Node& n, std::string& out) {
    auto bin = [&](const char* op) {
        out += '(';
        print(*n.args[0], out);
        out += op;
        print(*n.args[1], out);
        out += ')';
    };
    switch (n.op) {
        case Op::Number: {
            char buf[64];
            const auto r = std::to_chars(buf, buf + sizeof buf, n.value);
            out.append(buf, r.ptr);
            break;
        }
        case Op::Constant: out += n.name; break;
        case Op::Var: out += 'x'; break;
        case Op::Neg:
            out += "(-";
            print(*n.args[0], out);
            out += ')';
            break;
        case Op::Add: bin(" + "); break;
        case Op::Sub: bin(" - "); break;
        case Op::Mul: bin(" * "); break;
        case Op::Div: bin(" / "); break;
        case Op::Pow: bin("^"); break;
        case Op::Call:
            out += n.name;
            out += '(';
            print(*n.args[0], out);
            out += ')';
            break;
    }
}

}  // namespace

double Expr::operator()(double x) const {
    return eval_node(*root_, x);
}

std::string Expr::str() const {
    std::string s;
    print(*root_, s);
    return s;
}

Expr parse(std::string_view src) {
    Parser p(lex(src));
    return Expr(p.parse_all());
}

const std::vector<std::string>& function_names() {
    static const std::vector<std::string> v(kFunctions.begin(), kFunctions.end());
    return v;
}

}  // namespace ultraspec::expr
