#pragma once

// Arithmetic expressions in one variable x, for coefficient and right-hand
// side functions in problem files.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right associative
//   primary := number | 'x' | 'pi' | 'e' | name '(' expr ')' | '(' expr ')'
//
// name is one of sin cos tan exp log sqrt abs sinh cosh tanh atan sign.
// There is no implicit multiplication: "2x" is an error.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ultraspec::expr {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos, std::vector<std::string> expected)
        : std::runtime_error(what), pos_(pos), expected_(std::move(expected)) {}
    /// 0-based character offset.
    std::size_t position() const { return pos_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t pos_;
    std::vector<std::string> expected_;
};

/// A character that starts no token.
class LexError : public ParseError {
public:
    LexError(const std::string& what, std::size_t pos, char bad)
        : ParseError(what, pos, {}), bad_(bad) {}
    char bad_char() const { return bad_; }

private:
    char bad_;
};

enum class Op { Number, Constant, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Node {
    Op op;
    double value = 0.0;  // Number, Constant
    std::string name;    // Constant, Call
    std::vector<std::shared_ptr<const Node>> args;
};

class Expr {
public:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    const Node& root() const { return *root_; }

    double operator()(double x) const;
    /// Fully parenthesized text that parses back to the same tree.
    std::string str() const;

private:
    std::shared_ptr<const Node> root_;
};

Expr parse(std::string_view src);

inline double eval(const Expr& e, double x) { return e(x); }

const std::vector<std::string>& function_names();

}  // namespace ultraspec::expr
