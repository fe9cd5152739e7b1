#pragma once

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>

namespace equivar {

/// Parse or evaluation failure; carries the byte offset into the source text.
class ExprError : public std::runtime_error {
public:
    ExprError(std::string msg, size_t offset)
        : std::runtime_error(std::move(msg)), offset_(offset) {}
    size_t offset() const { return offset_; }

private:
    size_t offset_;
};

/// Immutable expression tree over the variable `x`, named parameters,
/// the operators + - * / ^ (with unary minus), and the functions
/// sin, cos, tan, arctan, exp, log, sqrt, abs.
///
/// `^` is right-associative and binds tighter than unary minus, so
/// "-x^2" evaluates as -(x^2). Implicit multiplication is rejected.
class Expr {
public:
    /// Parse source text; throws ExprError with byte offset on failure.
    static Expr parse(const std::string& text);

    /// Evaluate at x with the given parameter bindings. Throws ExprError on
    /// unbound identifiers and on domain errors (log of non-positive,
    /// sqrt of negative). Other non-finite results (e.g. overflow to inf)
    /// propagate IEEE-style.
    double eval(double x, const std::map<std::string, double>& params) const;

    /// Free identifiers other than `x`.
    const std::set<std::string>& free_params() const { return params_; }

    /// Whether the variable `x` appears in the tree.
    bool uses_x() const { return uses_x_; }

    /// Canonical fully-parenthesized text; parse(print()) rebuilds an
    /// identical tree.
    std::string print() const;

    struct Node;

private:
    Expr() = default;
    std::shared_ptr<const Node> root_;
    std::set<std::string> params_;
    bool uses_x_ = false;
};

}  // namespace equivar
