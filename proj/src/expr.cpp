/// Math expression parser (precedence climbing) and evaluator.

#include "equivar/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <vector>

namespace equivar {

enum class NodeKind { Number, Variable, Parameter, Unary, Binary, Call };

enum class Fn { Sin, Cos, Tan, Arctan, Exp, Log, Sqrt, Abs };

struct Expr::Node {
    NodeKind kind;
    double number = 0.0;
    std::string name;          // parameter name
    char op = 0;               // binary operator
    Fn fn = Fn::Sin;
    size_t offset = 0;         // byte offset, for eval diagnostics
    std::shared_ptr<const Node> lhs, rhs;  // Unary/Call use lhs only
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

const std::map<std::string, Fn>& function_table() {
    static const std::map<std::string, Fn> table = {
        {"sin", Fn::Sin},   {"cos", Fn::Cos},   {"tan", Fn::Tan},
        {"arctan", Fn::Arctan}, {"exp", Fn::Exp}, {"log", Fn::Log},
        {"sqrt", Fn::Sqrt}, {"abs", Fn::Abs}};
    return table;
}

const char* function_name(Fn f) {
    switch (f) {
        case Fn::Sin: return "sin";
        case Fn::Cos: return "cos";
        case Fn::Tan: return "tan";
        case Fn::Arctan: return "arctan";
        case Fn::Exp: return "exp";
        case Fn::Log: return "log";
        case Fn::Sqrt: return "sqrt";
        case Fn::Abs: return "abs";
    }
    return "?";
}

struct Token {
    enum Kind { Number, Ident, Op, LParen, RParen, End } kind;
    double number = 0.0;
    std::string text;
    char op = 0;
    size_t offset = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : src_(s) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) ++pos_;
        tok_ = Token{};
        tok_.offset = pos_;
        if (pos_ >= src_.size()) {
            tok_.kind = Token::End;
            return;
        }
        const char c = src_[pos_];
        if (std::isdigit((unsigned char)c) || c == '.') {
            const char* begin = src_.c_str() + pos_;
            char* end = nullptr;
            tok_.number = std::strtod(begin, &end);
            if (end == begin)
                throw ExprError("malformed number", pos_);
            tok_.kind = Token::Number;
            pos_ += size_t(end - begin);
            return;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum((unsigned char)src_[pos_]) || src_[pos_] == '_'))
                ++pos_;
            tok_.kind = Token::Ident;
            tok_.text = src_.substr(start, pos_ - start);
            return;
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '^':
                tok_.kind = Token::Op;
                tok_.op = c;
                ++pos_;
                return;
            case '(':
                tok_.kind = Token::LParen;
                ++pos_;
                return;
            case ')':
                tok_.kind = Token::RParen;
                ++pos_;
                return;
            default: {
                std::ostringstream os;
                os << "unexpected character '" << c << "'";
                throw ExprError(os.str(), pos_);
            }
        }
    }

    const std::string& src_;
    size_t pos_ = 0;
    Token tok_;
};

// Binding powers: ^ (4, right) > unary - (3) > * / (2) > + - (1).
int infix_power(char op) {
    switch (op) {
        case '^': return 4;
        case '*': case '/': return 2;
        case '+': case '-': return 1;
    }
    return 0;
}

class Parser {
public:
    Parser(const std::string& text, std::set<std::string>& params, bool& uses_x)
        : lex_(text), params_(params), uses_x_(uses_x) {}

    NodePtr parse_all() {
        NodePtr e = parse_expr(0);
        const Token& t = lex_.peek();
        if (t.kind != Token::End)
            throw ExprError("unexpected token; expected operator or end of input",
                            t.offset);
        return e;
    }

private:
    NodePtr parse_expr(int min_power) {
        NodePtr lhs = parse_prefix();
        while (true) {
            const Token& t = lex_.peek();
            if (t.kind != Token::Op) break;
            const int power = infix_power(t.op);
            if (power < min_power || power == 0) break;
            Token op = lex_.take();
            // right-associative ^ re-enters at the same power
            const int next = (op.op == '^') ? power : power + 1;
            NodePtr rhs = parse_expr(next);
            auto n = std::make_shared<Expr::Node>();
            n->kind = NodeKind::Binary;
            n->op = op.op;
            n->offset = op.offset;
            n->lhs = lhs;
            n->rhs = rhs;
            lhs = n;
        }
        return lhs;
    }

    NodePtr parse_prefix() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Op && t.op == '-') {
            Token minus = lex_.take();
            // unary minus binds looser than ^: parse the operand at power 4
            NodePtr operand = parse_expr(4);
            auto n = std::make_shared<Expr::Node>();
            n->kind = NodeKind::Unary;
            n->offset = minus.offset;
            n->lhs = operand;
            return n;
        }
        if (t.kind == Token::Op && t.op == '+') {
            lex_.take();
            return parse_expr(4);
        }
        return parse_primary();
    }

    NodePtr parse_primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case Token::Number: {
                auto n = std::make_shared<Expr::Node>();
                n->kind = NodeKind::Number;
                n->number = t.number;
                n->offset = t.offset;
                return n;
            }
            case Token::Ident: {
                auto it = function_table().find(t.text);
                if (it != function_table().end()) {
                    const Token& next = lex_.peek();
                    if (next.kind != Token::LParen)
                        throw ExprError("expected '(' after function name '" +
                                            t.text + "'",
                                        next.offset);
                    lex_.take();
                    NodePtr arg = parse_expr(0);
                    expect_rparen();
                    auto n = std::make_shared<Expr::Node>();
                    n->kind = NodeKind::Call;
                    n->fn = it->second;
                    n->offset = t.offset;
                    n->lhs = arg;
                    return n;
                }
                if (lex_.peek().kind == Token::LParen)
                    throw ExprError("unknown function name '" + t.text + "'",
                                    t.offset);
                auto n = std::make_shared<Expr::Node>();
                n->offset = t.offset;
                if (t.text == "x") {
                    n->kind = NodeKind::Variable;
                    uses_x_ = true;
                } else {
                    n->kind = NodeKind::Parameter;
                    n->name = t.text;
                    params_.insert(t.text);
                }
                return n;
            }
            case Token::LParen: {
                NodePtr e = parse_expr(0);
                expect_rparen();
                return e;
            }
            default:
                throw ExprError("expected expression", t.offset);
        }
    }

    void expect_rparen() {
        const Token& t = lex_.peek();
        if (t.kind != Token::RParen)
            throw ExprError("expected ')'", t.offset);
        lex_.take();
    }

    Lexer lex_;
    std::set<std::string>& params_;
    bool& uses_x_;
};

double eval_node(const Expr::Node& n, double x,
                 const std::map<std::string, double>& params) {
    switch (n.kind) {
        case NodeKind::Number:
            return n.number;
        case NodeKind::Variable:
            return x;
        case NodeKind::Parameter: {
            auto it = params.find(n.name);
            if (it == params.end())
                throw ExprError("unbound identifier '" + n.name + "'", n.offset);
            return it->second;
        }
        case NodeKind::Unary:
            return -eval_node(*n.lhs, x, params);
        case NodeKind::Binary: {
            const double a = eval_node(*n.lhs, x, params);
            const double b = eval_node(*n.rhs, x, params);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            throw ExprError("bad operator", n.offset);
        }
        case NodeKind::Call: {
            const double a = eval_node(*n.lhs, x, params);
            switch (n.fn) {
                case Fn::Sin: return std::sin(a);
                case Fn::Cos: return std::cos(a);
                case Fn::Tan: return std::tan(a);
                case Fn::Arctan: return std::atan(a);
                case Fn::Exp: return std::exp(a);
                case Fn::Log:
                    if (!(a > 0.0))
                        throw ExprError("domain error: log of non-positive value",
                                        n.offset);
                    return std::log(a);
                case Fn::Sqrt:
                    if (a < 0.0)
                        throw ExprError("domain error: sqrt of negative value",
                                        n.offset);
                    return std::sqrt(a);
                case Fn::Abs: return std::fabs(a);
            }
            throw ExprError("bad function", n.offset);
        }
    }
    throw ExprError("bad node", n.offset);
}

void print_node(const Expr::Node& n, std::ostream& os) {
    switch (n.kind) {
        case NodeKind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            os << buf;
            return;
        }
        case NodeKind::Variable:
            os << 'x';
            return;
        case NodeKind::Parameter:
            os << n.name;
            return;
        case NodeKind::Unary:
            os << "(-";
            print_node(*n.lhs, os);
            os << ')';
            return;
        case NodeKind::Binary:
            os << '(';
            print_node(*n.lhs, os);
            os << n.op;
            print_node(*n.rhs, os);
            os << ')';
            return;
        case NodeKind::Call:
            os << function_name(n.fn) << '(';
            print_node(*n.lhs, os);
            os << ')';
            return;
    }
}

}  // namespace

Expr Expr::parse(const std::string& text) {
    if (text.empty()) throw ExprError("empty expression", 0);
    Expr e;
    Parser p(text, e.params_, e.uses_x_);
    e.root_ = p.parse_all();
    return e;
}

double Expr::eval(double x, const std::map<std::string, double>& params) const {
    return eval_node(*root_, x, params);
}

std::string Expr::print() const {
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

}  // namespace equivar
