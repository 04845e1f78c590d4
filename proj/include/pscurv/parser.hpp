#pragma once

// Recursive-descent parser for defining functions.
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('+'|'-') unary | factor
//   factor := atom ('^' integer)?
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//   func   := re | im | abs2 | conj | log
//   number := decimal with optional exponent and optional trailing 'i'
//
// Identifiers are z1..z9 (bounded by the dimension) and bound parameter names.

#include <cctype>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "pscurv/errors.hpp"
#include "pscurv/expression.hpp"

namespace pscurv {

namespace detail {

class Parser {
public:
    Parser(std::string_view text, int dimension, const std::set<std::string>& parameters)
        : text_(text), dim_(dimension), params_(parameters) {}

    ExprPtr parse() {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("empty expression", 0);
        ExprPtr e = parse_expr();
        skip_space();
        if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        while (true) {
            skip_space();
            if (accept('+')) lhs = Expr::make_binary(Op::Add, lhs, parse_term());
            else if (accept('-')) lhs = Expr::make_binary(Op::Sub, lhs, parse_term());
            else return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_unary();
        while (true) {
            skip_space();
            if (accept('*')) lhs = Expr::make_binary(Op::Mul, lhs, parse_unary());
            else if (accept('/')) lhs = Expr::make_binary(Op::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    ExprPtr parse_unary() {
        skip_space();
        if (accept('-')) return Expr::make_unary(Op::Neg, parse_unary());
        if (accept('+')) return parse_unary();
        return parse_factor();
    }

    ExprPtr parse_factor() {
        ExprPtr base = parse_atom();
        skip_space();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        bool negative = accept('-');
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail_expected("integer exponent");
        long value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            value = value * 10 + (text_[pos_] - '0');
            if (value > 64) throw ParseError("exponent too large", start);
            ++pos_;
        }
        last_token_ = start;
        return Expr::make_pow(base, static_cast<int>(negative ? -value : value));
    }

    ExprPtr parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail_expected("operand");
        const char c = text_[pos_];
        const std::size_t start = pos_;
        if (c == '(') {
            last_token_ = pos_++;
            ExprPtr inner = parse_expr();
            skip_space();
            if (!accept(')')) fail_expected("')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string ident(text_.substr(start, pos_ - start));
            last_token_ = start;
            if (auto op = function_op(ident)) {
                skip_space();
                if (!accept('(')) fail_expected("'(' after " + ident);
                ExprPtr arg = parse_expr();
                skip_space();
                if (!accept(')')) fail_expected("')'");
                return Expr::make_unary(*op, arg);
            }
            if (params_.count(ident)) return Expr::make_parameter(ident);
            if (ident.size() == 2 && ident[0] == 'z' && ident[1] >= '1' && ident[1] <= '9') {
                int k = ident[1] - '1';
                if (k < dim_) return Expr::make_variable(k);
            }
            throw ParseError("unknown identifier '" + ident + "'", start);
        }
        throw ParseError(std::string("unexpected '") + c + "'", start);
    }

    ExprPtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw ParseError("malformed number", start);
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        const double v = std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr);
        last_token_ = start;
        if (pos_ < text_.size() && text_[pos_] == 'i') {
            ++pos_;
            if (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                throw ParseError("malformed imaginary literal", start);
            return Expr::make_number(cplx(0.0, v));
        }
        return Expr::make_number(cplx(v, 0.0));
    }

    static std::optional<Op> function_op(const std::string& s) {
        if (s == "re") return Op::Re;
        if (s == "im") return Op::Im;
        if (s == "abs2") return Op::Abs2;
        if (s == "conj") return Op::Conj;
        if (s == "log") return Op::Log;
        return std::nullopt;
    }

    // Running out of input is reported at the last token that needed a
    // continuation; anything else at the current position.
    [[noreturn]] void fail_expected(const std::string& what) {
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input, expected " + what, last_token_);
        throw ParseError("expected " + what, pos_);
    }

    bool accept(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            last_token_ = pos_++;
            return true;
        }
        return false;
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view text_;
    int dim_;
    const std::set<std::string>& params_;
    std::size_t pos_ = 0;
    std::size_t last_token_ = 0;
};

}  // namespace detail

/// Parses `text` into an expression over z1..z{dimension} and the given
/// parameter names. Throws ParseError.
inline ExprPtr parse_expression(std::string_view text, int dimension, const std::set<std::string>& parameters = {}) {
    return detail::Parser(text, dimension, parameters).parse();
}

}  // namespace pscurv
