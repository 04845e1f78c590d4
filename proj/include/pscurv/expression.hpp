#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pscurv/errors.hpp"
#include "pscurv/series.hpp"

namespace pscurv {

enum class Op { Number, Variable, Parameter, Neg, Add, Sub, Mul, Div, Pow, Re, Im, Abs2, Conj, Log };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node. Variables are 0-based: index k stands for z_{k+1}.
struct Expr {
    Op op = Op::Number;
    cplx number{};
    int index = 0;        // Variable index, or Pow exponent
    std::string name;     // Parameter name
    ExprPtr lhs, rhs;     // operands; unary ops use lhs

    static ExprPtr make_number(cplx v) {
        auto e = std::make_shared<Expr>();
        e->number = v;
        return e;
    }
    static ExprPtr make_variable(int k) {
        auto e = std::make_shared<Expr>();
        e->op = Op::Variable;
        e->index = k;
        return e;
    }
    static ExprPtr make_parameter(std::string n) {
        auto e = std::make_shared<Expr>();
        e->op = Op::Parameter;
        e->name = std::move(n);
        return e;
    }
    static ExprPtr make_unary(Op op, ExprPtr a) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->lhs = std::move(a);
        return e;
    }
    static ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->lhs = std::move(a);
        e->rhs = std::move(b);
        return e;
    }
    static ExprPtr make_pow(ExprPtr a, int exponent) {
        auto e = std::make_shared<Expr>();
        e->op = Op::Pow;
        e->lhs = std::move(a);
        e->index = exponent;
        return e;
    }
};

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case Op::Number: return a.number == b.number;
        case Op::Variable: return a.index == b.index;
        case Op::Parameter: return a.name == b.name;
        case Op::Pow: return a.index == b.index && structurally_equal(*a.lhs, *b.lhs);
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
            return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
        default: return structurally_equal(*a.lhs, *b.lhs);
    }
}

namespace detail {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const char* function_name(Op op) {
    switch (op) {
        case Op::Re: return "re";
        case Op::Im: return "im";
        case Op::Abs2: return "abs2";
        case Op::Conj: return "conj";
        case Op::Log: return "log";
        default: return "";
    }
}

}  // namespace detail

/// Prints in the input grammar. Binary operations are always parenthesised, so
/// the output re-parses to the same tree.
inline std::string to_string(const Expr& e) {
    switch (e.op) {
        case Op::Number: {
            if (e.number.imag() == 0.0 && !std::signbit(e.number.real())) return detail::format_real(e.number.real());
            if (e.number.real() == 0.0 && !std::signbit(e.number.imag()))
                return detail::format_real(e.number.imag()) + "i";
            // Only reachable for substituted values; prints as an equivalent sum.
            return "(" + detail::format_real(e.number.real()) + "+" + detail::format_real(e.number.imag()) + "i)";
        }
        case Op::Variable: return "z" + std::to_string(e.index + 1);
        case Op::Parameter: return e.name;
        case Op::Neg: return "(-" + to_string(*e.lhs) + ")";
        case Op::Add: return "(" + to_string(*e.lhs) + "+" + to_string(*e.rhs) + ")";
        case Op::Sub: return "(" + to_string(*e.lhs) + "-" + to_string(*e.rhs) + ")";
        case Op::Mul: return "(" + to_string(*e.lhs) + "*" + to_string(*e.rhs) + ")";
        case Op::Div: return "(" + to_string(*e.lhs) + "/" + to_string(*e.rhs) + ")";
        case Op::Pow: return "(" + to_string(*e.lhs) + "^" + std::to_string(e.index) + ")";
        default: return std::string(detail::function_name(e.op)) + "(" + to_string(*e.lhs) + ")";
    }
}

using ParameterMap = std::map<std::string, cplx>;

/// Replaces every parameter by its bound value.
inline ExprPtr substitute(const ExprPtr& e, const ParameterMap& params) {
    switch (e->op) {
        case Op::Number:
        case Op::Variable: return e;
        case Op::Parameter: {
            auto it = params.find(e->name);
            if (it == params.end()) throw ArgumentError("unbound parameter '" + e->name + "'");
            return Expr::make_number(it->second);
        }
        case Op::Pow: return Expr::make_pow(substitute(e->lhs, params), e->index);
        case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
            return Expr::make_binary(e->op, substitute(e->lhs, params), substitute(e->rhs, params));
        default: return Expr::make_unary(e->op, substitute(e->lhs, params));
    }
}

/// Scalar operations needed to evaluate an expression over type T.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<cplx> {
    struct Context {
        std::vector<cplx> point;
    };
    static cplx constant(const Context&, cplx v) { return v; }
    static cplx variable(const Context& c, int k) { return c.point.at(k); }
    static cplx conjugate(const cplx& v) { return std::conj(v); }
    static cplx logarithm(const cplx& v) {
        if (v == cplx{}) throw DomainError("log at 0");
        return std::log(v);
    }
    static cplx divide(const cplx& a, const cplx& b) {
        if (b == cplx{}) throw DomainError("division by zero");
        return a / b;
    }
    static cplx power(const cplx& a, int k) {
        if (k < 0) return power(divide(1.0, a), -k);
        cplx r = 1.0, b = a;
        while (k > 0) {
            if (k & 1) r *= b;
            k >>= 1;
            if (k) b *= b;
        }
        return r;
    }
};

template <>
struct ScalarTraits<Series> {
    struct Context {
        Series::LayoutPtr layout;
        std::vector<cplx> point;
    };
    static Series constant(const Context& c, cplx v) { return Series(c.layout, v); }
    static Series variable(const Context& c, int k) { return Series::variable(c.layout, k, c.point.at(k)); }
    static Series conjugate(const Series& v) { return conj(v); }
    static Series logarithm(const Series& v) { return log(v); }
    static Series divide(const Series& a, const Series& b) { return a / b; }
    static Series power(const Series& a, int k) { return pow(a, k); }
};

/// Evaluates over T. Conjugation of a variable z_k is never formed directly:
/// conj(expr) is pushed through ScalarTraits::conjugate, which for Series is
/// the (u, ubar) exponent swap.
template <class T>
T evaluate(const Expr& e, const typename ScalarTraits<T>::Context& ctx, const ParameterMap& params) {
    using Tr = ScalarTraits<T>;
    switch (e.op) {
        case Op::Number: return Tr::constant(ctx, e.number);
        case Op::Variable: return Tr::variable(ctx, e.index);
        case Op::Parameter: {
            auto it = params.find(e.name);
            if (it == params.end()) throw ArgumentError("unbound parameter '" + e.name + "'");
            return Tr::constant(ctx, it->second);
        }
        case Op::Neg: return -evaluate<T>(*e.lhs, ctx, params);
        case Op::Add: return evaluate<T>(*e.lhs, ctx, params) + evaluate<T>(*e.rhs, ctx, params);
        case Op::Sub: return evaluate<T>(*e.lhs, ctx, params) - evaluate<T>(*e.rhs, ctx, params);
        case Op::Mul: return evaluate<T>(*e.lhs, ctx, params) * evaluate<T>(*e.rhs, ctx, params);
        case Op::Div: return Tr::divide(evaluate<T>(*e.lhs, ctx, params), evaluate<T>(*e.rhs, ctx, params));
        case Op::Pow: return Tr::power(evaluate<T>(*e.lhs, ctx, params), e.index);
        case Op::Re: {
            T v = evaluate<T>(*e.lhs, ctx, params);
            return (v + Tr::conjugate(v)) * cplx(0.5);
        }
        case Op::Im: {
            T v = evaluate<T>(*e.lhs, ctx, params);
            return (v - Tr::conjugate(v)) * cplx(0.0, -0.5);
        }
        case Op::Abs2: {
            T v = evaluate<T>(*e.lhs, ctx, params);
            return v * Tr::conjugate(v);
        }
        case Op::Conj: return Tr::conjugate(evaluate<T>(*e.lhs, ctx, params));
        case Op::Log: return Tr::logarithm(evaluate<T>(*e.lhs, ctx, params));
    }
    throw Error("corrupt expression node");
}

}  // namespace pscurv
