#pragma once

#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pscurv/errors.hpp"
#include "pscurv/expression.hpp"
#include "pscurv/parser.hpp"
#include "pscurv/rng.hpp"

namespace pscurv {

using Point = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A real-valued function rho(z, zbar) on C^{dimension}, with its parameter
/// bindings. Immutable.
class DefiningFunction {
public:
    static constexpr int kRealityProbes = 32;
    static constexpr double kRealityTolerance = 1e-12;

    DefiningFunction(ExprPtr expression, int dimension, ParameterMap parameters = {})
        : expr_(std::move(expression)), dim_(dimension), params_(std::move(parameters)) {
        if (dim_ < 2) throw ArgumentError("dimension must be at least 2");
        check_closed(*expr_);
    }

    int dimension() const noexcept { return dim_; }
    const ExprPtr& expression() const noexcept { return expr_; }
    const ParameterMap& parameters() const noexcept { return params_; }
    std::string to_string() const { return pscurv::to_string(*expr_); }

    cplx evaluate_complex(const Point& z) const {
        ScalarTraits<cplx>::Context ctx{std::vector<cplx>(z.data(), z.data() + z.size())};
        return evaluate<cplx>(*expr_, ctx, params_);
    }

    double operator()(const Point& z) const { return evaluate_complex(z).real(); }

    /// Taylor expansion about z in (u, ubar) to the given total order.
    Series series(const Point& z, int order) const {
        ScalarTraits<Series>::Context ctx{SeriesLayout::get(dim_, order),
                                          std::vector<cplx>(z.data(), z.data() + z.size())};
        return evaluate<Series>(*expr_, ctx, params_);
    }

    /// c * rho, keeping the parameter bindings.
    DefiningFunction scaled(double c) const {
        return DefiningFunction(Expr::make_binary(Op::Mul, Expr::make_number(c), expr_), dim_, params_);
    }

    /// The same function with parameters replaced by literals.
    DefiningFunction substituted() const { return DefiningFunction(substitute(expr_, params_), dim_, {}); }

    /// Largest |Im rho| / max(1, |Re rho|) over deterministic probe points
    /// drawn from a unit complex Gaussian. Points outside the domain are
    /// skipped; throws if none survive.
    double reality_defect() const {
        CounterRng rng(0x5eed, 0);
        double worst = 0.0;
        int evaluated = 0;
        for (int k = 0; k < kRealityProbes; ++k) {
            Point z(dim_);
            for (int j = 0; j < dim_; ++j) z[j] = rng.complex_normal();
            try {
                const cplx v = evaluate_complex(z);
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) continue;
                worst = std::max(worst, std::abs(v.imag()) / std::max(1.0, std::abs(v.real())));
                ++evaluated;
            } catch (const DomainError&) {
            }
        }
        if (evaluated == 0) throw DomainError("no probe point lies in the domain of the expression");
        return worst;
    }

private:
    void check_closed(const Expr& e) const {
        switch (e.op) {
            case Op::Number: return;
            case Op::Variable:
                if (e.index < 0 || e.index >= dim_)
                    throw ArgumentError("variable z" + std::to_string(e.index + 1) + " outside dimension");
                return;
            case Op::Parameter:
                if (!params_.count(e.name)) throw ArgumentError("unbound parameter '" + e.name + "'");
                return;
            case Op::Add: case Op::Sub: case Op::Mul: case Op::Div:
                check_closed(*e.lhs);
                check_closed(*e.rhs);
                return;
            default: check_closed(*e.lhs);
        }
    }

    ExprPtr expr_;
    int dim_;
    ParameterMap params_;
};

/// Parses a defining function and checks that it is real-valued by probe
/// evaluation. Throws ParseError or ArgumentError.
inline DefiningFunction parse_defining_function(std::string_view text, int dimension, const ParameterMap& params = {}) {
    if (dimension < 2 || dimension > 9) throw ArgumentError("dimension must be between 2 and 9");
    std::set<std::string> names;
    for (const auto& [name, value] : params) names.insert(name);
    DefiningFunction f(parse_expression(text, dimension, names), dimension, params);
    if (f.reality_defect() >= DefiningFunction::kRealityTolerance)
        throw ArgumentError("expression is not real-valued: '" + std::string(text) + "'");
    return f;
}

/// Constant Hermitian positive definite matrix a_{j kbar} of a flat Kähler
/// metric, with its inverse a^{j kbar}.
class AmbientMetric {
public:
    explicit AmbientMetric(CMatrix a) : a_(std::move(a)) {
        if (a_.rows() != a_.cols() || a_.rows() < 2) throw ArgumentError("metric must be square of size >= 2");
        if ((a_ - a_.adjoint()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, a_.cwiseAbs().maxCoeff()))
            throw ArgumentError("metric is not Hermitian");
        a_ = 0.5 * (a_ + a_.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(a_);
        if (es.eigenvalues().minCoeff() <= 0.0) throw ArgumentError("metric is not positive definite");
        inv_ = a_.inverse();
    }

    static AmbientMetric identity(int dim) { return AmbientMetric(CMatrix::Identity(dim, dim)); }
    static AmbientMetric diagonal(const std::vector<double>& d) {
        CMatrix a = CMatrix::Zero(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
        return AmbientMetric(a);
    }

    int dimension() const noexcept { return static_cast<int>(a_.rows()); }
    const CMatrix& matrix() const noexcept { return a_; }
    const CMatrix& inverse() const noexcept { return inv_; }

private:
    CMatrix a_;
    CMatrix inv_;
};

}  // namespace pscurv
