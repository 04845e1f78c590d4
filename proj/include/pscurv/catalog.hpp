#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "pscurv/defining_function.hpp"
#include "pscurv/rng.hpp"

namespace pscurv {

using FamilyParams = std::map<std::string, double>;

/// A catalog hypersurface: defining function, the flat metric it is
/// semi-isometric to, and how to seed surface sampling.
struct FamilyInstance {
    enum class Seeding { Gaussian, LogPolar };

    std::string name;
    FamilyParams params;
    DefiningFunction rho;
    AmbientMetric metric;
    /// The pseudohermitian structure is theta = contact_scale * i dbar(rho).
    double contact_scale = 1.0;
    Seeding seeding = Seeding::Gaussian;

    int cr_dimension() const { return rho.dimension() - 1; }

    /// Defining function whose i dbar is the family's contact form.
    DefiningFunction contact_function() const { return contact_scale == 1.0 ? rho : rho.scaled(contact_scale); }

    Point seed_point(CounterRng& rng) const {
        const int dim = rho.dimension();
        Point z(dim);
        if (seeding == Seeding::LogPolar) {
            const double eps = params.at("eps");
            const double phi = 2.0 * std::numbers::pi * rng.uniform();
            const double r = eps * (1.0 + 0.2 * rng.normal());
            for (int j = 0; j < dim; ++j) {
                const double log_modulus = r * (j == 0 ? std::cos(phi) : std::sin(phi));
                z[j] = std::polar(std::exp(log_modulus), 2.0 * std::numbers::pi * rng.uniform());
            }
            return z;
        }
        for (int j = 0; j < dim; ++j) z[j] = rng.complex_normal() * std::sqrt(0.5);
        return z;
    }
};

namespace detail {

inline double require(const FamilyParams& p, const std::string& family, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) throw ArgumentError(family + ": missing parameter '" + key + "'");
    if (!std::isfinite(it->second)) throw ArgumentError(family + ": parameter '" + key + "' is not finite");
    return it->second;
}

inline double optional_param(const FamilyParams& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

inline int cr_dimension_param(const FamilyParams& p, const std::string& family) {
    const double n = optional_param(p, "n", 1.0);
    if (n < 1 || n > 8 || n != std::floor(n)) throw ArgumentError(family + ": n must be an integer in [1, 8]");
    return static_cast<int>(n);
}

inline void reject_unknown(const FamilyParams& p, const std::string& family, const std::vector<std::string>& allowed) {
    for (const auto& [key, value] : p) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == key;
        if (!ok) throw ArgumentError(family + ": unknown parameter '" + key + "'");
    }
}

inline std::string sum_over(int dim, const std::string& pattern) {
    std::string out;
    for (int j = 1; j <= dim; ++j) {
        std::string term = pattern;
        for (std::size_t pos; (pos = term.find('#')) != std::string::npos;) term.replace(pos, 1, std::to_string(j));
        out += (j > 1 ? "+" : "") + term;
    }
    return out;
}

}  // namespace detail

inline const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names{"sphere", "ellipsoid", "perturbed_sphere_E", "hartogs", "reinhardt"};
    return names;
}

/// Builds a catalog family. Ellipsoids accept either (alpha, beta, gamma,
/// sigma) or the real axis coefficients (a, b, c, d) of
/// a x^2 + b y^2 + c u^2 + d v^2 = 1.
inline FamilyInstance builtin_family(const std::string& name, const FamilyParams& params) {
    if (name == "sphere") {
        detail::reject_unknown(params, name, {"n"});
        const int dim = detail::cr_dimension_param(params, name) + 1;
        auto rho = parse_defining_function(detail::sum_over(dim, "abs2(z#)") + "-1", dim);
        return {name, params, rho, AmbientMetric::identity(dim)};
    }
    if (name == "perturbed_sphere_E") {
        detail::reject_unknown(params, name, {"n"});
        const int dim = detail::cr_dimension_param(params, name) + 1;
        auto rho = parse_defining_function(
            detail::sum_over(dim, "abs2(z#)") + "+re(" + detail::sum_over(dim, "z#^2") + ")-1", dim);
        return {name, params, rho, AmbientMetric::identity(dim)};
    }
    if (name == "ellipsoid") {
        double alpha, beta, gamma, sigma;
        if (params.count("a") || params.count("b") || params.count("c") || params.count("d")) {
            detail::reject_unknown(params, name, {"a", "b", "c", "d"});
            const double a = detail::require(params, name, "a"), b = detail::require(params, name, "b");
            const double c = detail::require(params, name, "c"), d = detail::require(params, name, "d");
            if (a <= 0 || b <= 0 || c <= 0 || d <= 0) throw ArgumentError("ellipsoid: axis coefficients must be > 0");
            alpha = 0.5 * (a + b);
            beta = 0.5 * (c + d);
            gamma = 0.5 * (a - b);
            sigma = 0.5 * (c - d);
        } else {
            detail::reject_unknown(params, name, {"alpha", "beta", "gamma", "sigma"});
            alpha = detail::require(params, name, "alpha");
            beta = detail::require(params, name, "beta");
            gamma = detail::optional_param(params, "gamma", 0.0);
            sigma = detail::optional_param(params, "sigma", 0.0);
            if (alpha <= 0 || beta <= 0) throw ArgumentError("ellipsoid: alpha and beta must be > 0");
            if (std::abs(gamma) >= alpha || std::abs(sigma) >= beta)
                throw ArgumentError("ellipsoid: need |gamma| < alpha and |sigma| < beta");
        }
        ParameterMap bound{{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}, {"sigma", sigma}};
        auto rho = parse_defining_function("alpha*abs2(z1)+beta*abs2(z2)+re(gamma*z1^2+sigma*z2^2)-1", 2, bound);
        return {name, params, rho, AmbientMetric::diagonal({alpha, beta})};
    }
    if (name == "hartogs") {
        detail::reject_unknown(params, name, {"t"});
        const double t = detail::require(params, name, "t");
        if (t < 0.0 || t > 1.0) throw ArgumentError("hartogs: t must lie in [0, 1]");
        auto rho = parse_defining_function("-1+abs2(z1)+abs2(z2)+t*re(z1^2)^2", 2, {{"t", t}});
        return {name, params, rho, AmbientMetric::identity(2)};
    }
    if (name == "reinhardt") {
        detail::reject_unknown(params, name, {"eps"});
        const double eps = detail::require(params, name, "eps");
        if (eps <= 0.0) throw ArgumentError("reinhardt: eps must be > 0");
        auto rho = parse_defining_function("(0.5*log(abs2(z1)))^2+(0.5*log(abs2(z2)))^2-eps^2", 2, {{"eps", eps}});
        // i dbar(rho / eps^2) is the structure locally isomorphic to the
        // perturbed sphere E with n = 1.
        return {name, params, rho, AmbientMetric::identity(2), 1.0 / (eps * eps), FamilyInstance::Seeding::LogPolar};
    }
    throw ArgumentError("unknown family '" + name + "'");
}

}  // namespace pscurv
