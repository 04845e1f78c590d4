#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "pscurv/gausscurv.hpp"

namespace pscurv {

inline constexpr double kStructuralTolerance = 1e-7;

struct TW3Options {
    /// Coordinate used as w; -1 picks it from the gradient.
    int chart = -1;
    /// Gauge multiplier on Z_1: phase * (1 + sum_i gauge_gradient[i] u_i),
    /// u = (z1, z2, zbar1, zbar2) - p. Empty means a constant multiplier.
    cplx phase = 1.0;
    std::vector<cplx> gauge_gradient;
};

namespace detail {

/// Vector field on C^2 with series coefficients on (d_z1, d_z2, d_zbar1, d_zbar2).
using VectorField = std::array<Series, 4>;
/// 1-form with series coefficients on (dz1, dz2, dzbar1, dzbar2).
using OneForm = std::array<Series, 4>;

inline Series apply(const VectorField& v, const Series& g) {
    Series out = v[0] * g.diff(0);
    for (int i = 1; i < 4; ++i) out += v[i] * g.diff(i);
    return out;
}

inline VectorField bracket(const VectorField& x, const VectorField& y) {
    VectorField out;
    for (int i = 0; i < 4; ++i) out[i] = apply(x, y[i]) - apply(y, x[i]);
    return out;
}

inline Series contract(const OneForm& w, const VectorField& v) {
    Series out = w[0] * v[0];
    for (int i = 1; i < 4; ++i) out += w[i] * v[i];
    return out;
}

/// d(w)(X, Y) from the ambient partials of the coefficients.
inline Series exterior(const OneForm& w, const VectorField& x, const VectorField& y) {
    Series out = Series(x[0].layout(), 0.0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            out += w[j].diff(i) * (x[i] * y[j] - y[i] * x[j]);
        }
    return out;
}

inline VectorField conj_field(const VectorField& v) { return {conj(v[2]), conj(v[3]), conj(v[0]), conj(v[1])}; }

/// Series fields of the solved structure, kept for re-evaluation.
struct TW3Fields {
    int zi = 0, wi = 1;
    VectorField Z, Zbar, T;
    Series h;
    OneForm theta, theta1;
    Series a, b, c, A;
};

}  // namespace detail

/// Tanaka-Webster invariants of theta = i dbar(rho) at one point of a
/// hypersurface in C^2, in the coframe (theta, theta^1) dual to (T, Z_1).
struct TW3State {
    Point point;
    int chart = 1;
    /// h_{1 1bar} = -i dtheta(Z_1, Z_1bar).
    double h = 0.0;
    /// omega_1^1 = a theta^1 + b theta^1bar + c theta.
    cplx omega_a, omega_b, omega_c;
    /// A^1_{1bar}.
    cplx torsion;
    /// Webster scalar curvature.
    double R = 0.0;
    double R_imag = 0.0;
    std::shared_ptr<const detail::TW3Fields> fields;

    /// |A_11| / h_{1 1bar}.
    double abs_torsion() const { return std::abs(torsion); }
    /// A_11 = h_{1 1bar} conj(A^1_{1bar}).
    cplx torsion_lowered() const { return h * std::conj(torsion); }
};

/// Solves the structural equations
///   dtheta^1 = theta^1 ^ omega + A theta ^ theta^1bar,  dh = h (omega + omegabar)
/// in closed form from brackets of the frame (T, Z, Zbar), then reads R from
///   domega(Z, Zbar) = R h.
/// rho is expanded to order 4; every field below is an exact truncated series.
inline TW3State tw_direct(const DefiningFunction& f, const Point& p, const TW3Options& opt = {}) {
    if (f.dimension() != 2) throw ArgumentError("the direct solver needs a hypersurface in C^2");
    if (std::abs(f(p)) > kOnSurfaceTolerance) throw NumericError("point is not on the surface");
    const Series rho = f.series(p, 4);
    for (auto c : rho.coefficients())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NumericError("overflow while expanding rho");
    const auto layout = rho.layout();

    auto fields = std::make_shared<detail::TW3Fields>();
    auto& F = *fields;
    Eigen::VectorXcd grad(2);
    for (int j = 0; j < 2; ++j) grad[j] = rho.diff(j).value();
    if (!(grad.norm() > 0.0)) throw NumericError("gradient of rho vanishes");
    F.wi = opt.chart >= 0 ? opt.chart : detail::choose_chart(grad);
    if (F.wi < 0 || F.wi > 1) throw ArgumentError("chart must be 0 or 1");
    if (std::abs(grad[F.wi]) == 0.0) throw NumericError("no coordinate chart with rho_w != 0");
    F.zi = 1 - F.wi;
    const int zi = F.zi, wi = F.wi;

    std::array<Series, 2> d, dbar;
    for (int j = 0; j < 2; ++j) {
        d[j] = rho.diff(j);
        dbar[j] = rho.diff(2 + j);
    }
    std::array<std::array<Series, 2>, 2> levi;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) levi[j][k] = d[j].diff(2 + k);
    const Series zero(layout, 0.0);

    Series gauge(layout, opt.phase);
    for (std::size_t i = 0; i < opt.gauge_gradient.size() && i < 4; ++i)
        gauge += Series::variable(layout, static_cast<int>(i), 0.0) * (opt.phase * opt.gauge_gradient[i]);

    F.Z = {zero, zero, zero, zero};
    F.Z[zi] = gauge * d[wi];
    F.Z[wi] = -(gauge * d[zi]);
    F.Zbar = detail::conj_field(F.Z);

    // theta = i sum rho_kbar dzbar^k; dtheta = i sum rho_{j kbar} dz^j ^ dzbar^k.
    F.theta = {zero, zero, dbar[0] * cplx(0, 1), dbar[1] * cplx(0, 1)};
    auto dtheta = [&](const detail::VectorField& x, const detail::VectorField& y) {
        Series out = zero;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) out += levi[j][k] * (x[j] * y[2 + k] - y[j] * x[2 + k]);
        return out * cplx(0, 1);
    };
    F.h = dtheta(F.Z, F.Zbar) * cplx(0, -1);
    if (!(F.h.value().real() > 0.0)) throw NotStrictlyPseudoconvex("Levi form is not positive at the point");

    // T0 = i (N - Nbar) / |d rho|^2 with N = sum rho_jbar d_j.
    const Series norm2 = d[0] * dbar[0] + d[1] * dbar[1];
    const Series inv_norm2 = reciprocal(norm2);
    detail::VectorField T0;
    for (int j = 0; j < 2; ++j) {
        T0[j] = dbar[j] * inv_norm2 * cplx(0, 1);
        T0[2 + j] = d[j] * inv_norm2 * cplx(0, -1);
    }
    const Series inv_h = reciprocal(F.h);
    const Series cz = dtheta(T0, F.Zbar) * inv_h * cplx(0, 1);
    const Series czbar = conj(cz);
    for (int i = 0; i < 4; ++i) F.T[i] = T0[i] + cz * F.Z[i] + czbar * F.Zbar[i];

    // theta^1 = (dz - T^z theta) / Z^z.
    const Series inv_zz = reciprocal(F.Z[zi]);
    for (int i = 0; i < 4; ++i) {
        Series coeff = -(F.T[zi] * F.theta[i]);
        if (i == zi) coeff += 1.0;
        F.theta1[i] = coeff * inv_zz;
    }
    auto theta1 = [&](const detail::VectorField& v) { return detail::contract(F.theta1, v); };
    auto theta1bar = [&](const detail::VectorField& v) { return conj(theta1(detail::conj_field(v))); };
    auto theta = [&](const detail::VectorField& v) { return detail::contract(F.theta, v); };

    const detail::VectorField ZZbar = detail::bracket(F.Z, F.Zbar);
    F.b = -theta1(ZZbar);
    F.c = theta1(detail::bracket(F.T, F.Z));
    F.A = -theta1(detail::bracket(F.T, F.Zbar));
    F.a = detail::apply(F.Z, F.h) * inv_h - conj(F.b);

    const Series omega_on_bracket = F.a * theta1(ZZbar) + F.b * theta1bar(ZZbar) + F.c * theta(ZZbar);
    const Series curvature = detail::apply(F.Z, F.b) - detail::apply(F.Zbar, F.a) - omega_on_bracket;
    const cplx Rh = curvature.value() / F.h.value();

    TW3State s;
    s.point = p;
    s.chart = wi;
    s.h = F.h.value().real();
    s.omega_a = F.a.value();
    s.omega_b = F.b.value();
    s.omega_c = F.c.value();
    s.torsion = F.A.value();
    s.R = Rh.real();
    s.R_imag = Rh.imag();
    s.fields = std::move(fields);
    return s;
}

/// Least-squares solve of the structural equations at the point: unknowns
/// (a, b, c, A) as 8 reals, 12 real equations built from ambient exterior
/// derivatives of theta^1 and the derivatives of h along Z, Zbar, T.
struct StructuralCheck {
    /// Largest equation residual with the reported coefficients inserted.
    double residual = 0.0;
    /// Largest residual of the least-squares solution.
    double lsq_residual = 0.0;
    /// Largest difference between least-squares and closed-form coefficients.
    double lsq_discrepancy = 0.0;
};

inline StructuralCheck structural_check(const TW3State& state) {
    if (!state.fields) throw ArgumentError("state carries no fields");
    const auto& F = *state.fields;
    const cplx h = F.h.value();
    const cplx dZZb = detail::exterior(F.theta1, F.Z, F.Zbar).value();
    const cplx dTZ = detail::exterior(F.theta1, F.T, F.Z).value();
    const cplx dTZb = detail::exterior(F.theta1, F.T, F.Zbar).value();
    const cplx Zh = detail::apply(F.Z, F.h).value();
    const cplx Zbh = detail::apply(F.Zbar, F.h).value();
    const cplx Th = detail::apply(F.T, F.h).value();

    // Rows: complex equation k occupies real rows 2k, 2k+1.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(12, 8);
    Eigen::VectorXd y(12);
    auto put = [&](int eq, std::array<cplx, 4> coef, std::array<cplx, 4> conj_coef, cplx rhs) {
        // sum coef_k x_k + conj_coef_k conj(x_k) = rhs.
        for (int k = 0; k < 4; ++k) {
            const cplx re_part = coef[k] + conj_coef[k];
            const cplx im_part = cplx(0, 1) * (coef[k] - conj_coef[k]);
            M(2 * eq, 2 * k) = re_part.real();
            M(2 * eq + 1, 2 * k) = re_part.imag();
            M(2 * eq, 2 * k + 1) = im_part.real();
            M(2 * eq + 1, 2 * k + 1) = im_part.imag();
        }
        y[2 * eq] = rhs.real();
        y[2 * eq + 1] = rhs.imag();
    };
    // Unknown order: a, b, c, A.
    put(0, {0, 1, 0, 0}, {0, 0, 0, 0}, dZZb);
    put(1, {0, 0, -1, 0}, {0, 0, 0, 0}, dTZ);
    put(2, {0, 0, 0, 1}, {0, 0, 0, 0}, dTZb);
    put(3, {h, 0, 0, 0}, {0, h, 0, 0}, Zh);
    put(4, {0, h, 0, 0}, {h, 0, 0, 0}, Zbh);
    put(5, {0, 0, h, 0}, {0, 0, h, 0}, Th);

    Eigen::VectorXd closed(8);
    // The reported coefficients, not the fields they were read from.
    const std::array<cplx, 4> vals{state.omega_a, state.omega_b, state.omega_c, state.torsion};
    for (int k = 0; k < 4; ++k) {
        closed[2 * k] = vals[k].real();
        closed[2 * k + 1] = vals[k].imag();
    }
    StructuralCheck out;
    out.residual = (M * closed - y).cwiseAbs().maxCoeff();

    // dtheta = i h theta^1 ^ theta^1bar on the frame pairs.
    const cplx dth_ZZb = detail::exterior(F.theta, F.Z, F.Zbar).value();
    const cplx dth_TZ = detail::exterior(F.theta, F.T, F.Z).value();
    const cplx dth_TZb = detail::exterior(F.theta, F.T, F.Zbar).value();
    out.residual = std::max({out.residual, std::abs(dth_ZZb - cplx(0, 1) * h), std::abs(dth_TZ), std::abs(dth_TZb)});

    const Eigen::VectorXd x = M.colPivHouseholderQr().solve(y);
    out.lsq_residual = (M * x - y).cwiseAbs().maxCoeff();
    out.lsq_discrepancy = (x - closed).cwiseAbs().maxCoeff();
    return out;
}

/// Independent re-evaluation of both structural equations and of
/// dtheta = i h theta^1 ^ theta^1bar.
inline double structural_residual(const TW3State& state) { return structural_check(state).residual; }

/// R |Z|^2 + C0 Tor(Z, Z) for Z = zeta Z_1.
inline double c0_form(const TW3State& s, cplx zeta, double C0) {
    if (zeta == cplx{}) throw ArgumentError("zero direction");
    const double norm2 = s.h * std::norm(zeta);
    const double tor = 2.0 * (cplx(0, 1) * s.torsion_lowered() * zeta * zeta).real();
    return s.R * norm2 + C0 * tor;
}

/// Minimum of the C0-form over h-unit directions: R - 2 C0 |A_11| / h.
inline double c0_form_min(const TW3State& s, double C0) { return s.R - 2.0 * C0 * s.abs_torsion(); }

struct CrossValidation {
    double max_R_discrepancy = 0.0;
    double max_torsion_discrepancy = 0.0;
    double max_structural_residual = 0.0;
    std::size_t points = 0;
};

/// Compares the direct solver with the Gauss path (R = 2K, |A| = supA) on
/// sampled points. Refuses families outside the constant-Hessian setting.
inline CrossValidation cross_validate(const DefiningFunction& f, const AmbientMetric& a, std::size_t n_points,
                                      std::uint64_t seed, const Seeder& seeder, unsigned threads = 0) {
    if (f.dimension() != 2) throw ArgumentError("cross validation needs a hypersurface in C^2");
    const auto frames = sample_surface(f, a, n_points, seed, seeder, threads);
    if (!check_constant_hessian(frames, a).constant())
        throw ArgumentError("constant-Hessian hypothesis violated; the Gauss path does not apply");
    std::vector<std::array<double, 3>> rows(n_points);
    parallel_for(n_points, threads, [&](std::size_t i) {
        const auto& fr = frames[i];
        const PseudohermitianData data = pseudohermitian_data(fr, a);
        const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(1);
        const double K = sectional_curvature(fr, data.torsion, one);
        const TW3State s = tw_direct(f, fr.point);
        rows[i] = {std::abs(s.R - 2.0 * K), std::abs(s.abs_torsion() - data.sup_torsion), structural_residual(s)};
    });
    CrossValidation cv;
    cv.points = n_points;
    for (const auto& r : rows) {
        cv.max_R_discrepancy = std::max(cv.max_R_discrepancy, r[0]);
        cv.max_torsion_discrepancy = std::max(cv.max_torsion_discrepancy, r[1]);
        cv.max_structural_residual = std::max(cv.max_structural_residual, r[2]);
    }
    return cv;
}

inline CrossValidation cross_validate(const FamilyInstance& family, std::size_t n_points, std::uint64_t seed,
                                      unsigned threads = 0) {
    return cross_validate(family.contact_function(), family.metric, n_points, seed, family_seeder(family), threads);
}

}  // namespace pscurv
