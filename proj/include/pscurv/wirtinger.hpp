#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "pscurv/defining_function.hpp"
#include "pscurv/series.hpp"

namespace pscurv {

/// Wirtinger partials of a real function up to order 3 at a point.
///
/// Only rho, rho_j, rho_{jk}, rho_{j kbar}, rho_{jkl} and rho_{jk lbar} are
/// stored; every other type is recovered by conjugation, so the conjugation
/// identities hold bit for bit.
class Jet3 {
public:
    Jet3() = default;
    explicit Jet3(int dim)
        : dim_(dim), d1_(dim), d2_(dim * dim), d11_(dim * dim), d3_(dim * dim * dim), d21_(dim * dim * dim) {}

    int dimension() const noexcept { return dim_; }
    const Point& point() const noexcept { return point_; }
    double value() const noexcept { return value_; }

    cplx d(int j) const { return d1_[j]; }                                  // rho_j
    cplx dbar(int j) const { return std::conj(d1_[j]); }                    // rho_jbar
    cplx dd(int j, int k) const { return d2_[j * dim_ + k]; }               // rho_jk
    cplx dbardbar(int j, int k) const { return std::conj(dd(j, k)); }       // rho_jbar kbar
    cplx ddbar(int j, int k) const { return d11_[j * dim_ + k]; }           // rho_j kbar
    cplx ddd(int j, int k, int l) const { return d3_[(j * dim_ + k) * dim_ + l]; }       // rho_jkl
    cplx dd_dbar(int j, int k, int l) const { return d21_[(j * dim_ + k) * dim_ + l]; }  // rho_jk lbar
    cplx d_dbardbar(int j, int k, int l) const { return std::conj(dd_dbar(k, l, j)); }   // rho_j kbar lbar
    cplx dbar3(int j, int k, int l) const { return std::conj(ddd(j, k, l)); }            // rho_jbar kbar lbar

    /// Generic partial: variables 0..dim-1 are z_j, dim..2dim-1 are zbar_j.
    cplx partial(std::vector<int> vars) const {
        std::vector<int> holo, anti;
        for (int v : vars) (v < dim_ ? holo : anti).push_back(v < dim_ ? v : v - dim_);
        std::sort(holo.begin(), holo.end());
        std::sort(anti.begin(), anti.end());
        const std::size_t h = holo.size(), a = anti.size();
        if (h + a == 0) return value_;
        if (h + a == 1) return h ? d(holo[0]) : dbar(anti[0]);
        if (h + a == 2) {
            if (h == 2) return dd(holo[0], holo[1]);
            if (a == 2) return dbardbar(anti[0], anti[1]);
            return ddbar(holo[0], anti[0]);
        }
        if (h == 3) return ddd(holo[0], holo[1], holo[2]);
        if (h == 2) return dd_dbar(holo[0], holo[1], anti[0]);
        if (h == 1) return d_dbardbar(holo[0], anti[0], anti[1]);
        return dbar3(anti[0], anti[1], anti[2]);
    }

    Eigen::VectorXcd gradient() const {
        Eigen::VectorXcd g(dim_);
        for (int j = 0; j < dim_; ++j) g[j] = d(j);
        return g;
    }
    Eigen::MatrixXcd holomorphic_hessian() const {
        Eigen::MatrixXcd m(dim_, dim_);
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k) m(j, k) = dd(j, k);
        return m;
    }
    /// rho_{j kbar} as a Hermitian matrix.
    Eigen::MatrixXcd levi() const {
        Eigen::MatrixXcd m(dim_, dim_);
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k) m(j, k) = ddbar(j, k);
        return m;
    }
    /// Holomorphic Hessian of rho_{kbar}: (i, j) -> rho_{ij kbar}.
    Eigen::MatrixXcd holomorphic_hessian_of_dbar(int k) const {
        Eigen::MatrixXcd m(dim_, dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m(i, j) = dd_dbar(i, j, k);
        return m;
    }

    /// Extracts the jet from an order >= 3 series of a real function.
    static Jet3 from_series(const Series& s, const Point& z) {
        const int m = s.layout()->holomorphic_vars();
        Jet3 jet(m);
        jet.point_ = z;
        jet.value_ = s.value().real();
        SeriesLayout::Exponents e(2 * m, 0);
        auto at = [&](std::initializer_list<int> vars) {
            std::fill(e.begin(), e.end(), 0);
            for (int v : vars) ++e[v];
            return s.derivative(e);
        };
        for (int j = 0; j < m; ++j) {
            jet.d1_[j] = at({j});
            for (int k = j; k < m; ++k) {
                jet.d2_[j * m + k] = jet.d2_[k * m + j] = at({j, k});
                const cplx h = at({j, m + k});
                jet.d11_[j * m + k] = j == k ? cplx(h.real(), 0.0) : h;
                jet.d11_[k * m + j] = std::conj(jet.d11_[j * m + k]);
            }
        }
        for (int j = 0; j < m; ++j)
            for (int k = j; k < m; ++k)
                for (int l = k; l < m; ++l) {
                    const cplx v = at({j, k, l});
                    for (auto [a, b, c] : {std::array{j, k, l}, std::array{j, l, k}, std::array{k, j, l},
                                           std::array{k, l, j}, std::array{l, j, k}, std::array{l, k, j}})
                        jet.d3_[(a * m + b) * m + c] = v;
                }
        for (int j = 0; j < m; ++j)
            for (int k = j; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const cplx v = at({j, k, m + l});
                    jet.d21_[(j * m + k) * m + l] = jet.d21_[(k * m + j) * m + l] = v;
                }
        return jet;
    }

private:
    int dim_ = 0;
    Point point_;
    double value_ = 0.0;
    std::vector<cplx> d1_, d2_, d11_, d3_, d21_;
};

/// All Wirtinger partials of f at z up to order 3, by forward propagation of
/// truncated series in (z, zbar). Throws DomainError outside the domain.
inline Jet3 jet3(const DefiningFunction& f, const Point& z) {
    Series s = f.series(z, 3);
    if (!std::isfinite(std::abs(s.value()))) throw NumericError("overflow while evaluating the jet");
    for (auto c : s.coefficients())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw NumericError("overflow while evaluating the jet");
    return Jet3::from_series(s, z);
}

/// rho and rho_j only.
inline std::pair<double, Eigen::VectorXcd> jet1(const DefiningFunction& f, const Point& z) {
    Series s = f.series(z, 1);
    const int m = f.dimension();
    Eigen::VectorXcd g(m);
    SeriesLayout::Exponents e(2 * m, 0);
    for (int j = 0; j < m; ++j) {
        e[j] = 1;
        g[j] = s.derivative(e);
        e[j] = 0;
    }
    return {s.value().real(), g};
}

namespace detail {

// Central-difference stencils on the real coordinates x_j = Re z_j (index 2j)
// and y_j = Im z_j (index 2j+1), with two Richardson levels.
class RealDerivativeOracle {
public:
    RealDerivativeOracle(const DefiningFunction& f, const Point& z) : f_(f), z_(z), n_(2 * f.dimension()) {}

    double first(int a, double h) const {
        return richardson([&](double s) { return (eval({{a, s}}) - eval({{a, -s}})) / (2 * s); }, h);
    }
    double second(int a, int b, double h) const {
        return richardson(
            [&](double s) {
                double acc = 0.0;
                for (int sa : {1, -1})
                    for (int sb : {1, -1}) acc += sa * sb * eval({{a, sa * s}, {b, sb * s}});
                return acc / (4 * s * s);
            },
            h);
    }
    double third(int a, int b, int c, double h) const {
        return richardson(
            [&](double s) {
                double acc = 0.0;
                for (int sa : {1, -1})
                    for (int sb : {1, -1})
                        for (int sc : {1, -1}) acc += sa * sb * sc * eval({{a, sa * s}, {b, sb * s}, {c, sc * s}});
                return acc / (8 * s * s * s);
            },
            h);
    }
    int real_dimension() const { return n_; }

private:
    template <class F>
    static double richardson(F&& stencil, double h) {
        const double s0 = stencil(h), s1 = stencil(0.5 * h), s2 = stencil(0.25 * h);
        const double r0 = (4.0 * s1 - s0) / 3.0, r1 = (4.0 * s2 - s1) / 3.0;
        return (16.0 * r1 - r0) / 15.0;
    }

    double eval(std::initializer_list<std::pair<int, double>> shifts) const {
        Point w = z_;
        for (auto [coord, s] : shifts) w[coord / 2] += (coord % 2 == 0) ? cplx(s, 0.0) : cplx(0.0, s);
        return f_.evaluate_complex(w).real();
    }

    const DefiningFunction& f_;
    Point z_;
    int n_;
};

}  // namespace detail

/// Steps used by the finite-difference oracle for derivative orders 1, 2, 3.
/// A single 1e-5 step loses all precision at order 3, so higher orders widen.
inline constexpr std::array<double, 3> kFdSteps{1e-5, 1e-3, 5e-3};

/// Maximum over all multi-indices of order 1..3 of
/// |jet - fd| / max(1, |jet|), where fd are central finite differences of
/// plain complex evaluation (independent of the series engine).
inline double fd_residual(const DefiningFunction& f, const Point& z) {
    const Jet3 jet = jet3(f, z);
    const int m = f.dimension();
    const int n = 2 * m;
    detail::RealDerivativeOracle oracle(f, z);

    std::vector<double> D1(n), D2(n * n), D3(n * n * n);
    for (int a = 0; a < n; ++a) D1[a] = oracle.first(a, kFdSteps[0]);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) D2[a * n + b] = D2[b * n + a] = oracle.second(a, b, kFdSteps[1]);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c) {
                const double v = oracle.third(a, b, c, kFdSteps[2]);
                for (auto [i, j, k] : {std::array{a, b, c}, std::array{a, c, b}, std::array{b, a, c},
                                       std::array{b, c, a}, std::array{c, a, b}, std::array{c, b, a}})
                    D3[(i * n + j) * n + k] = v;
            }

    // d/dz_j = (d/dx_j - i d/dy_j)/2, d/dzbar_j = (d/dx_j + i d/dy_j)/2.
    auto weights = [&](int var) {
        const int j = var % m;
        const double sign = var < m ? -1.0 : 1.0;
        return std::array<std::pair<int, cplx>, 2>{{{2 * j, 0.5}, {2 * j + 1, cplx(0.0, 0.5 * sign)}}};
    };

    double worst = 0.0;
    auto compare = [&](std::vector<int> vars, cplx fd) {
        const cplx exact = jet.partial(vars);
        worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
    };
    for (int v1 = 0; v1 < n; ++v1) {
        cplx fd1 = 0.0;
        for (auto [a, wa] : weights(v1)) fd1 += wa * D1[a];
        compare({v1}, fd1);
        for (int v2 = v1; v2 < n; ++v2) {
            cplx fd2 = 0.0;
            for (auto [a, wa] : weights(v1))
                for (auto [b, wb] : weights(v2)) fd2 += wa * wb * D2[a * n + b];
            compare({v1, v2}, fd2);
            for (int v3 = v2; v3 < n; ++v3) {
                cplx fd3 = 0.0;
                for (auto [a, wa] : weights(v1))
                    for (auto [b, wb] : weights(v2))
                        for (auto [c, wc] : weights(v3)) fd3 += wa * wb * wc * D3[(a * n + b) * n + c];
                compare({v1, v2, v3}, fd3);
            }
        }
    }
    return worst;
}

}  // namespace pscurv
