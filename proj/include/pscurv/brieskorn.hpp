#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pscurv/errors.hpp"
#include "pscurv/expression.hpp"
#include "pscurv/parallel.hpp"
#include "pscurv/rng.hpp"
#include "pscurv/series.hpp"

namespace pscurv {

inline constexpr double kLinkTolerance = 1e-10;
inline constexpr int kLinkAttempts = 20;
inline constexpr int kLinkNewtonIterations = 100;

namespace detail {

/// z^k by repeated squaring; exact for k = 0 at z = 0.
inline cplx ipow(cplx z, std::int64_t k) {
    cplx result = 1.0;
    while (k > 0) {
        if (k & 1) result *= z;
        k >>= 1;
        if (k) z *= z;
    }
    return result;
}

}  // namespace detail

struct LinkWeights {
    std::int64_t d = 0;
    std::vector<std::int64_t> w;
};

/// d = lcm(a_j), w_j = d / a_j.
inline LinkWeights weights(const std::vector<int>& exponents) {
    LinkWeights out;
    out.d = 1;
    for (int a : exponents) {
        if (a < 2) throw ArgumentError("Brieskorn exponents must be >= 2");
        out.d = std::lcm(out.d, static_cast<std::int64_t>(a));
    }
    for (int a : exponents) out.w.push_back(out.d / a);
    return out;
}

/// M(r) = {sum z_j^{a_j} = 0} intersected with {|z|^2 = r}.
class BrieskornLink {
public:
    BrieskornLink(std::vector<int> exponents, double r) : a_(std::move(exponents)), r_(r), weights_(weights(a_)) {
        if (a_.size() < 3) throw ArgumentError("need >= 3 exponents");
        if (!(r_ > 0.0) || !std::isfinite(r_)) throw ArgumentError("radius must be > 0");
    }

    const std::vector<int>& exponents() const { return a_; }
    int ambient_dimension() const { return static_cast<int>(a_.size()); }
    double radius() const { return r_; }
    std::int64_t degree() const { return weights_.d; }
    const std::vector<std::int64_t>& weight_vector() const { return weights_.w; }

    cplx polynomial(const Eigen::VectorXcd& z) const {
        cplx s = 0.0;
        for (int j = 0; j < ambient_dimension(); ++j) s += detail::ipow(z[j], a_[j]);
        return s;
    }
    /// dp/dz_j = a_j z_j^{a_j - 1}.
    Eigen::VectorXcd gradient(const Eigen::VectorXcd& z) const {
        Eigen::VectorXcd g(ambient_dimension());
        for (int j = 0; j < ambient_dimension(); ++j) g[j] = static_cast<double>(a_[j]) * detail::ipow(z[j], a_[j] - 1);
        return g;
    }
    /// |H|^2 = sum w_j |z_j|^2.
    double mean_curvature2(const Eigen::VectorXcd& z) const {
        double s = 0.0;
        for (int j = 0; j < ambient_dimension(); ++j) s += static_cast<double>(weights_.w[j]) * std::norm(z[j]);
        return s;
    }
    /// ||xi||^2 = d sum a_j |z_j|^{2 a_j - 2}.
    double xi_norm2(const Eigen::VectorXcd& z) const {
        double s = 0.0;
        for (int j = 0; j < ambient_dimension(); ++j) s += a_[j] * std::pow(std::norm(z[j]), a_[j] - 1);
        return static_cast<double>(weights_.d) * s;
    }
    /// The polynomial as an expression tree, for generic differentiation.
    ExprPtr polynomial_expression() const {
        ExprPtr e;
        for (int j = 0; j < ambient_dimension(); ++j) {
            ExprPtr term = Expr::make_pow(Expr::make_variable(j), a_[j]);
            e = e ? Expr::make_binary(Op::Add, e, term) : term;
        }
        return e;
    }

private:
    std::vector<int> a_;
    double r_;
    LinkWeights weights_;
};

/// p(lambda^{w_j} z_j) - lambda^d p(z), relative to max(1, |lambda^d p(z)|).
inline double homogeneity_defect(const BrieskornLink& link, const Eigen::VectorXcd& z, cplx lambda) {
    Eigen::VectorXcd s(z.size());
    for (int j = 0; j < z.size(); ++j) s[j] = detail::ipow(lambda, link.weight_vector()[j]) * z[j];
    const cplx expected = detail::ipow(lambda, link.degree()) * link.polynomial(z);
    return std::abs(link.polynomial(s) - expected) / std::max(1.0, std::abs(expected));
}

/// Largest of |p(z)| and ||z|^2 - r|.
inline double link_residual(const BrieskornLink& link, const Eigen::VectorXcd& z) {
    return std::max(std::abs(link.polynomial(z)), std::abs(z.squaredNorm() - link.radius()));
}

namespace detail {

/// Gauss-Newton with minimum-norm steps on (Re p, Im p, |z|^2 - r).
inline bool newton_link(const BrieskornLink& link, Eigen::VectorXcd& z) {
    const int m = link.ambient_dimension();
    for (int it = 0; it < kLinkNewtonIterations; ++it) {
        const cplx p = link.polynomial(z);
        Eigen::Vector3d F(p.real(), p.imag(), z.squaredNorm() - link.radius());
        if (!F.allFinite()) return false;
        if (F.cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, link.radius())) return true;
        const Eigen::VectorXcd g = link.gradient(z);
        Eigen::MatrixXd J(3, 2 * m);
        for (int j = 0; j < m; ++j) {
            J(0, 2 * j) = g[j].real();
            J(0, 2 * j + 1) = -g[j].imag();
            J(1, 2 * j) = g[j].imag();
            J(1, 2 * j + 1) = g[j].real();
            J(2, 2 * j) = 2.0 * z[j].real();
            J(2, 2 * j + 1) = 2.0 * z[j].imag();
        }
        const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(-F);
        if (!step.allFinite()) return false;
        for (int j = 0; j < m; ++j) z[j] += cplx(step[2 * j], step[2 * j + 1]);
    }
    return link_residual(link, z) < 1e-12;
}

}  // namespace detail

/// Points on the link; point i depends only on (seed, i).
inline std::vector<Eigen::VectorXcd> sample_link(const BrieskornLink& link, std::size_t count, std::uint64_t seed,
                                                 unsigned threads = 0) {
    if (count < 1) throw ArgumentError("count must be >= 1");
    const int m = link.ambient_dimension();
    std::vector<Eigen::VectorXcd> out(count);
    parallel_for(count, threads, [&](std::size_t i) {
        CounterRng rng(seed, i);
        for (int attempt = 0; attempt < kLinkAttempts; ++attempt) {
            Eigen::VectorXcd z(m);
            for (int j = 0; j < m; ++j) z[j] = rng.complex_normal();
            z *= std::sqrt(link.radius()) / z.norm();
            if (!detail::newton_link(link, z)) continue;
            if (link_residual(link, z) >= kLinkTolerance) continue;
            if (link.gradient(z).norm() < 1e-8) continue;
            out[i] = z;
            return;
        }
        throw NumericError("link sampling did not converge for sample " + std::to_string(i));
    });
    return out;
}

/// Basis of T^{1,0}M(r) at z: solutions of sum a_k z_k^{a_k-1} W^k = 0 and
/// sum zbar_k W^k = 0, orthonormal for sum w_k^{-1} W^k conj(V^k).
/// Columns are the basis vectors.
inline Eigen::MatrixXcd tangent_frame(const BrieskornLink& link, const Eigen::VectorXcd& z) {
    const int m = link.ambient_dimension();
    Eigen::VectorXd sqrt_w(m);
    for (int j = 0; j < m; ++j) sqrt_w[j] = std::sqrt(static_cast<double>(link.weight_vector()[j]));
    Eigen::MatrixXcd C(2, m);
    C.row(0) = link.gradient(z).transpose();
    C.row(1) = z.conjugate().transpose();
    // W = D^{1/2} U turns the weighted metric into the standard one.
    const Eigen::MatrixXcd CU = C * sqrt_w.cast<cplx>().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(CU, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() < 2 || sv[1] < 1e-12 * std::max(1.0, sv[0])) throw DomainError("singular point of the link");
    const Eigen::MatrixXcd null = svd.matrixV().rightCols(m - 2);
    return sqrt_w.cast<cplx>().asDiagonal() * null;
}

/// Weighted Gram matrix sum w_k^{-1} W_a^k conj(W_b^k).
inline Eigen::MatrixXcd weighted_gram(const BrieskornLink& link, const Eigen::MatrixXcd& W) {
    Eigen::VectorXd inv_w(W.rows());
    for (int j = 0; j < W.rows(); ++j) inv_w[j] = 1.0 / static_cast<double>(link.weight_vector()[j]);
    return W.adjoint() * inv_w.cast<cplx>().asDiagonal() * W;
}

/// -|sum_k a_k (a_k - 1) z_k^{a_k - 2} (W^k)^2|^2 / ||xi||^2.
inline double ambient_sectional(const BrieskornLink& link, const Eigen::VectorXcd& z, const Eigen::VectorXcd& W) {
    const double xi2 = link.xi_norm2(z);
    if (!(xi2 > 0.0)) throw DomainError("singular point of the link");
    cplx s = 0.0;
    for (int k = 0; k < link.ambient_dimension(); ++k) {
        const int a = link.exponents()[k];
        s += static_cast<double>(a * (a - 1)) * detail::ipow(z[k], a - 2) * W[k] * W[k];
    }
    return -std::norm(s) / xi2;
}

/// -|sum_{j,k} p_{jk} W^j W^k|^2 / ||xi||^2 with the holomorphic Hessian of p
/// obtained by series propagation of the polynomial's expression tree.
inline double ambient_sectional_general(const BrieskornLink& link, const Eigen::VectorXcd& z,
                                        const Eigen::VectorXcd& W) {
    const double xi2 = link.xi_norm2(z);
    if (!(xi2 > 0.0)) throw DomainError("singular point of the link");
    const int m = link.ambient_dimension();
    ScalarTraits<Series>::Context ctx{SeriesLayout::get(m, 2), std::vector<cplx>(z.data(), z.data() + m)};
    const Series p = evaluate<Series>(*link.polynomial_expression(), ctx, {});
    cplx s = 0.0;
    SeriesLayout::Exponents e(2 * m, 0);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            ++e[j];
            ++e[k];
            s += p.derivative(e) * W[j] * W[k];
            --e[j];
            --e[k];
        }
    return -std::norm(s) / xi2;
}

/// K(W) = sum w_j |z_j|^2 - |sum_k a_k (a_k - 1) z_k^{a_k - 2} (W^k)^2|^2 / (2 ||xi||^2).
inline double link_sectional(const BrieskornLink& link, const Eigen::VectorXcd& z, const Eigen::VectorXcd& W) {
    return link.mean_curvature2(z) + 0.5 * ambient_sectional(link, z, W);
}

struct LinkSample {
    Eigen::VectorXcd point;
    /// Weighted-unit tangent direction.
    Eigen::VectorXcd direction;
    double K = 0.0;
    double K_ambient = 0.0;
    double K_ambient_general = 0.0;
    double H2 = 0.0;
    double constraint_residual = 0.0;
    /// Largest violation of the two linear tangency constraints by the frame.
    double frame_residual = 0.0;
    /// Largest deviation of the weighted Gram matrix from the identity.
    double gram_defect = 0.0;
    /// K - K_ambient/2 - H2.
    double identity_residual = 0.0;
};

inline LinkSample link_sample(const BrieskornLink& link, const Eigen::VectorXcd& z, CounterRng& rng) {
    LinkSample s;
    s.point = z;
    const Eigen::MatrixXcd W = tangent_frame(link, z);
    Eigen::VectorXcd coeff(W.cols());
    for (int k = 0; k < coeff.size(); ++k) coeff[k] = rng.complex_normal();
    coeff.normalize();
    s.direction = W * coeff;
    s.K_ambient = ambient_sectional(link, z, s.direction);
    s.K_ambient_general = ambient_sectional_general(link, z, s.direction);
    s.H2 = link.mean_curvature2(z);
    s.K = link_sectional(link, z, s.direction);
    s.identity_residual = std::abs(s.K - 0.5 * s.K_ambient - s.H2);
    s.constraint_residual = link_residual(link, z);
    const Eigen::MatrixXcd g = link.gradient(z).transpose() * W;
    const Eigen::MatrixXcd t = z.adjoint() * W;
    s.frame_residual = std::max(g.cwiseAbs().maxCoeff(), t.cwiseAbs().maxCoeff());
    const auto G = weighted_gram(link, W);
    s.gram_defect = (G - Eigen::MatrixXcd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
    return s;
}

/// Samples the link and evaluates one random tangent direction per point.
inline std::vector<LinkSample> scan_link(const BrieskornLink& link, std::size_t count, std::uint64_t seed,
                                         unsigned threads = 0) {
    const auto points = sample_link(link, count, seed, threads);
    std::vector<LinkSample> out(count);
    parallel_for(count, threads, [&](std::size_t i) {
        CounterRng rng(seed, (std::uint64_t{1} << 40) + i);
        out[i] = link_sample(link, points[i], rng);
    });
    return out;
}

}  // namespace pscurv
