#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pscurv/defining_function.hpp"
#include "pscurv/parallel.hpp"
#include "pscurv/rng.hpp"
#include "pscurv/wirtinger.hpp"

namespace pscurv {

/// The Levi form is not positive definite at the point.
class NotStrictlyPseudoconvex : public NumericError {
public:
    using NumericError::NumericError;
};

inline constexpr double kOnSurfaceTolerance = 1e-10;
inline constexpr double kProjectionTolerance = 1e-12;
inline constexpr int kProjectionMaxIterations = 50;
inline constexpr double kPsdTolerance = 1e-8;
inline constexpr double kChartThreshold = 1e-8;

/// Newton iteration along the real gradient of rho, with step halving when a
/// full step does not decrease |rho|.
inline Point project_to_surface(const DefiningFunction& f, const Point& x0) {
    Point z = x0;
    for (int it = 0; it < kProjectionMaxIterations; ++it) {
        auto [value, grad] = jet1(f, z);
        if (!std::isfinite(value)) throw NumericError("defining function is not finite along the projection path");
        if (std::abs(value) < kProjectionTolerance) return z;
        const double g2 = grad.squaredNorm();
        if (!(g2 > 1e-300)) throw NumericError("vanishing gradient during projection");
        const Point step = -value * grad.conjugate() / (2.0 * g2);
        double scale = 1.0;
        Point trial = z + step;
        for (int halving = 0; halving < 30; ++halving) {
            try {
                if (std::abs(f(trial)) < std::abs(value)) break;
            } catch (const DomainError&) {
            }
            scale *= 0.5;
            trial = z + scale * step;
        }
        z = trial;
    }
    const double final_value = f(z);
    if (std::abs(final_value) < kProjectionTolerance) return z;
    throw NumericError("projection did not converge (|rho| = " + std::to_string(std::abs(final_value)) + ")");
}

/// Adapted frame Z_alpha = rho_w d_alpha - rho_alpha d_w at a point of
/// M = {rho = 0}, with the Levi matrix and the mean-curvature data.
struct SurfaceFrame {
    Point point;
    Jet3 jet;
    /// Index of the coordinate used as w (the last one unless rho_w is too small).
    int chart = 0;
    /// (n+1) x n, column alpha holds the ambient components of Z_alpha.
    CMatrix frame;
    /// h_{alpha betabar} = rho_{j kbar} Z_alpha^j conj(Z_beta^k).
    CMatrix levi;
    /// h_{alpha beta} = rho_{jk} Z_alpha^j Z_beta^k (complex symmetric).
    CMatrix holomorphic_hessian;
    /// |d rho|^2 = a^{j kbar} rho_j rho_kbar.
    double grad_norm2 = 0.0;
    /// |H|^2 = 1 / |d rho|^2.
    double mean_curvature2 = 0.0;
    double levi_condition = 0.0;

    int cr_dimension() const { return static_cast<int>(frame.cols()); }
    /// The frame vector for a direction zeta (components in the Z_alpha basis).
    Point ambient(const Eigen::VectorXcd& zeta) const { return frame * zeta; }
    /// |Z|^2 = h_{alpha betabar} zeta^alpha conj(zeta^beta).
    double norm2(const Eigen::VectorXcd& zeta) const { return (zeta.transpose() * levi * zeta.conjugate())(0, 0).real(); }
};

namespace detail {

inline CMatrix hermitian_part(const CMatrix& m) {
    CMatrix h = m;
    for (int i = 0; i < m.rows(); ++i) {
        h(i, i) = m(i, i).real();
        for (int j = i + 1; j < m.cols(); ++j) h(j, i) = std::conj(h(i, j));
    }
    return h;
}

inline CMatrix symmetric_part(const CMatrix& m) {
    CMatrix s = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j) s(j, i) = s(i, j);
    return s;
}

/// Frame matrix for the chart whose w coordinate is `w`.
inline CMatrix adapted_frame(const Eigen::VectorXcd& grad, int w) {
    const int dim = static_cast<int>(grad.size());
    CMatrix z = CMatrix::Zero(dim, dim - 1);
    int col = 0;
    for (int j = 0; j < dim; ++j) {
        if (j == w) continue;
        z(j, col) = grad[w];
        z(w, col) = -grad[j];
        ++col;
    }
    return z;
}

/// Chart choice: keep the last coordinate unless |rho_w| < 1e-8 |d rho|, in
/// which case use the coordinate with the largest |rho_j|.
inline int choose_chart(const Eigen::VectorXcd& grad) {
    const int last = static_cast<int>(grad.size()) - 1;
    if (std::abs(grad[last]) >= kChartThreshold * grad.norm()) return last;
    int best = 0;
    grad.cwiseAbs().maxCoeff(&best);
    return best;
}

}  // namespace detail

/// Builds the adapted frame at p. Throws NumericError when p is off the
/// surface or the gradient vanishes, NotStrictlyPseudoconvex when the Levi
/// matrix is not positive definite.
inline SurfaceFrame frame_from_jet(const Jet3& jet, const AmbientMetric& a) {
    if (a.dimension() != jet.dimension()) throw ArgumentError("metric dimension does not match the defining function");
    if (std::abs(jet.value()) > kOnSurfaceTolerance) throw NumericError("point is not on the surface");
    SurfaceFrame fr;
    fr.point = jet.point();
    fr.jet = jet;
    const Eigen::VectorXcd grad = jet.gradient();
    if (!(grad.norm() > 0.0)) throw NumericError("gradient of rho vanishes");
    fr.chart = detail::choose_chart(grad);
    if (std::abs(grad[fr.chart]) == 0.0) throw NumericError("no coordinate chart with rho_w != 0");
    fr.frame = detail::adapted_frame(grad, fr.chart);
    fr.levi = detail::hermitian_part(fr.frame.transpose() * jet.levi() * fr.frame.conjugate());
    fr.holomorphic_hessian = detail::symmetric_part(fr.frame.transpose() * jet.holomorphic_hessian() * fr.frame);
    fr.grad_norm2 = (grad.adjoint() * a.inverse() * grad)(0, 0).real();
    fr.mean_curvature2 = 1.0 / fr.grad_norm2;

    Eigen::SelfAdjointEigenSolver<CMatrix> es(fr.levi, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) throw NotStrictlyPseudoconvex("Levi matrix is not positive definite");
    fr.levi_condition = hi / lo;
    return fr;
}

inline SurfaceFrame frame_at(const DefiningFunction& f, const AmbientMetric& a, const Point& p) {
    return frame_from_jet(jet3(f, p), a);
}

/// Hessian of rho restricted to the complex tangent plane, as a real
/// symmetric 2n x 2n matrix in a Euclidean orthonormal real basis of the plane.
struct BehnkePeschl {
    double min_eigenvalue = 0.0;
    Eigen::MatrixXd form;
};

inline BehnkePeschl behnke_peschl(const SurfaceFrame& fr) {
    const int dim = static_cast<int>(fr.frame.rows());
    const int n = fr.cr_dimension();
    Eigen::MatrixXd spanning(2 * dim, 2 * n);
    for (int al = 0; al < n; ++al)
        for (int j = 0; j < dim; ++j) {
            const cplx v = fr.frame(j, al);
            spanning(2 * j, 2 * al) = v.real();
            spanning(2 * j + 1, 2 * al) = v.imag();
            spanning(2 * j, 2 * al + 1) = -v.imag();  // i * v
            spanning(2 * j + 1, 2 * al + 1) = v.real();
        }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(spanning);
    const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(2 * dim, 2 * n);

    CMatrix eta(dim, 2 * n);
    for (int c = 0; c < 2 * n; ++c)
        for (int j = 0; j < dim; ++j) eta(j, c) = cplx(basis(2 * j, c), basis(2 * j + 1, c));

    const CMatrix S = fr.jet.holomorphic_hessian();
    const CMatrix L = fr.jet.levi();
    const CMatrix holo = eta.transpose() * S * eta;
    const CMatrix mixed = eta.transpose() * L * eta.conjugate();
    BehnkePeschl out;
    out.form = holo.real() + mixed.real();
    out.form = (0.5 * (out.form + out.form.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.form, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    return out;
}

inline BehnkePeschl behnke_peschl(const DefiningFunction& f, const AmbientMetric& a, const Point& p) {
    return behnke_peschl(frame_at(f, a, p));
}

/// Draws an initial point for sample `index` from its own random stream.
using Seeder = std::function<Point(CounterRng&)>;

inline Seeder gaussian_seeder(int dim, double scale = std::sqrt(0.5)) {
    return [dim, scale](CounterRng& rng) {
        Point z(dim);
        for (int j = 0; j < dim; ++j) z[j] = scale * rng.complex_normal();
        return z;
    };
}

inline constexpr int kSampleAttempts = 20;

/// Projects random seeds onto M, rejecting points that fail to converge or
/// are not strictly pseudoconvex. Sample i depends only on (seed, i).
inline std::vector<SurfaceFrame> sample_surface(const DefiningFunction& f, const AmbientMetric& a, std::size_t count,
                                                std::uint64_t seed, const Seeder& seeder, unsigned threads = 0) {
    std::vector<SurfaceFrame> out(count);
    parallel_for(count, threads, [&](std::size_t i) {
        CounterRng rng(seed, i);
        for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
            try {
                const Point p = project_to_surface(f, seeder(rng));
                out[i] = frame_at(f, a, p);
                return;
            } catch (const NumericError&) {
            } catch (const DomainError&) {
            }
        }
        throw NumericError("sampling failure: no strictly pseudoconvex surface point found for sample " +
                           std::to_string(i));
    });
    return out;
}

}  // namespace pscurv
