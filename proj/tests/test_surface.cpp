#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace pscurv;
using pscurv::testing::point2;

namespace {

/// Random matrix unitary with respect to the Hermitian form h.
CMatrix h_unitary(const CMatrix& h, CounterRng& rng) {
    const int n = static_cast<int>(h.rows());
    CMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(g).householderQ();
    // The reframed Levi matrix is U^T h conj(U); it equals h when
    // U^* h^T U = h^T, which holds for U = L^{-*} q L^* with h^T = L L^*.
    const CMatrix L = Eigen::LLT<CMatrix>(h.transpose()).matrixL();
    return L.adjoint().inverse() * q * L.adjoint();
}

SurfaceFrame reframed(const SurfaceFrame& fr, const CMatrix& U) {
    SurfaceFrame out = fr;
    out.frame = fr.frame * U;
    out.levi = out.frame.transpose() * fr.jet.levi() * out.frame.conjugate();
    out.holomorphic_hessian = out.frame.transpose() * fr.jet.holomorphic_hessian() * out.frame;
    return out;
}

}  // namespace

TEST(Projection, SphereRadial) {
    const auto f = builtin_family("sphere", {}).rho;
    const Point p = project_to_surface(f, point2(2.0, 0.0));
    EXPECT_NEAR(std::abs(p[0] - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p[1]), 0.0, 1e-15);
}

TEST(Projection, PerturbedSphereRealStart) {
    const auto f = builtin_family("perturbed_sphere_E", {}).rho;
    const Point p = project_to_surface(f, point2(0.0, 2.0));
    EXPECT_NEAR(std::abs(p[0]), 0.0, 1e-15);
    EXPECT_NEAR(p[1].real(), 1.0 / std::numbers::sqrt2, 1e-12);
    EXPECT_NEAR(p[1].imag(), 0.0, 1e-15);
}

TEST(Projection, HartogsOnAxis) {
    const auto f = builtin_family("hartogs", {{"t", 1.0}}).rho;
    const Point p = project_to_surface(f, point2(0.0, 2.0));
    EXPECT_NEAR(std::abs(p[1] - 1.0), 0.0, 1e-12);
}

TEST(Projection, ResultLiesOnSurface) {
    for (const auto& fam : pscurv::testing::catalog_instances()) {
        for (std::size_t i = 0; i < 20; ++i) {
            CounterRng rng(31, i);
            const Point p = project_to_surface(fam.rho, fam.seed_point(rng));
            EXPECT_LT(std::abs(fam.rho(p)), 1e-12) << fam.name;
        }
    }
}

TEST(Projection, VanishingGradientIsReported) {
    const auto f = builtin_family("sphere", {}).rho;
    EXPECT_THROW(project_to_surface(f, point2(0.0, 0.0)), NumericError);
}

TEST(Frame, SphereAtNorthPole) {
    const auto fam = builtin_family("sphere", {});
    const SurfaceFrame fr = frame_at(fam.rho, fam.metric, point2(0.0, 1.0));
    EXPECT_EQ(fr.chart, 1);
    EXPECT_EQ(fr.frame(0, 0), cplx(1.0));
    EXPECT_EQ(fr.frame(1, 0), cplx(0.0));
    EXPECT_EQ(fr.levi(0, 0), cplx(1.0));
    EXPECT_EQ(fr.grad_norm2, 1.0);
    EXPECT_EQ(fr.mean_curvature2, 1.0);
}

TEST(Frame, PerturbedSphereHasConstantGradientNorm) {
    for (int n : {1, 2, 3}) {
        const auto fam = builtin_family("perturbed_sphere_E", {{"n", double(n)}});
        for (const auto& fr : pscurv::testing::family_frames(fam, 20, 32)) {
            EXPECT_NEAR(fr.grad_norm2, 2.0, 1e-11);
            EXPECT_NEAR(fr.mean_curvature2, 0.5, 1e-12);
        }
    }
}

TEST(Frame, EllipsoidGradientNormUsesMetric) {
    const double alpha = 1.5, beta = 2.0;
    const auto fam = builtin_family("ellipsoid", {{"alpha", alpha}, {"beta", beta}, {"gamma", 0.3}, {"sigma", 0.4}});
    for (const auto& fr : pscurv::testing::family_frames(fam, 20, 33)) {
        const double rz = std::norm(fr.jet.d(0)), rw = std::norm(fr.jet.d(1));
        EXPECT_NEAR(fr.grad_norm2, (beta * rz + alpha * rw) / (alpha * beta), 1e-13);
    }
}

TEST(Frame, Invariants) {
    for (const auto& fam : pscurv::testing::catalog_instances()) {
        for (const auto& fr : pscurv::testing::family_frames(fam, 20, 34)) {
            EXPECT_LT(std::abs(fam.rho(fr.point)), 1e-10) << fam.name;
            const Eigen::VectorXcd annihilated = fr.frame.transpose() * fr.jet.gradient();
            EXPECT_LT(annihilated.cwiseAbs().maxCoeff(), 1e-10) << fam.name;
            EXPECT_NEAR(fr.grad_norm2 * fr.mean_curvature2, 1.0, 4e-16) << fam.name;
            Eigen::SelfAdjointEigenSolver<CMatrix> es(fr.levi);
            EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << fam.name;
            EXPECT_TRUE(std::isfinite(fr.levi_condition));
            EXPECT_GE(fr.levi_condition, 1.0);
        }
    }
}

TEST(Frame, RejectsOffSurfacePoint) {
    const auto fam = builtin_family("sphere", {});
    EXPECT_THROW(frame_at(fam.rho, fam.metric, point2(0.0, 1.1)), NumericError);
}

TEST(Frame, RejectsNonPseudoconvexPoint) {
    // The outside of a sphere: rho = 1 - |z|^2 has negative Levi form.
    const auto f = parse_defining_function("1-abs2(z1)-abs2(z2)", 2);
    EXPECT_THROW(frame_at(f, AmbientMetric::identity(2), point2(0.0, 1.0)), NotStrictlyPseudoconvex);
}

TEST(Frame, SwitchesChartWhenLastPartialVanishes) {
    const auto fam = builtin_family("sphere", {});
    const SurfaceFrame fr = frame_at(fam.rho, fam.metric, point2(1.0, 0.0));
    EXPECT_EQ(fr.chart, 0);
    EXPECT_EQ(fr.levi(0, 0), cplx(1.0));
}

TEST(BehnkePeschl, SphereIsIdentity) {
    const auto fam = builtin_family("sphere", {});
    const auto bp = behnke_peschl(fam.rho, fam.metric, point2(0.0, 1.0));
    EXPECT_NEAR(bp.min_eigenvalue, 1.0, 1e-14);
    EXPECT_TRUE(bp.form.isApprox(Eigen::MatrixXd::Identity(2, 2), 1e-14));
}

TEST(BehnkePeschl, HartogsIsConvexAlongComplexTangents) {
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto fam = builtin_family("hartogs", {{"t", t}});
        double worst = 1.0;
        for (const auto& fr : pscurv::testing::family_frames(fam, 200, 35))
            worst = std::min(worst, behnke_peschl(fr).min_eigenvalue);
        EXPECT_GE(worst, -1e-8) << "t = " << t;
    }
}

TEST(BehnkePeschl, EllipsoidAxisForm) {
    const auto fam = builtin_family("ellipsoid", {{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}});
    for (const auto& fr : pscurv::testing::family_frames(fam, 100, 36)) EXPECT_GE(behnke_peschl(fr).min_eigenvalue, -1e-8);
}

TEST(BehnkePeschl, MatchesBruteForceRestriction) {
    // Oracle: minimize the real Hessian of rho over unit tangent vectors eta
    // with sum rho_j eta_j = 0, sampled directly in real coordinates.
    const auto fam = builtin_family("hartogs", {{"t", 0.6}});
    CounterRng rng(37, 0);
    for (const auto& fr : pscurv::testing::family_frames(fam, 5, 37)) {
        double best = 1e300;
        for (int k = 0; k < 20000; ++k) {
            Eigen::VectorXcd zeta(1);
            zeta[0] = rng.complex_normal();
            Eigen::VectorXcd eta = fr.frame * zeta;
            eta /= eta.norm();
            const cplx holo = (eta.transpose() * fr.jet.holomorphic_hessian() * eta)(0, 0);
            const cplx mixed = (eta.transpose() * fr.jet.levi() * eta.conjugate())(0, 0);
            best = std::min(best, holo.real() + mixed.real());
        }
        EXPECT_NEAR(behnke_peschl(fr).min_eigenvalue, best, 1e-6);
    }
}

TEST(SurfaceProperties, UnitaryReframingInvariance) {
    CounterRng rng(38, 0);
    for (const auto& fam : {builtin_family("perturbed_sphere_E", {{"n", 3}}),
                            builtin_family("ellipsoid", {{"alpha", 1.5}, {"beta", 2.0}, {"gamma", 0.3}, {"sigma", 0.4}})}) {
        for (const auto& fr : pscurv::testing::family_frames(fam, 10, 38)) {
            const CMatrix U = h_unitary(fr.levi, rng);
            const SurfaceFrame g = reframed(fr, U);
            EXPECT_LT((g.levi - fr.levi).cwiseAbs().maxCoeff(), 1e-10);
            EXPECT_NEAR(behnke_peschl(g).min_eigenvalue, behnke_peschl(fr).min_eigenvalue, 1e-10);
            EXPECT_EQ(g.grad_norm2, fr.grad_norm2);
        }
    }
}

TEST(SurfaceProperties, ScalingDefiningFunction) {
    for (const auto& fam : pscurv::testing::catalog_instances()) {
        const auto frames = pscurv::testing::family_frames(fam, 10, 39);
        for (double c : {0.5, 3.0}) {
            const auto scaled = fam.rho.scaled(c);
            for (const auto& fr : frames) {
                const SurfaceFrame g = frame_at(scaled, fam.metric, fr.point);
                EXPECT_NEAR(g.grad_norm2, c * c * fr.grad_norm2, 1e-10 * g.grad_norm2) << fam.name;
                const double b0 = behnke_peschl(fr).min_eigenvalue, b1 = behnke_peschl(g).min_eigenvalue;
                EXPECT_NEAR(b1, c * b0, 1e-9 * std::max(1.0, std::abs(b1))) << fam.name;
                if (std::abs(b0) > 1e-8) EXPECT_EQ(b0 > 0, b1 > 0);
            }
        }
    }
}
