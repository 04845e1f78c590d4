#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pscurv/catalog.hpp"
#include "pscurv/secondform.hpp"

namespace pscurv {

inline constexpr double kConstantHessianTolerance = 1e-10;
inline constexpr double kTorsionTolerance = 1e-8;
inline constexpr double kBoundTolerance = 1e-9;

/// One (point, direction) evaluation of the Gauss path.
struct CurvatureSample {
    Point point;
    /// h-unit direction in the Z_alpha basis.
    Eigen::VectorXcd direction;
    double K = 0.0;
    double K_ambient = 0.0;
    double H2 = 0.0;
    double absA = 0.0;
    /// K - K_ambient/2 - H2/2.
    double bound_residual = 0.0;
    /// H2 - |A(Z)|.
    double torsion_margin = 0.0;
};

/// K(Z) = K_ambient/2 + |H|^2 - |A(Z)|^2 / (2 |H|^2).
inline double sectional_curvature(const SurfaceFrame& fr, const CMatrix& A, const Eigen::VectorXcd& zeta,
                                  double K_ambient = 0.0) {
    const double absA = std::abs(torsion_of(fr, A, zeta));
    return 0.5 * K_ambient + fr.mean_curvature2 - 0.5 * absA * absA / fr.mean_curvature2;
}

inline CurvatureSample curvature_sample(const SurfaceFrame& fr, const CMatrix& A, const Eigen::VectorXcd& zeta,
                                        double K_ambient = 0.0) {
    CurvatureSample s;
    s.point = fr.point;
    s.direction = zeta / std::sqrt(fr.norm2(zeta));
    s.K_ambient = K_ambient;
    s.H2 = fr.mean_curvature2;
    s.absA = std::abs(torsion_of(fr, A, s.direction));
    s.K = 0.5 * K_ambient + s.H2 - 0.5 * s.absA * s.absA / s.H2;
    s.bound_residual = s.K - 0.5 * K_ambient - 0.5 * s.H2;
    s.torsion_margin = s.H2 - s.absA;
    return s;
}

/// h-unit directions at a frame: the Takagi extremal direction first, then
/// complex Gaussians in frame coordinates.
inline std::vector<Eigen::VectorXcd> sample_directions(const SurfaceFrame& fr, const PseudohermitianData& data,
                                                       int count, CounterRng& rng) {
    std::vector<Eigen::VectorXcd> out;
    const int n = fr.cr_dimension();
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXcd z(n);
        if (k == 0) {
            z = data.extremal_direction;
        } else {
            for (int a = 0; a < n; ++a) z[a] = rng.complex_normal();
        }
        out.push_back(z / std::sqrt(fr.norm2(z)));
    }
    return out;
}

/// Deviation of rho_{j kbar} from being constant and equal to the metric.
struct HessianCheck {
    double variation = 0.0;
    double metric_mismatch = 0.0;
    bool constant() const { return variation < kConstantHessianTolerance && metric_mismatch < kConstantHessianTolerance; }
};

inline HessianCheck check_constant_hessian(const std::vector<SurfaceFrame>& frames, const AmbientMetric& a) {
    HessianCheck c;
    if (frames.empty()) return c;
    const CMatrix ref = frames.front().jet.levi();
    c.metric_mismatch = (ref - a.matrix()).cwiseAbs().maxCoeff();
    for (const auto& fr : frames) c.variation = std::max(c.variation, (fr.jet.levi() - ref).cwiseAbs().maxCoeff());
    return c;
}

/// Per-point summary of the Gauss-path quantities.
struct PointRecord {
    Point point;
    double grad_norm2 = 0.0;
    double H2 = 0.0;
    double supA = 0.0;
    double bp_min = 0.0;
    double levi_condition = 0.0;
    double K_min = 0.0;
    double K_max = 0.0;
    double min_bound_residual = 0.0;
    double min_torsion_margin = 0.0;
    std::vector<CurvatureSample> directions;

    bool bp_convex() const { return bp_min >= -kTorsionTolerance; }
    bool torsion_convex() const { return supA <= H2 + kTorsionTolerance; }
};

inline PointRecord analyze_point(const SurfaceFrame& fr, const AmbientMetric& a, int n_dirs, CounterRng& rng) {
    const PseudohermitianData data = pseudohermitian_data(fr, a);
    PointRecord r;
    r.point = fr.point;
    r.grad_norm2 = fr.grad_norm2;
    r.H2 = fr.mean_curvature2;
    r.supA = data.sup_torsion;
    r.bp_min = data.bp_min;
    r.levi_condition = fr.levi_condition;
    r.K_min = r.min_bound_residual = r.min_torsion_margin = std::numeric_limits<double>::infinity();
    r.K_max = -std::numeric_limits<double>::infinity();
    for (const auto& z : sample_directions(fr, data, n_dirs, rng)) {
        CurvatureSample s = curvature_sample(fr, data.torsion, z);
        r.K_min = std::min(r.K_min, s.K);
        r.K_max = std::max(r.K_max, s.K);
        r.min_bound_residual = std::min(r.min_bound_residual, s.bound_residual);
        r.min_torsion_margin = std::min(r.min_torsion_margin, s.torsion_margin);
        r.directions.push_back(std::move(s));
    }
    return r;
}

struct TheoremReport {
    std::vector<PointRecord> points;
    HessianCheck hessian;
    double min_torsion_margin = 0.0;
    double min_bound_residual = 0.0;
    double K_min = 0.0;
    double K_max = 0.0;
    double min_bp = 0.0;
    /// Points where the Behnke-Peschl and torsion verdicts differ.
    int disagreements = 0;

    /// Pseudohermitian C-convexity over all samples.
    bool convex() const { return min_torsion_margin >= -kTorsionTolerance; }
    /// The curvature bound is asserted only under the constant-Hessian
    /// hypothesis and C-convexity.
    bool theorem_applicable() const { return hessian.constant() && convex(); }
    bool theorem_holds() const { return !theorem_applicable() || min_bound_residual >= -kBoundTolerance; }
    std::vector<std::string> flags() const {
        std::vector<std::string> f;
        if (!hessian.constant()) f.emplace_back("constant-Hessian hypothesis violated");
        if (!convex()) f.emplace_back("not pseudohermitian C-convex");
        return f;
    }
};

inline Seeder family_seeder(const FamilyInstance& family) {
    return [family](CounterRng& rng) { return family.seed_point(rng); };
}

/// Samples points and directions; direction streams use the index space
/// above the point streams so both stay independent of scheduling.
inline TheoremReport verify_main_theorem(const DefiningFunction& f, const AmbientMetric& a, std::size_t n_points,
                                         int n_dirs, std::uint64_t seed, const Seeder& seeder, unsigned threads = 0) {
    if (n_points == 0 || n_dirs < 1) throw ArgumentError("need at least one point and one direction");
    const auto frames = sample_surface(f, a, n_points, seed, seeder, threads);
    TheoremReport rep;
    rep.hessian = check_constant_hessian(frames, a);
    rep.points.resize(n_points);
    parallel_for(n_points, threads, [&](std::size_t i) {
        CounterRng rng(seed, (std::uint64_t{1} << 40) + i);
        rep.points[i] = analyze_point(frames[i], a, n_dirs, rng);
    });
    rep.min_torsion_margin = rep.min_bound_residual = rep.K_min = rep.min_bp = std::numeric_limits<double>::infinity();
    rep.K_max = -std::numeric_limits<double>::infinity();
    for (const auto& p : rep.points) {
        rep.min_torsion_margin = std::min(rep.min_torsion_margin, p.min_torsion_margin);
        rep.min_bound_residual = std::min(rep.min_bound_residual, p.min_bound_residual);
        rep.K_min = std::min(rep.K_min, p.K_min);
        rep.K_max = std::max(rep.K_max, p.K_max);
        rep.min_bp = std::min(rep.min_bp, p.bp_min);
        if (p.bp_convex() != p.torsion_convex()) ++rep.disagreements;
    }
    return rep;
}

inline TheoremReport verify_main_theorem(const FamilyInstance& family, std::size_t n_points, int n_dirs,
                                         std::uint64_t seed, unsigned threads = 0) {
    return verify_main_theorem(family.contact_function(), family.metric, n_points, n_dirs, seed,
                               family_seeder(family), threads);
}

/// Closed-form Tanaka-Webster curvature tensor of the perturbed sphere,
/// R_{a bbar c sbar} = -h_{ac} conj(h_{bs})/2 + (h_{a bbar} h_{c sbar} + h_{a sbar} h_{c bbar})/2.
class ReferenceTensorE {
public:
    /// `levi` is h_{a bbar}; `holomorphic` is h_{ac}.
    ReferenceTensorE(CMatrix levi, CMatrix holomorphic)
        : h_(std::move(levi)), s_(std::move(holomorphic)), n_(static_cast<int>(h_.rows())),
          r_(static_cast<std::size_t>(n_ * n_ * n_ * n_)) {
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c)
                    for (int s = 0; s < n_; ++s)
                        r_[index(a, b, c, s)] =
                            -0.5 * s_(a, c) * std::conj(s_(b, s)) + 0.5 * (h_(a, b) * h_(c, s) + h_(a, s) * h_(c, b));
        // Contractions are taken in the h-orthonormal frame Z' = L^{-1} Z with
        // h = L L^*, where h' = I and s' = L^{-1} s L^{-T}. Inverting h
        // directly loses cond(h)^2 digits near the chart boundary.
        Eigen::LLT<CMatrix> llt(h_);
        if (llt.info() != Eigen::Success) throw NumericError("Levi matrix is not positive definite");
        const CMatrix L = llt.matrixL();
        const auto lower = L.triangularView<Eigen::Lower>();
        const CMatrix half = lower.solve(s_);
        const CMatrix s1 = lower.solve(half.transpose()).transpose();
        // Ric' = (n+1)/2 I - s' s'^* / 2 and Ric = L Ric' L^*.
        ricci_orthonormal_ = 0.5 * (n_ + 1.0) * CMatrix::Identity(n_, n_) - 0.5 * s1 * s1.adjoint();
        ricci_orthonormal_ = (0.5 * (ricci_orthonormal_ + ricci_orthonormal_.adjoint())).eval();
        ricci_ = L * ricci_orthonormal_ * L.adjoint();
        scalar_ = 0.5 * n_ * (n_ + 1.0) - 0.5 * s1.squaredNorm();
    }

    explicit ReferenceTensorE(const SurfaceFrame& fr) : ReferenceTensorE(fr.levi, fr.holomorphic_hessian) {}

    int cr_dimension() const { return n_; }
    cplx operator()(int a, int b, int c, int s) const { return r_[index(a, b, c, s)]; }
    const CMatrix& ricci() const { return ricci_; }
    double scalar() const { return scalar_; }

    /// K(Z) = R(zeta, zetabar, zeta, zetabar) / (2 |Z|^4).
    double sectional(const Eigen::VectorXcd& zeta) const {
        cplx acc = 0.0;
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c)
                    for (int s = 0; s < n_; ++s)
                        acc += r_[index(a, b, c, s)] * zeta[a] * std::conj(zeta[b]) * zeta[c] * std::conj(zeta[s]);
        const double norm2 = (zeta.transpose() * h_ * zeta.conjugate())(0, 0).real();
        return 0.5 * acc.real() / (norm2 * norm2);
    }

    /// Smallest eigenvalue of h^{-1} Ric.
    double ricci_lower_bound() const {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(ricci_orthonormal_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    /// Largest violation of R_{a bbar c sbar} = R_{c bbar a sbar} = R_{a sbar c bbar}
    /// and conj(R_{a bbar c sbar}) = R_{b abar s cbar}.
    double symmetry_defect() const {
        double worst = 0.0;
        for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b)
                for (int c = 0; c < n_; ++c)
                    for (int s = 0; s < n_; ++s) {
                        const cplx v = r_[index(a, b, c, s)];
                        worst = std::max({worst, std::abs(v - r_[index(c, b, a, s)]), std::abs(v - r_[index(a, s, c, b)]),
                                          std::abs(std::conj(v) - r_[index(b, a, s, c)])});
                    }
        return worst;
    }

private:
    std::size_t index(int a, int b, int c, int s) const {
        return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + s);
    }

    CMatrix h_, s_;
    int n_;
    std::vector<cplx> r_;
    CMatrix ricci_;
    CMatrix ricci_orthonormal_;
    double scalar_ = 0.0;
};

/// Inputs gathered by the caller for the first Kohn-Laplacian eigenvalue.
struct Lambda1Inputs {
    int cr_dimension = 1;
    std::vector<double> grad_norm2;
    /// Webster scalar curvature per sample (n = 1 only).
    std::vector<double> scalar_curvature;
    /// Lower bound of h^{-1} Ric (n >= 2, reference-tensor families only).
    std::optional<double> ricci_lower;
    bool convex = false;
    /// rho_{j kbar} = delta_{jk} on the samples.
    bool levi_identity = false;
};

struct Lambda1Bound {
    std::string route;
    double value = 0.0;
};

struct Lambda1Report {
    std::vector<Lambda1Bound> lower;
    std::optional<Lambda1Bound> upper;
    std::vector<std::string> not_applicable;

    std::optional<double> best_lower() const {
        std::optional<double> best;
        for (const auto& b : lower) best = best ? std::max(*best, b.value) : b.value;
        return best;
    }
    bool consistent() const {
        const auto lo = best_lower();
        return !lo || !upper || *lo <= upper->value + kBoundTolerance;
    }
};

inline Lambda1Report lambda1_report(const Lambda1Inputs& in) {
    Lambda1Report rep;
    if (in.cr_dimension == 1 && !in.scalar_curvature.empty()) {
        rep.lower.push_back({"half_min_scalar_curvature",
                             0.5 * *std::min_element(in.scalar_curvature.begin(), in.scalar_curvature.end())});
    } else {
        rep.not_applicable.emplace_back("half_min_scalar_curvature");
    }
    if (in.convex && !in.grad_norm2.empty()) {
        double lo = std::numeric_limits<double>::infinity();
        for (double g : in.grad_norm2) lo = std::min(lo, 1.0 / g);
        rep.lower.push_back({"half_min_transverse_curvature", 0.5 * lo});
    } else {
        rep.not_applicable.emplace_back("half_min_transverse_curvature");
    }
    if (in.cr_dimension >= 2 && in.ricci_lower) {
        const double n = in.cr_dimension;
        rep.lower.push_back({"ricci", n / (n + 1.0) * *in.ricci_lower});
    } else {
        rep.not_applicable.emplace_back("ricci");
    }
    if (in.cr_dimension == 1 && in.levi_identity && !in.grad_norm2.empty()) {
        double sum = 0.0;
        for (double g : in.grad_norm2) sum += 1.0 / g;
        rep.upper = Lambda1Bound{"average_transverse_curvature", sum / static_cast<double>(in.grad_norm2.size())};
    } else {
        rep.not_applicable.emplace_back("average_transverse_curvature");
    }
    return rep;
}

}  // namespace pscurv
