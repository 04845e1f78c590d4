#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "pscurv/surface.hpp"

namespace pscurv {

namespace detail {

/// Ambient coordinate index of frame index alpha in the given chart.
inline int frame_coordinate(int alpha, int chart) { return alpha < chart ? alpha : alpha + 1; }

}  // namespace detail

/// D^rho_{alpha beta}(phi) = phi_ZZ(Z_alpha, Z_beta), written as
/// rho_w^2 phi_ab - rho_w rho_a phi_wb - rho_w rho_b phi_wa + rho_a rho_b phi_ww.
/// `phi_hessian` holds the holomorphic second partials of phi.
inline cplx d_operator(const Jet3& rho, int chart, int alpha, int beta, const CMatrix& phi_hessian) {
    const int a = detail::frame_coordinate(alpha, chart);
    const int b = detail::frame_coordinate(beta, chart);
    const int w = chart;
    const cplx rw = rho.d(w), ra = rho.d(a), rb = rho.d(b);
    return rw * rw * phi_hessian(a, b) - rw * ra * phi_hessian(w, b) - rw * rb * phi_hessian(w, a) +
           ra * rb * phi_hessian(w, w);
}

/// Torsion and second-fundamental-form data at one surface point.
struct PseudohermitianData {
    /// II(Z_alpha, Z_beta) = c_{alpha beta} H.
    CMatrix second_form;
    /// A_{alpha beta} = -i c_{alpha beta} |H|^2.
    CMatrix torsion;
    /// sup over h-unit Z of |A(Z)|.
    double sup_torsion = 0.0;
    /// An h-unit direction attaining sup_torsion.
    Eigen::VectorXcd extremal_direction;
    double bp_min = 0.0;
};

/// c_{alpha beta} = h_{alpha beta} - rho^{kbar} D_{alpha beta}(rho_kbar) with
/// rho^{kbar} = a^{j kbar} rho_j / |d rho|^2.
inline CMatrix second_form(const SurfaceFrame& fr, const AmbientMetric& a) {
    const int n = fr.cr_dimension();
    const int dim = n + 1;
    const Eigen::VectorXcd raised = a.inverse() * fr.jet.gradient() / fr.grad_norm2;
    std::vector<CMatrix> phi(dim);
    for (int k = 0; k < dim; ++k) phi[k] = fr.jet.holomorphic_hessian_of_dbar(k);
    CMatrix c(n, n);
    for (int al = 0; al < n; ++al)
        for (int be = al; be < n; ++be) {
            cplx contraction = 0.0;
            for (int k = 0; k < dim; ++k) contraction += raised[k] * d_operator(fr.jet, fr.chart, al, be, phi[k]);
            c(al, be) = c(be, al) = fr.holomorphic_hessian(al, be) - contraction;
        }
    return c;
}

/// A_{alpha beta} from the Gauss torsion equation i A = c |H|^2.
inline CMatrix torsion_matrix(const SurfaceFrame& fr, const CMatrix& second) {
    return cplx(0.0, -1.0) * fr.mean_curvature2 * second;
}

/// A(Z) = i A_{alpha beta} zeta^alpha zeta^beta / |Z|^2.
inline cplx torsion_of(const SurfaceFrame& fr, const CMatrix& A, const Eigen::VectorXcd& zeta) {
    const double n2 = fr.norm2(zeta);
    if (!(n2 > 0.0)) throw ArgumentError("zero direction");
    return cplx(0.0, 1.0) * (zeta.transpose() * A * zeta)(0, 0) / n2;
}

/// Tor(Z, Z) = i A zeta zeta - i Abar zetabar zetabar = 2 Re(i A zeta zeta).
inline double tor_of(const CMatrix& A, const Eigen::VectorXcd& zeta) {
    if (zeta.squaredNorm() == 0.0) throw ArgumentError("zero direction");
    return 2.0 * (cplx(0.0, 1.0) * (zeta.transpose() * A * zeta)(0, 0)).real();
}

/// Scalar second fundamental form h(Z + Zbar, Z + Zbar) =
/// 2 (h_{alpha betabar} zeta zetabar + Re(c_{alpha beta} zeta zeta)).
inline double scalar_form(const SurfaceFrame& fr, const CMatrix& second, const Eigen::VectorXcd& zeta) {
    return 2.0 * (fr.norm2(zeta) + (zeta.transpose() * second * zeta)(0, 0).real());
}

struct TorsionSup {
    double value = 0.0;
    /// h-unit zeta with |A zeta zeta| = value.
    Eigen::VectorXcd direction;
};

/// max over h-unit zeta of |A_{alpha beta} zeta^alpha zeta^beta|.
///
/// |Z|^2 = zeta^T h conj(zeta) = zeta^* h^T zeta. With h^T = L L^*
/// (Cholesky) and zeta = L^{-*} u, the problem becomes
/// max over unit u of |u^T B u| with B = conj(L)^{-1} A conj(L)^{-T}, whose
/// answer is the largest singular value of the symmetric matrix B.
inline TorsionSup torsion_sup(const CMatrix& A, const CMatrix& h) {
    Eigen::LLT<CMatrix> llt(h.transpose());
    if (llt.info() != Eigen::Success) throw NumericError("Levi matrix is not positive definite");
    const CMatrix L = llt.matrixL();
    const CMatrix Lbar_inv = L.conjugate().inverse();
    CMatrix B = Lbar_inv * A * Lbar_inv.transpose();
    B = (0.5 * (B + B.transpose())).eval();
    Eigen::JacobiSVD<CMatrix> svd(B, Eigen::ComputeFullV);
    TorsionSup out;
    out.value = svd.singularValues()[0];

    // Takagi vector: for a right singular vector v, w = v + conj(B v)/sigma
    // satisfies B w = sigma conj(w); if w vanishes, i v does.
    Eigen::VectorXcd v = svd.matrixV().col(0);
    Eigen::VectorXcd w = v;
    if (out.value > 0.0) {
        w = v + (B * v).conjugate() / out.value;
        if (w.norm() < 1e-8) w = cplx(0.0, 1.0) * v;
    }
    w.normalize();
    out.direction = L.adjoint().triangularView<Eigen::Upper>().solve(w);
    return out;
}

/// Runs the full Gauss-path pipeline at a frame.
inline PseudohermitianData pseudohermitian_data(const SurfaceFrame& fr, const AmbientMetric& a) {
    PseudohermitianData d;
    d.second_form = second_form(fr, a);
    d.torsion = torsion_matrix(fr, d.second_form);
    const TorsionSup sup = torsion_sup(d.torsion, fr.levi);
    d.sup_torsion = sup.value;
    d.extremal_direction = sup.direction;
    d.bp_min = behnke_peschl(fr).min_eigenvalue;
    return d;
}

}  // namespace pscurv
