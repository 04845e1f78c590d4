// Acceptance suite: one PASS/FAIL line per criterion. With an argument, runs
// only that criterion. Exit status is nonzero when any executed criterion fails.

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "pscurv/pscurv.hpp"

using namespace pscurv;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Line {
    bool ok;
    std::string text;
};

class Criterion {
public:
    void check(bool ok, const char* fmt, double value) {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, value);
        add(ok, buf);
    }
    void add(bool ok, std::string text) {
        lines_.push_back({ok, std::move(text)});
        ok_ = ok_ && ok;
    }
    bool ok() const { return ok_; }
    const std::vector<Line>& lines() const { return lines_; }

private:
    bool ok_ = true;
    std::vector<Line> lines_;
};

double max_abs_dev(const TheoremReport& rep, double target) {
    return std::max(std::abs(rep.K_min - target), std::abs(rep.K_max - target));
}

std::vector<SurfaceFrame> frames_of(const FamilyInstance& fam, std::size_t n, std::uint64_t seed) {
    return sample_surface(fam.contact_function(), fam.metric, n, seed, family_seeder(fam));
}

void sphere(Criterion& c) {
    for (int n : {1, 2}) {
        const auto rep = verify_main_theorem(builtin_family("sphere", {{"n", double(n)}}), 100, 10, kSeed);
        const double dev = max_abs_dev(rep, 1.0);
        c.check(dev < 1e-9, n == 1 ? "n=1 max |K - 1| = %.3g" : "n=2 max |K - 1| = %.3g", dev);
    }
}

void perturbed_sphere(Criterion& c) {
    for (int n : {1, 2, 3}) {
        Criterion sub;
        const auto fam = builtin_family("perturbed_sphere_E", {{"n", double(n)}});
        const auto rep = verify_main_theorem(fam, 200, 20, kSeed);
        double h2 = 0.0, sup = 0.0, bound = 0.0, scalar = 0.0, sym = 0.0;
        for (const auto& p : rep.points) {
            h2 = std::max(h2, std::abs(p.H2 - 0.5));
            sup = std::max(sup, std::abs(p.supA - 0.5));
            for (const auto& s : p.directions) bound = std::max(bound, std::abs(s.bound_residual));
        }
        for (const auto& fr : frames_of(fam, 200, kSeed)) {
            const ReferenceTensorE ref(fr);
            scalar = std::max(scalar, std::abs(ref.scalar() - n * n / 2.0));
            sym = std::max(sym, ref.symmetry_defect());
        }
        const std::string tag = "n=" + std::to_string(n) + " ";
        sub.check(max_abs_dev(rep, 0.25) < 1e-9, (tag + "max |K - 1/4| = %.3g").c_str(), max_abs_dev(rep, 0.25));
        sub.check(h2 < 1e-12, (tag + "max ||H|^2 - 1/2| = %.3g").c_str(), h2);
        sub.check(sup < 1e-9, (tag + "max |supA - 1/2| = %.3g").c_str(), sup);
        sub.check(bound < 1e-9, (tag + "max |bound residual| = %.3g").c_str(), bound);
        sub.check(scalar < 1e-9, (tag + "max |R - n^2/2| (reference tensor) = %.3g").c_str(), scalar);
        sub.check(sym == 0.0, (tag + "tensor symmetry defect = %.3g").c_str(), sym);
        for (const auto& l : sub.lines()) c.add(l.ok, l.text);
    }
}

void ellipsoid(Criterion& c) {
    const double alpha = 1.5, beta = 2.0;
    const auto fam = builtin_family("ellipsoid", {{"alpha", alpha}, {"beta", beta}, {"gamma", 0.3}, {"sigma", 0.4}});
    const auto rep = verify_main_theorem(fam, 500, 20, kSeed);
    double worst = 1e300;
    for (const auto& p : rep.points) {
        const Jet3 jet = jet3(fam.rho, p.point);
        const double rhs = alpha * beta / (beta * std::norm(jet.d(0)) + alpha * std::norm(jet.d(1)));
        worst = std::min(worst, 2 * p.K_min - rhs);
    }
    c.check(rep.min_torsion_margin >= -1e-8, "min torsion margin = %.3g", rep.min_torsion_margin);
    c.check(worst >= -1e-8, "min 2K - ab/(b|rho_z|^2 + a|rho_w|^2) = %.3g", worst);
}

void hartogs(Criterion& c) {
    double worst_R = 0.0, worst_bp = 1e300;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto fam = builtin_family("hartogs", {{"t", t}});
        for (double tau : {0.0, std::numbers::pi / 3, 1.1}) {
            Point p(2);
            p << 0.0, std::polar(1.0, tau);
            worst_R = std::max(worst_R, std::abs(tw_direct(fam.rho, p).R - 2 * (1 - t)));
        }
        for (const auto& fr : frames_of(fam, 200, kSeed)) worst_bp = std::min(worst_bp, behnke_peschl(fr).min_eigenvalue);
    }
    c.check(worst_R < 1e-6, "max |R - 2(1-t)| on the circle = %.3g", worst_R);
    c.check(worst_bp >= -1e-8, "min Behnke-Peschl eigenvalue = %.3g", worst_bp);
}

void reinhardt(Criterion& c) {
    double dR = 0.0, dA = 0.0, pos = 1e300, edge = 0.0;
    for (double eps : {0.5, 1.0}) {
        const auto fam = builtin_family("reinhardt", {{"eps", eps}});
        const auto f = fam.contact_function();
        for (const auto& fr : frames_of(fam, 50, kSeed)) {
            const TW3State s = tw_direct(f, fr.point);
            dR = std::max(dR, std::abs(s.R - 0.5));
            dA = std::max(dA, std::abs(s.abs_torsion() - 0.5));
            pos = std::min(pos, c0_form_min(s, 0.49));
            edge = std::max(edge, std::abs(c0_form_min(s, 0.5)));
        }
    }
    c.check(dR < 1e-6, "max |R - 1/2| = %.3g", dR);
    c.check(dA < 1e-6, "max ||A_11|/h - 1/2| = %.3g", dA);
    c.check(pos > 0.0, "min C0-form (C0 = 0.49) = %.3g", pos);
    c.check(edge < 1e-6, "max |min C0-form (C0 = 1/2)| = %.3g", edge);
}

void dual_path(Criterion& c) {
    double dR = 0.0, res = 0.0;
    for (const auto& fam : {builtin_family("sphere", {}), builtin_family("perturbed_sphere_E", {}),
                            builtin_family("ellipsoid", {{"alpha", 1.5}, {"beta", 2.0}, {"gamma", 0.3}, {"sigma", 0.4}}),
                            builtin_family("ellipsoid", {{"a", 2}, {"b", 3}, {"c", 4}, {"d", 5}})}) {
        const auto cv = cross_validate(fam, 100, kSeed);
        dR = std::max(dR, cv.max_R_discrepancy);
        res = std::max(res, cv.max_structural_residual);
    }
    c.check(dR < 1e-6, "max |R_direct - 2 K_gauss| = %.3g", dR);
    c.check(res < 1e-7, "max structural residual = %.3g", res);
}

void equivalence(Criterion& c) {
    std::size_t total = 0;
    int disagreements = 0;
    for (const auto& fam : {builtin_family("sphere", {}), builtin_family("sphere", {{"n", 2}}),
                            builtin_family("perturbed_sphere_E", {}), builtin_family("perturbed_sphere_E", {{"n", 2}}),
                            builtin_family("ellipsoid", {{"alpha", 1.5}, {"beta", 2.0}, {"gamma", 0.3}, {"sigma", 0.4}}),
                            builtin_family("ellipsoid", {{"a", 1}, {"b", 2}, {"c", 3}, {"d", 4}})}) {
        const auto rep = verify_main_theorem(fam, 200, 10, kSeed);
        if (!rep.hessian.constant()) continue;
        total += rep.points.size();
        disagreements += rep.disagreements;
    }
    c.check(total >= 1000, "constant-Hessian samples = %.0f", static_cast<double>(total));
    c.check(disagreements == 0, "disagreements = %.0f", disagreements);
}

void brieskorn(Criterion& c) {
    double constraint = 0.0, kamb = -1e300, ident = 0.0, vitter = 0.0;
    for (const auto& exps : {std::vector<int>{2, 2, 2}, std::vector<int>{2, 3, 5}, std::vector<int>{2, 3, 7}}) {
        const BrieskornLink link(exps, 1.0);
        for (const auto& s : scan_link(link, 200, kSeed)) {
            constraint = std::max(constraint, s.constraint_residual);
            kamb = std::max(kamb, s.K_ambient);
            ident = std::max(ident, s.identity_residual);
            vitter = std::max(vitter, std::abs(s.K_ambient - s.K_ambient_general));
        }
    }
    const BrieskornLink quadric({2, 2, 2}, 1.0);
    Eigen::VectorXcd z(3), W(3);
    z << 1.0 / std::numbers::sqrt2, cplx(0, 1.0 / std::numbers::sqrt2), 0.0;
    W << 0.0, 0.0, 1.0;
    const double hand = std::abs(link_sectional(quadric, z, W) - 0.5);
    c.check(constraint < 1e-10, "max constraint residual = %.3g", constraint);
    c.check(kamb <= 1e-12, "max ambient curvature = %.3g", kamb);
    c.check(ident < 1e-10, "max |K - K~/2 - sum w|z|^2| = %.3g", ident);
    c.check(vitter < 1e-12, "max diagonal vs general ambient curvature = %.3g", vitter);
    c.check(hand < 1e-15, "|K - 1/2| at the explicit point = %.3g", hand);
}

void lambda1(Criterion& c) {
    const auto fam = builtin_family("perturbed_sphere_E", {});
    Lambda1Inputs in;
    in.cr_dimension = 1;
    const auto frames = frames_of(fam, 100, kSeed);
    const auto hc = check_constant_hessian(frames, fam.metric);
    in.levi_identity = hc.constant();
    double margin = 1e300;
    for (const auto& fr : frames) {
        in.grad_norm2.push_back(fr.grad_norm2);
        in.scalar_curvature.push_back(tw_direct(fam.rho, fr.point).R);
        const auto d = pseudohermitian_data(fr, fam.metric);
        margin = std::min(margin, fr.mean_curvature2 - d.sup_torsion);
    }
    in.convex = margin >= -kTorsionTolerance;
    const auto rep = lambda1_report(in);
    double scalar_route = -1, transverse_route = -1;
    for (const auto& b : rep.lower) {
        if (b.route == "half_min_scalar_curvature") scalar_route = b.value;
        if (b.route == "half_min_transverse_curvature") transverse_route = b.value;
    }
    const double upper = rep.upper ? rep.upper->value : -1;
    c.check(std::abs(scalar_route - 0.25) < 1e-9, "lower bound (1/2 min R) = %.12g", scalar_route);
    c.check(std::abs(transverse_route - 0.25) < 1e-9, "lower bound (1/2 min 1/|d rho|^2) = %.12g", transverse_route);
    c.check(std::abs(scalar_route - transverse_route) < 1e-9, "route difference = %.3g", std::abs(scalar_route - transverse_route));
    c.check(std::abs(upper - 0.5) < 1e-9, "upper bound = %.12g", upper);
    c.check(rep.consistent(), "lower <= upper: %.0f", rep.consistent() ? 1.0 : 0.0);
}

void differentiation(Criterion& c) {
    const std::vector<FamilyInstance> fams{
        builtin_family("sphere", {}),
        builtin_family("sphere", {{"n", 2}}),
        builtin_family("perturbed_sphere_E", {}),
        builtin_family("perturbed_sphere_E", {{"n", 2}}),
        builtin_family("ellipsoid", {{"alpha", 1.5}, {"beta", 2.0}, {"gamma", 0.3}, {"sigma", 0.4}}),
        builtin_family("hartogs", {{"t", 1.0}}),
        builtin_family("reinhardt", {{"eps", 1.0}})};
    double worst = 0.0;
    for (const auto& fam : fams)
        for (std::size_t i = 0; i < 50; ++i) {
            CounterRng rng(kSeed, i);
            worst = std::max(worst, fd_residual(fam.rho, fam.seed_point(rng)));
        }
    c.check(worst < 1e-6, "max fd residual = %.3g", worst);
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> criteria{
        {"sphere constant curvature", sphere},
        {"sharpness example E", perturbed_sphere},
        {"ellipsoid curvature bound", ellipsoid},
        {"hartogs sweep", hartogs},
        {"reinhardt half-positivity", reinhardt},
        {"dual-path oracle", dual_path},
        {"convexity equivalence", equivalence},
        {"brieskorn links", brieskorn},
        {"first eigenvalue bounds", lambda1},
        {"differentiation oracle", differentiation},
    };
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
            return 2;
        }
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i) + 1 != only) continue;
        Criterion c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.add(false, std::string("exception: ") + e.what());
        }
        std::printf("%s %2zu  %s\n", c.ok() ? "PASS" : "FAIL", i + 1, criteria[i].first);
        for (const auto& l : c.lines()) std::printf("       %s %s\n", l.ok ? "ok  " : "FAIL", l.text.c_str());
        std::fflush(stdout);
        all = all && c.ok();
    }
    return all ? 0 : 1;
}
