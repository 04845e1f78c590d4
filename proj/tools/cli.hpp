#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pscurv/pscurv.hpp"

namespace pscurv::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kArgumentError = 2, kNumericFailure = 3 };

/// Angles tau of the circle points (0, e^{i tau}) used by hartogs sweeps.
inline const std::vector<double>& circle_angles() {
    static const std::vector<double> taus{0.0, std::numbers::pi / 3.0, 1.1};
    return taus;
}

struct Options {
    std::string family;
    std::string rho;
    int dim = 0;
    std::vector<std::string> bindings;
    std::optional<int> n;
    std::optional<double> eps;
    std::optional<double> t;
    std::string metric;
    std::size_t points = 100;
    int dirs = 10;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::string out;
    std::string csv;
    bool assert_checks = false;
    bool direct = false;
    unsigned threads = 0;
    // sweep
    std::string param;
    double from = 0.0, to = 1.0;
    int steps = 5;
    bool at_circle = false;
    // brieskorn
    std::vector<int> exponents;
    double r = 1.0;
};

struct Check {
    std::string name;
    bool ok = true;
    double value = 0.0;
};

/// A configured hypersurface: catalog family or user expression.
struct Target {
    std::string name;
    FamilyParams params;
    FamilyInstance instance;
    bool from_catalog = false;
};

namespace detail {

inline double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ArgumentError("invalid number for " + what + ": '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ArgumentError("invalid number for " + what + ": '" + s + "'");
    return v;
}

inline FamilyParams parse_bindings(const std::vector<std::string>& items) {
    FamilyParams out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ArgumentError("expected name=value, got '" + item + "'");
        out[item.substr(0, eq)] = parse_number(item.substr(eq + 1), item.substr(0, eq));
    }
    return out;
}

inline cplx json_complex(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ArgumentError("metric entries must be numbers or [re, im] pairs");
}

inline AmbientMetric parse_metric(const std::string& text, int dim) {
    if (text.empty() || text == "identity") return AmbientMetric::identity(dim);
    if (text.rfind("diag:", 0) == 0) {
        std::vector<double> d;
        std::stringstream ss(text.substr(5));
        for (std::string item; std::getline(ss, item, ',');) d.push_back(parse_number(item, "metric"));
        if (static_cast<int>(d.size()) != dim) throw ArgumentError("metric has the wrong dimension");
        return AmbientMetric::diagonal(d);
    }
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception&) {
        throw ArgumentError("metric must be 'identity', 'diag:a,b,...' or a JSON matrix");
    }
    if (!m.is_array() || static_cast<int>(m.size()) != dim) throw ArgumentError("metric has the wrong dimension");
    CMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i) {
        if (!m[i].is_array() || static_cast<int>(m[i].size()) != dim)
            throw ArgumentError("metric has the wrong dimension");
        for (int j = 0; j < dim; ++j) a(i, j) = json_complex(m[i][j]);
    }
    return AmbientMetric(a);
}

/// Highest z index mentioned in the expression, at least 2.
inline int infer_dimension(const std::string& text) {
    int dim = 2;
    static const std::regex var(R"(z([1-9]))");
    for (std::sregex_iterator it(text.begin(), text.end(), var), end; it != end; ++it)
        dim = std::max(dim, std::stoi((*it)[1].str()));
    return dim;
}

inline Json point_json(const Point& p) {
    Json a = Json::array();
    for (int j = 0; j < p.size(); ++j) a.push_back({p[j].real(), p[j].imag()});
    return a;
}

inline Json params_json(const FamilyParams& p) {
    Json o = Json::object();
    for (const auto& [k, v] : p) o[k] = v;
    return o;
}

inline Json checks_json(const std::vector<Check>& checks) {
    Json a = Json::array();
    for (const auto& c : checks) a.push_back({{"name", c.name}, {"ok", c.ok}, {"value", c.value}});
    return a;
}

struct Stats {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t count = 0;
    void add(double v) {
        min = std::min(min, v);
        max = std::max(max, v);
        sum += v;
        ++count;
    }
    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

inline void flatten(const std::string& prefix, const Json& v, std::vector<std::pair<std::string, std::string>>& row) {
    auto key = [&](const std::string& k) { return prefix.empty() ? k : prefix + "." + k; };
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) flatten(key(it.key()), it.value(), row);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& e = v[i];
            if (e.is_array() && e.size() == 2 && e[0].is_number()) {
                row.emplace_back(prefix + "." + std::to_string(i) + ".re", e[0].dump());
                row.emplace_back(prefix + "." + std::to_string(i) + ".im", e[1].dump());
            } else {
                flatten(prefix + "." + std::to_string(i), e, row);
            }
        }
    } else if (v.is_string()) {
        row.emplace_back(prefix, v.get<std::string>());
    } else {
        row.emplace_back(prefix, v.dump());
    }
}

/// One CSV row per sample record; the header is the union of keys in order
/// of first appearance.
inline std::string to_csv(const Json& samples) {
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    std::vector<std::string> header;
    for (const auto& s : samples) {
        std::vector<std::pair<std::string, std::string>> row;
        flatten("", s, row);
        for (const auto& [k, v] : row)
            if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
        rows.push_back(std::move(row));
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out << ",";
            for (const auto& [k, v] : row)
                if (k == header[i]) {
                    out << v;
                    break;
                }
        }
        out << "\n";
    }
    return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ArgumentError("cannot open '" + path + "' for writing");
    f << text;
}

}  // namespace detail

inline Target make_target(const Options& o) {
    if (o.family.empty() == o.rho.empty()) throw ArgumentError("exactly one of --family and --rho is required");
    FamilyParams params = detail::parse_bindings(o.bindings);
    if (!o.family.empty()) {
        if (o.n) params["n"] = *o.n;
        if (o.eps) params["eps"] = *o.eps;
        if (o.t) params["t"] = *o.t;
        FamilyInstance inst = builtin_family(o.family, params);
        if (!o.metric.empty()) inst.metric = detail::parse_metric(o.metric, inst.rho.dimension());
        return {o.family, params, std::move(inst), true};
    }
    const int dim = o.dim > 0 ? o.dim : detail::infer_dimension(o.rho);
    ParameterMap bound;
    for (const auto& [k, v] : params) bound[k] = v;
    auto rho = parse_defining_function(o.rho, dim, bound);
    return {"custom", params, FamilyInstance{"custom", params, rho, detail::parse_metric(o.metric, dim)}, false};
}

inline Json provenance_json(const Options& o, const std::string& command) {
    return {{"command", command},  {"seed", o.seed},           {"points", o.points},
            {"dirs", o.dirs},      {"tol", o.tol},             {"torsion_tolerance", kTorsionTolerance},
            {"psd_tolerance", kPsdTolerance}, {"structural_tolerance", kStructuralTolerance},
            {"version", PSCURV_VERSION}};
}

struct Analysis {
    Json samples = Json::array();
    Json summary;
    std::vector<Check> checks;
    TheoremReport theorem;
    std::vector<TW3State> direct;
};

/// Gauss-path analysis at sampled points, plus the direct solver when forced
/// or when the constant-Hessian hypothesis fails for a surface in C^2.
inline Analysis analyze_target(const Target& target, const Options& o) {
    if (o.points < 1 || o.dirs < 1) throw ArgumentError("--points and --dirs must be >= 1");
    const auto& fam = target.instance;
    const DefiningFunction f = fam.contact_function();
    Analysis an;
    an.theorem = verify_main_theorem(f, fam.metric, o.points, o.dirs, o.seed, family_seeder(fam), o.threads);
    const auto& rep = an.theorem;
    const bool use_direct = o.direct || (f.dimension() == 2 && !rep.hessian.constant());
    if (o.direct && f.dimension() != 2) throw ArgumentError("--direct needs a hypersurface in C^2");

    std::vector<double> residuals;
    if (use_direct) {
        an.direct.resize(o.points);
        residuals.resize(o.points);
        parallel_for(o.points, o.threads, [&](std::size_t i) {
            an.direct[i] = tw_direct(f, rep.points[i].point);
            residuals[i] = structural_residual(an.direct[i]);
            an.direct[i].fields.reset();
        });
    }

    const bool ellipsoid = target.from_catalog && target.name == "ellipsoid";
    detail::Stats K, H2, supA, bp, margin, bres, R, absA, resid, ell;
    for (std::size_t i = 0; i < o.points; ++i) {
        const auto& p = rep.points[i];
        Json rec;
        rec["index"] = i;
        rec["point"] = detail::point_json(p.point);
        rec["grad_norm2"] = p.grad_norm2;
        rec["H2"] = p.H2;
        rec["supA"] = p.supA;
        rec["bp_min"] = p.bp_min;
        rec["levi_condition"] = p.levi_condition;
        rec["K_min"] = p.K_min;
        rec["K_max"] = p.K_max;
        rec["min_bound_residual"] = p.min_bound_residual;
        rec["min_torsion_margin"] = p.min_torsion_margin;
        K.add(p.K_min);
        K.add(p.K_max);
        H2.add(p.H2);
        supA.add(p.supA);
        bp.add(p.bp_min);
        margin.add(p.min_torsion_margin);
        bres.add(p.min_bound_residual);
        if (ellipsoid) {
            // 2K >= alpha beta / (beta |rho_z|^2 + alpha |rho_w|^2).
            const CMatrix a = fam.metric.matrix();
            const double al = a(0, 0).real(), be = a(1, 1).real();
            const auto g = jet1(fam.rho, p.point).second;
            const double bound = al * be / (be * std::norm(g[0]) + al * std::norm(g[1]));
            rec["ellipsoid_bound_margin"] = 2.0 * p.K_min - bound;
            ell.add(2.0 * p.K_min - bound);
        }
        if (use_direct) {
            const auto& d = an.direct[i];
            rec["R"] = d.R;
            rec["R_imag"] = d.R_imag;
            rec["abs_torsion"] = d.abs_torsion();
            rec["structural_residual"] = residuals[i];
            R.add(d.R);
            absA.add(d.abs_torsion());
            resid.add(residuals[i]);
        }
        an.samples.push_back(rec);
    }

    Json s;
    s["points"] = o.points;
    s["dirs"] = o.dirs;
    s["path"] = use_direct ? "direct" : "gauss";
    s["K_min"] = K.min;
    s["K_max"] = K.max;
    s["H2_min"] = H2.min;
    s["H2_max"] = H2.max;
    s["supA_min"] = supA.min;
    s["supA_max"] = supA.max;
    s["bp_min"] = bp.min;
    s["min_torsion_margin"] = margin.min;
    s["min_bound_residual"] = bres.min;
    s["disagreements"] = rep.disagreements;
    s["hessian_variation"] = rep.hessian.variation;
    s["hessian_metric_mismatch"] = rep.hessian.metric_mismatch;
    s["constant_hessian"] = rep.hessian.constant();
    s["convex"] = rep.convex();
    s["theorem_applicable"] = rep.theorem_applicable();
    s["theorem_holds"] = rep.theorem_holds();
    s["flags"] = rep.flags();
    if (ellipsoid) s["min_ellipsoid_bound_margin"] = ell.min;
    if (use_direct) {
        s["R_min"] = R.min;
        s["R_max"] = R.max;
        s["R_mean"] = R.mean();
        s["abs_torsion_min"] = absA.min;
        s["abs_torsion_max"] = absA.max;
        s["max_structural_residual"] = resid.max;
    }

    auto check = [&](const std::string& name, bool ok, double value) { an.checks.push_back({name, ok, value}); };
    check("theorem_bound", rep.theorem_holds(), bres.min);
    if (rep.hessian.constant()) check("convexity_equivalence", rep.disagreements == 0, rep.disagreements);
    if (use_direct) check("structural_residual", resid.max < kStructuralTolerance, resid.max);
    if (target.from_catalog) {
        const std::string& n = target.name;
        const double kdev = std::max(std::abs(K.min - (n == "sphere" ? 1.0 : 0.25)),
                                     std::abs(K.max - (n == "sphere" ? 1.0 : 0.25)));
        if (n == "sphere") {
            if (!use_direct) check("sphere_K_equals_1", kdev < o.tol, kdev);
            if (use_direct) check("sphere_R_equals_2", std::max(std::abs(R.min - 2), std::abs(R.max - 2)) < 1e-6, R.max);
        } else if (n == "perturbed_sphere_E") {
            check("E_K_equals_quarter", kdev < o.tol, kdev);
            check("E_supA_equals_half", std::max(std::abs(supA.min - 0.5), std::abs(supA.max - 0.5)) < o.tol, supA.max);
            check("E_bound_sharp", std::abs(bres.min) < o.tol, bres.min);
        } else if (n == "reinhardt") {
            check("reinhardt_R_equals_half", std::max(std::abs(R.min - 0.5), std::abs(R.max - 0.5)) < 1e-6, R.mean());
            check("reinhardt_torsion_equals_half",
                  std::max(std::abs(absA.min - 0.5), std::abs(absA.max - 0.5)) < 1e-6, absA.mean());
        } else if (n == "ellipsoid") {
            check("ellipsoid_torsion_margin", margin.min >= -kTorsionTolerance, margin.min);
            check("ellipsoid_curvature_bound", ell.min >= -kTorsionTolerance, ell.min);
        } else if (n == "hartogs") {
            check("hartogs_behnke_peschl", bp.min >= -kPsdTolerance, bp.min);
        }
    }
    s["checks"] = detail::checks_json(an.checks);
    an.summary = s;
    return an;
}

inline Json report_header(const Target& t, const Options& o, const std::string& command) {
    Json rep;
    rep["family"] = t.name;
    rep["params"] = detail::params_json(t.params);
    if (!t.from_catalog) rep["params"]["rho"] = t.instance.rho.to_string();
    rep["provenance"] = provenance_json(o, command);
    return rep;
}

inline Json cmd_analyze(const Options& o, std::vector<Check>& checks) {
    const Target t = make_target(o);
    Analysis an = analyze_target(t, o);
    Json rep = report_header(t, o, "analyze");
    rep["samples"] = std::move(an.samples);
    rep["summary"] = std::move(an.summary);
    checks = an.checks;
    return rep;
}

inline Json cmd_sweep(const Options& o, std::vector<Check>& checks) {
    if (o.family.empty()) throw ArgumentError("sweep needs --family");
    if (o.param.empty()) throw ArgumentError("sweep needs --param");
    if (o.steps < 1) throw ArgumentError("--steps must be >= 1");
    Json rep;
    Json samples = Json::array();
    detail::Stats bp;
    for (int k = 0; k < o.steps; ++k) {
        const double value = o.steps == 1 ? o.from : o.from + (o.to - o.from) * k / (o.steps - 1);
        Options step = o;
        std::ostringstream text;
        text << std::setprecision(17) << value;
        step.bindings.push_back(o.param + "=" + text.str());
        if (o.param == "n") step.n.reset();
        if (o.param == "eps") step.eps.reset();
        if (o.param == "t") step.t.reset();
        Target t = make_target(step);
        if (k == 0) {
            rep = report_header(t, o, "sweep");
            rep["params"].erase(o.param);
            rep["params"]["sweep"] = {{"param", o.param}, {"from", o.from}, {"to", o.to}, {"steps", o.steps}};
        }
        Analysis an = analyze_target(t, step);
        Json rec;
        rec["index"] = k;
        rec[o.param] = value;
        if (o.at_circle) {
            const DefiningFunction f = t.instance.contact_function();
            if (f.dimension() != 2) throw ArgumentError("--at-circle needs a hypersurface in C^2");
            Json rs = Json::array();
            detail::Stats R;
            for (double tau : circle_angles()) {
                Point p(2);
                p << 0.0, std::polar(1.0, tau);
                if (std::abs(f(p)) > kOnSurfaceTolerance) p = project_to_surface(f, p);
                const TW3State s = tw_direct(f, p);
                rs.push_back({{"tau", tau}, {"R", s.R}, {"structural_residual", structural_residual(s)}});
                R.add(s.R);
            }
            rec["R"] = R.mean();
            rec["R_circle"] = rs;
            if (t.name == "hartogs") {
                const double expected = 2.0 * (1.0 - t.instance.params.at("t"));
                double dev = 0.0;
                for (const auto& e : rs) dev = std::max(dev, std::abs(e["R"].get<double>() - expected));
                checks.push_back({"hartogs_R_" + std::to_string(k), dev < 1e-6, dev});
            }
        }
        rec["summary"] = an.summary;
        bp.add(an.summary["bp_min"].get<double>());
        for (auto& c : an.checks) {
            c.name += "_" + std::to_string(k);
            checks.push_back(c);
        }
        samples.push_back(std::move(rec));
    }
    rep["samples"] = std::move(samples);
    rep["summary"] = {{"steps", o.steps}, {"bp_min", bp.min}, {"checks", detail::checks_json(checks)}};
    return rep;
}

inline Json cmd_brieskorn(const Options& o, std::vector<Check>& checks) {
    if (o.exponents.size() < 3) throw ArgumentError("need >= 3 exponents");
    if (o.points < 1) throw ArgumentError("--points must be >= 1");
    const BrieskornLink link(o.exponents, o.r);
    const auto samples = scan_link(link, o.points, o.seed, o.threads);
    Json rep;
    rep["family"] = "brieskorn";
    Json exps = Json::array();
    for (int a : o.exponents) exps.push_back(a);
    Json w = Json::array();
    for (auto x : link.weight_vector()) w.push_back(x);
    rep["params"] = {{"exponents", exps}, {"r", o.r}, {"d", link.degree()}, {"weights", w}};
    rep["provenance"] = provenance_json(o, "brieskorn");
    Json recs = Json::array();
    detail::Stats K, Kt, H2, cres, fres, gram, ires, vitter;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const double vd = std::abs(s.K_ambient - s.K_ambient_general);
        recs.push_back({{"index", i},
                        {"point", detail::point_json(s.point)},
                        {"direction", detail::point_json(s.direction)},
                        {"K", s.K},
                        {"K_ambient", s.K_ambient},
                        {"K_ambient_general", s.K_ambient_general},
                        {"H2", s.H2},
                        {"constraint_residual", s.constraint_residual},
                        {"frame_residual", s.frame_residual},
                        {"gram_defect", s.gram_defect},
                        {"identity_residual", s.identity_residual},
                        {"vitter_discrepancy", vd}});
        K.add(s.K);
        Kt.add(s.K_ambient);
        H2.add(s.H2);
        cres.add(s.constraint_residual);
        fres.add(s.frame_residual);
        gram.add(s.gram_defect);
        ires.add(s.identity_residual);
        vitter.add(vd);
    }
    checks.push_back({"constraint_residual", cres.max < kLinkTolerance, cres.max});
    checks.push_back({"ambient_curvature_nonpositive", Kt.max <= 1e-12, Kt.max});
    checks.push_back({"identity_residual", ires.max < 1e-10, ires.max});
    checks.push_back({"vitter_agreement", vitter.max < 1e-12, vitter.max});
    checks.push_back({"frame_residual", fres.max < 1e-12, fres.max});
    rep["samples"] = std::move(recs);
    rep["summary"] = {{"points", o.points},
                      {"K_min", K.min},
                      {"K_max", K.max},
                      {"K_ambient_min", Kt.min},
                      {"K_ambient_max", Kt.max},
                      {"H2_min", H2.min},
                      {"H2_max", H2.max},
                      {"max_constraint_residual", cres.max},
                      {"max_frame_residual", fres.max},
                      {"max_gram_defect", gram.max},
                      {"max_identity_residual", ires.max},
                      {"max_vitter_discrepancy", vitter.max},
                      {"checks", detail::checks_json(checks)}};
    return rep;
}

inline Json cmd_lambda1(const Options& o, std::vector<Check>& checks) {
    const Target t = make_target(o);
    const auto& fam = t.instance;
    const DefiningFunction f = fam.contact_function();
    const int n = fam.cr_dimension();
    const auto frames = sample_surface(f, fam.metric, o.points, o.seed, family_seeder(fam), o.threads);
    const HessianCheck hess = check_constant_hessian(frames, fam.metric);

    Lambda1Inputs in;
    in.cr_dimension = n;
    in.levi_identity = true;
    const CMatrix id = CMatrix::Identity(n + 1, n + 1);
    for (const auto& fr : frames) {
        in.grad_norm2.push_back(fr.grad_norm2);
        in.levi_identity = in.levi_identity && (fr.jet.levi() - id).cwiseAbs().maxCoeff() < kConstantHessianTolerance;
    }
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& fr : frames) {
        const auto data = pseudohermitian_data(fr, fam.metric);
        min_margin = std::min(min_margin, fr.mean_curvature2 - data.sup_torsion);
    }
    const bool convex = min_margin >= -kTorsionTolerance;
    in.convex = hess.constant() && convex;

    Json recs = Json::array();
    std::vector<double> R(frames.size(), 0.0);
    if (n == 1) {
        parallel_for(frames.size(), o.threads, [&](std::size_t i) { R[i] = tw_direct(f, frames[i].point).R; });
        in.scalar_curvature = R;
    }
    std::optional<double> kappa;
    if (n >= 2 && t.from_catalog && t.name == "perturbed_sphere_E") {
        for (const auto& fr : frames) {
            const double k = ReferenceTensorE(fr).ricci_lower_bound();
            kappa = kappa ? std::min(*kappa, k) : k;
        }
        in.ricci_lower = kappa;
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
        Json rec{{"index", i}, {"point", detail::point_json(frames[i].point)}, {"grad_norm2", frames[i].grad_norm2}};
        if (n == 1) rec["R"] = R[i];
        recs.push_back(rec);
    }
    const Lambda1Report lr = lambda1_report(in);
    Json rep = report_header(t, o, "lambda1");
    rep["samples"] = std::move(recs);
    Json lower = Json::array();
    for (const auto& b : lr.lower) lower.push_back({{"route", b.route}, {"value", b.value}});
    Json s;
    s["points"] = o.points;
    s["hypotheses"] = {{"convex", convex},
                       {"constant_hessian", hess.constant()},
                       {"levi_identity", in.levi_identity},
                       {"cr_dimension", n}};
    s["lower"] = lower;
    s["upper"] = lr.upper ? Json{{"route", lr.upper->route}, {"value", lr.upper->value}} : Json();
    s["best_lower"] = lr.best_lower() ? Json(*lr.best_lower()) : Json();
    s["not_applicable"] = lr.not_applicable;
    if (kappa) s["ricci_kappa"] = *kappa;
    checks.push_back({"lower_le_upper", lr.consistent(), lr.best_lower().value_or(0.0)});
    s["checks"] = detail::checks_json(checks);
    rep["summary"] = s;
    return rep;
}

/// Entry point shared by the binary and the tests. Writes the report to
/// --out (or `out` when absent) and diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudohermitian curvature laboratory"};
    app.require_subcommand(1);
    Options o;

    auto shared = [&](CLI::App* c, bool family) {
        if (family) {
            c->add_option("--family", o.family, "catalog family");
            c->add_option("--rho", o.rho, "defining function expression");
            c->add_option("--dim", o.dim, "ambient dimension for --rho");
            c->add_option("--p", o.bindings, "parameter binding name=value")->allow_extra_args(false);
            c->add_option("--n", o.n, "CR dimension");
            c->add_option("--eps", o.eps, "reinhardt radius");
            c->add_option("--t", o.t, "hartogs parameter");
            c->add_option("--metric", o.metric, "identity, diag:a,b or a JSON matrix");
            c->add_option("--dirs", o.dirs, "directions per point");
            c->add_option("--tol", o.tol, "curvature tolerance");
            c->add_flag("--direct", o.direct, "force the direct solver");
        }
        c->add_option("--points", o.points, "sample points");
        c->add_option("--seed", o.seed, "random seed");
        c->add_option("--out", o.out, "report path");
        c->add_option("--csv", o.csv, "CSV path for sample records");
        c->add_flag("--assert", o.assert_checks, "exit 1 when a check fails");
        c->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    };
    auto* analyze = app.add_subcommand("analyze", "sample a hypersurface and evaluate curvature");
    shared(analyze, true);
    auto* sweep = app.add_subcommand("sweep", "analyze along a family parameter");
    shared(sweep, true);
    sweep->add_option("--param", o.param, "parameter to sweep");
    sweep->add_option("--from", o.from, "first value");
    sweep->add_option("--to", o.to, "last value");
    sweep->add_option("--steps", o.steps, "number of values");
    sweep->add_flag("--at-circle", o.at_circle, "direct solver at (0, e^{i tau})");
    auto* brieskorn = app.add_subcommand("brieskorn", "curvature of a Brieskorn-Pham link");
    shared(brieskorn, false);
    brieskorn->add_option("--exponents", o.exponents, "exponents a_0,...,a_N")->delimiter(',');
    brieskorn->add_option("--r", o.r, "link radius");
    auto* lambda1 = app.add_subcommand("lambda1", "bounds for the first Kohn-Laplacian eigenvalue");
    shared(lambda1, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kArgumentError;
    }

    try {
        std::vector<Check> checks;
        Json rep;
        if (*analyze) rep = cmd_analyze(o, checks);
        if (*sweep) rep = cmd_sweep(o, checks);
        if (*brieskorn) rep = cmd_brieskorn(o, checks);
        if (*lambda1) rep = cmd_lambda1(o, checks);
        const std::string text = rep.dump(2) + "\n";
        if (o.out.empty()) {
            out << text;
        } else {
            detail::write_file(o.out, text);
        }
        if (!o.csv.empty()) detail::write_file(o.csv, detail::to_csv(rep["samples"]));
        if (o.assert_checks) {
            bool ok = true;
            for (const auto& c : checks)
                if (!c.ok) {
                    err << "check failed: " << c.name << " (" << c.value << ")\n";
                    ok = false;
                }
            if (!ok) return kAssertionFailed;
        }
        return kOk;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kArgumentError;
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << "\n";
        return kArgumentError;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumericFailure;
    } catch (const DomainError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumericFailure;
    }
}

}  // namespace pscurv::cli
