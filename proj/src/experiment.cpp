#include "grsurf/experiment.hpp"

#include <algorithm>
#include <cmath>

namespace grsurf {

namespace {

const std::vector<std::string> kKnownAnalyses = {"all",     "verify", "solve",
                                                 "surface", "geometry", "frame"};

double tolerance_or(const json& tolerances, const std::string& key, double fallback) {
    if (tolerances.contains(key)) return tolerances.at(key).get<double>();
    return fallback;
}

/// Max over interior nodes of the mixed-derivative/tangent pairings, which
/// vanish identically in the continuum.
double orthogonality_defect(const GridField& field) {
    double worst = 0.0;
    for (int j = 1; j < field.grid.nR - 1; ++j) {
        for (int i = 1; i < field.grid.nL - 1; ++i) {
            const FieldJet jet = node_jet(field, i, j);
            if (!jet.has_second()) continue;
            const SecondDerivativesZ d2 = second_derivatives_Z(jet);
            auto [zL, zR] = tangent_vectors(jet);
            worst = std::max({worst, std::abs(inner_product(d2.dLR, zL)),
                              std::abs(inner_product(d2.dLR, zR))});
        }
    }
    return worst;
}

struct BuiltField {
    GridField field;
    double min_retraction_sv = -1.0; // < 0: not a solver run
    double min_chart_sv = 0.0;
};

BuiltField build_field(const ExperimentConfig& cfg, const LightConeGrid& grid) {
    BuiltField out;
    const std::string type = cfg.solution.at("type").get<std::string>();
    if (type == "goursat") {
        const double amplitude = cfg.solution.value("amplitude", 0.4);
        const int harmonics = cfg.solution.value("harmonics", 2);
        const std::uint64_t data_seed = cfg.solution.value("data_seed", cfg.seed);
        auto [left, right] =
            random_goursat_data(cfg.n, cfg.m, data_seed, grid.xiL0, grid.xiR0,
                                amplitude, harmonics);
        GoursatResult res = goursat_solve(left, right, grid);
        out.field = std::move(res.field);
        out.min_retraction_sv = res.min_retraction_sv;
        out.min_chart_sv = res.min_chart_sv;
    } else {
        const AnalyticSolution sol = parse_solution(cfg.solution, cfg.n, cfg.m);
        out.field = sample_solution(sol, grid);
        out.min_chart_sv = min_chart_singular_value(out.field);
    }
    return out;
}

LightConeGrid refined_grid(const LightConeGrid& base, int nL, int nR) {
    LightConeGrid g = base;
    // keep the physical extent, rescale the spacings
    g.hL = base.hL * (base.nL - 1) / static_cast<double>(nL - 1);
    g.hR = base.hR * (base.nR - 1) / static_cast<double>(nR - 1);
    g.nL = nL;
    g.nR = nR;
    return g;
}

json stats_json(const ResidualStats& s) {
    return json{{"max", s.max}, {"rms", s.rms}, {"nodes", s.nodes}};
}

} // namespace

bool ExperimentConfig::wants(const std::string& analysis) const {
    if (std::find(analyses.begin(), analyses.end(), "all") != analyses.end()) return true;
    return std::find(analyses.begin(), analyses.end(), analysis) != analyses.end();
}

ExperimentConfig parse_config(const json& doc) {
    try {
        ExperimentConfig cfg;
        const json& model = doc.at("model");
        cfg.n = model.at("n").get<int>();
        cfg.m = model.at("m").get<int>();
        if (cfg.m < 1 || cfg.m >= cfg.n) {
            throw ConfigError("model: need 1 <= m < n");
        }
        cfg.solution = doc.at("solution");
        if (!cfg.solution.contains("type")) {
            throw ConfigError("solution: missing type");
        }
        if (doc.contains("grid")) cfg.grid = grid_from_json(doc.at("grid"));
        if (doc.contains("refinements")) {
            for (const json& r : doc.at("refinements")) {
                cfg.refinements.emplace_back(r.at(0).get<int>(), r.at(1).get<int>());
            }
        }
        if (doc.contains("basepoint")) {
            cfg.basepoint_i = doc.at("basepoint")[0].get<int>();
            cfg.basepoint_j = doc.at("basepoint")[1].get<int>();
        }
        if (cfg.basepoint_i < 0 || cfg.basepoint_i >= cfg.grid.nL ||
            cfg.basepoint_j < 0 || cfg.basepoint_j >= cfg.grid.nR) {
            throw ConfigError("basepoint outside the grid");
        }
        cfg.seed = doc.value("seed", std::uint64_t(1));
        cfg.out_dir = doc.value("out", std::string("out"));
        if (doc.contains("analyses")) {
            cfg.analyses = doc.at("analyses").get<std::vector<std::string>>();
        }
        for (const std::string& a : cfg.analyses) {
            if (std::find(kKnownAnalyses.begin(), kKnownAnalyses.end(), a) ==
                kKnownAnalyses.end()) {
                throw ConfigError("unknown analysis '" + a + "'");
            }
        }
        if (doc.contains("frame")) {
            const json& fr = doc.at("frame");
            const std::string policy = fr.value("policy", std::string("anchored"));
            if (policy == "anchored") {
                cfg.frame_policy = NormalPolicy::TangentAnchored;
            } else if (policy == "split") {
                cfg.frame_policy = NormalPolicy::BlockSplit;
            } else {
                throw ConfigError("frame.policy must be 'anchored' or 'split'");
            }
            cfg.frame_seed = fr.value("seed", std::uint64_t(0));
        }
        if (doc.contains("tolerances")) cfg.tolerances = doc.at("tolerances");
        // fail early on an unknown catalog type
        if (cfg.solution.at("type") != "goursat") {
            parse_solution(cfg.solution, cfg.n, cfg.m);
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

json config_to_json(const ExperimentConfig& cfg) {
    json refinements = json::array();
    for (auto [nl, nr] : cfg.refinements) refinements.push_back({nl, nr});
    return json{{"model", {{"n", cfg.n}, {"m", cfg.m}}},
                {"solution", cfg.solution},
                {"grid", grid_to_json(cfg.grid)},
                {"refinements", refinements},
                {"basepoint", {cfg.basepoint_i, cfg.basepoint_j}},
                {"seed", cfg.seed},
                {"out", cfg.out_dir},
                {"analyses", cfg.analyses},
                {"frame",
                 {{"policy",
                   cfg.frame_policy == NormalPolicy::TangentAnchored ? "anchored" : "split"},
                  {"seed", cfg.frame_seed}}},
                {"tolerances", cfg.tolerances}};
}

AnalyticSolution parse_solution(const json& sol, int n, int m) {
    try {
        const std::string type = sol.at("type").get<std::string>();
        if (type == "constant") {
            if (sol.value("pinned", false)) {
                CMatrix x = CMatrix::Zero(n, m);
                x.topRows(m) = CMatrix::Identity(m, m);
                return constant_solution(StiefelFrame(std::move(x)));
            }
            std::mt19937_64 rng(sol.value("seed", std::uint64_t(1)));
            return constant_solution(random_stiefel(n, m, rng));
        }
        if (type == "chiral_wave") {
            if (m != 1) throw ConfigError("chiral_wave: only m = 1 is cataloged");
            const double omega = sol.value("omega", 1.0);
            int a0 = 0, a1 = 1;
            if (sol.contains("axes")) {
                a0 = sol.at("axes")[0].get<int>();
                a1 = sol.at("axes")[1].get<int>();
            }
            if (a0 < 0 || a1 < 0 || a0 >= n || a1 >= n || a0 == a1) {
                throw ConfigError("chiral_wave: invalid axes");
            }
            CVector v1 = CVector::Zero(n), v2 = CVector::Zero(n);
            v1(a0) = 1.0;
            v2(a1) = 1.0;
            return chiral_wave(n, 1, circle_curve(v1, v2, omega));
        }
        if (type == "balanced_torus" || type == "torus") {
            if (n != 2 || m != 1) throw ConfigError(type + ": requires n = 2, m = 1");
            const double a1 = sol.at("a")[0].get<double>(), a2 = sol.at("a")[1].get<double>();
            const double b1 = sol.at("b")[0].get<double>(), b2 = sol.at("b")[1].get<double>();
            if (type == "balanced_torus") return balanced_torus(a1, a2, b1, b2);
            const double c1 = sol.at("c")[0].get<double>(), c2 = sol.at("c")[1].get<double>();
            return torus(a1, a2, b1, b2, c1, c2);
        }
        if (type == "direct_sum") {
            const json& terms = sol.at("terms");
            if (!terms.is_array() || terms.size() < 2) {
                throw ConfigError("direct_sum: need at least two terms");
            }
            auto term_dims = [](const json& t) -> std::pair<int, int> {
                const std::string tt = t.at("type").get<std::string>();
                if (tt == "torus" || tt == "balanced_torus") return {2, 1};
                return {t.at("n").get<int>(), t.value("m", 1)};
            };
            auto [tn, tm] = term_dims(terms[0]);
            AnalyticSolution acc = parse_solution(terms[0], tn, tm);
            int total_n = tn, total_m = tm;
            for (std::size_t k = 1; k < terms.size(); ++k) {
                auto [kn, km] = term_dims(terms[k]);
                acc = direct_sum(acc, parse_solution(terms[k], kn, km));
                total_n += kn;
                total_m += km;
            }
            if (total_n != n || total_m != m) {
                throw ConfigError("direct_sum: term dimensions sum to (" +
                                  std::to_string(total_n) + "," + std::to_string(total_m) +
                                  "), expected (" + std::to_string(n) + "," +
                                  std::to_string(m) + ")");
            }
            return acc;
        }
        if (type == "conformal_sin") {
            const double ampL = sol.value("ampL", 0.3);
            const double ampR = sol.value("ampR", 0.2);
            if (std::abs(ampL) >= 1.0 || std::abs(ampR) >= 1.0) {
                throw ConfigError("conformal_sin: amplitudes must stay below 1");
            }
            const AnalyticSolution base = parse_solution(sol.at("base"), n, m);
            auto warp = [](double amp) {
                return RealMap{[amp](double t) { return t + amp * std::sin(t); },
                               [amp](double t) { return 1.0 + amp * std::cos(t); },
                               [amp](double t) { return -amp * std::sin(t); }};
            };
            return conformal_reparametrized(base, warp(ampL), warp(ampR));
        }
        if (type == "parity") {
            return parity_swapped(parse_solution(sol.at("base"), n, m));
        }
        throw ConfigError("unknown solution type '" + type + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("solution: ") + e.what());
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult result;
    json& report = result.report;
    report["config"] = config_to_json(cfg);

    const BuiltField built = build_field(cfg, cfg.grid);
    const GridField& field = built.field;
    report["provenance"] =
        field.provenance == Provenance::Analytic ? "analytic" : "solved";
    report["chart_min_singular_value"] = built.min_chart_sv;
    if (built.min_retraction_sv >= 0.0) {
        report["retraction_min_singular_value"] = built.min_retraction_sv;
    }

    if (cfg.wants("solve")) {
        result.files.push_back(
            write_artifact(cfg.out_dir, "gridfield.json", gridfield_to_json(field).dump(2)));
    }

    bool verify_failed = false;
    if (cfg.wants("verify")) {
        json verify;
        auto measure = [](const GridField& f) {
            json m;
            m["el_residual"] = stats_json(el_residual_stats(f));
            m["closedness_residual"] = loop_closedness_residual(f);
            m["conservation_defect"] = stats_json(conservation_defect_stats(f));
            m["orthogonality_defect"] = orthogonality_defect(f);
            return m;
        };
        verify["primary"] = measure(field);

        if (!cfg.refinements.empty()) {
            std::vector<double> hs = {cfg.grid.hL};
            std::vector<double> el = {verify["primary"]["el_residual"]["max"].get<double>()};
            std::vector<double> cl = {verify["primary"]["closedness_residual"].get<double>()};
            std::vector<double> co =
                {verify["primary"]["conservation_defect"]["max"].get<double>()};
            json table = json::array();
            for (auto [nl, nr] : cfg.refinements) {
                const LightConeGrid g = refined_grid(cfg.grid, nl, nr);
                const BuiltField refined = build_field(cfg, g);
                json row = measure(refined.field);
                row["grid"] = {nl, nr};
                hs.push_back(g.hL);
                el.push_back(row["el_residual"]["max"].get<double>());
                cl.push_back(row["closedness_residual"].get<double>());
                co.push_back(row["conservation_defect"]["max"].get<double>());
                table.push_back(std::move(row));
            }
            verify["refinements"] = std::move(table);
            auto order = [&](const std::vector<double>& errs) {
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                const double nn = static_cast<double>(hs.size());
                for (std::size_t k = 0; k < hs.size(); ++k) {
                    const double x = std::log(hs[k]);
                    const double y = std::log(std::max(errs[k], 1e-300));
                    sx += x; sy += y; sxx += x * x; sxy += x * y;
                }
                return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
            };
            verify["orders"] = {{"el_residual", order(el)},
                                {"closedness", order(cl)},
                                {"conservation", order(co)}};
        }

        json checks = json::array();
        auto add_check = [&](const std::string& name, double value, double threshold) {
            const bool pass = value <= threshold;
            checks.push_back({{"name", name},
                              {"value", value},
                              {"threshold", threshold},
                              {"pass", pass}});
            verify_failed = verify_failed || !pass;
        };
        const bool analytic = field.provenance == Provenance::Analytic;
        if (analytic || cfg.tolerances.contains("el")) {
            add_check("el_residual_max", verify["primary"]["el_residual"]["max"],
                      tolerance_or(cfg.tolerances, "el", 1e-10));
        }
        if (analytic || cfg.tolerances.contains("closedness")) {
            add_check("closedness_residual", verify["primary"]["closedness_residual"],
                      tolerance_or(cfg.tolerances, "closedness", 1e-9));
        }
        if (analytic || cfg.tolerances.contains("orthogonality")) {
            add_check("orthogonality_defect", verify["primary"]["orthogonality_defect"],
                      tolerance_or(cfg.tolerances, "orthogonality", 1e-10));
        }
        if (cfg.tolerances.contains("min_order") && !cfg.refinements.empty()) {
            const double min_order = cfg.tolerances.at("min_order").get<double>();
            for (const auto& [key, val] : verify["orders"].items()) {
                const bool pass = val.get<double>() >= min_order;
                checks.push_back({{"name", "order_" + key},
                                  {"value", val},
                                  {"threshold", min_order},
                                  {"pass", pass}});
                verify_failed = verify_failed || !pass;
            }
        }
        verify["checks"] = std::move(checks);
        report["verify"] = std::move(verify);
    }

    if (cfg.wants("surface")) {
        const SurfaceMesh mesh = weierstrass_integrate(
            field, cfg.basepoint_i, cfg.basepoint_j, AlgebraElement::Zero(field.n));
        result.files.push_back(
            write_artifact(cfg.out_dir, "surface.json", surface_to_json(mesh).dump(2)));
        result.files.push_back(
            write_artifact(cfg.out_dir, "surface.csv", surface_csv(mesh)));
    }

    if (cfg.wants("geometry")) {
        const GeometryField geo = compute_geometry(field);
        result.files.push_back(write_artifact(cfg.out_dir, "geometry.csv", geometry_csv(geo)));
        json summary;
        int regular = 0, withK = 0;
        double maxAbsK = 0.0, maxAbsH = 0.0;
        for (std::size_t k = 0; k < geo.metric.size(); ++k) {
            regular += geo.regular[k] ? 1 : 0;
            if (geo.hasK[k]) {
                ++withK;
                maxAbsK = std::max(maxAbsK, std::abs(geo.K[k]));
            }
            if (geo.hasH[k]) maxAbsH = std::max(maxAbsH, geo.absH[k]);
        }
        summary["regular_nodes"] = regular;
        summary["curvature_nodes"] = withK;
        summary["max_abs_K"] = maxAbsK;
        summary["max_abs_H"] = maxAbsH;
        report["geometry"] = std::move(summary);
    }

    if (cfg.wants("frame")) {
        const FrameField frames = build_frame_field(field, cfg.frame_policy, cfg.frame_seed);
        const GaussWeingartenField gw = gw_coefficients_field(field, frames);
        const GcrField gcr = gauss_codazzi_residual_field(gw);
        result.files.push_back(
            write_artifact(cfg.out_dir, "frame.json", frame_to_json(frames, gw, gcr).dump(2)));

        double gram_defect = 0.0;
        for (const auto& b : frames.bundles) {
            if (!b) continue;
            for (std::size_t a = 0; a < b->normals.size(); ++a) {
                gram_defect = std::max({gram_defect,
                                        std::abs(inner_product(b->normals[a], b->zL)),
                                        std::abs(inner_product(b->normals[a], b->zR))});
                for (std::size_t c = a; c < b->normals.size(); ++c) {
                    const double expect = a == c ? 1.0 : 0.0;
                    gram_defect = std::max(
                        gram_defect,
                        std::abs(inner_product(b->normals[a], b->normals[c]) - expect));
                }
            }
        }
        const GcrStats stats = gcr_stats(gcr);
        const GcrStats gated = gcr_stats(gcr, gw, 0.25);
        report["frame"] = {{"orthonormality_defect", gram_defect},
                           {"gcr", {{"max", stats.max}, {"rms", stats.rms}, {"nodes", stats.nodes}}},
                           {"gcr_regular_region",
                            {{"max", gated.max}, {"rms", gated.rms}, {"nodes", gated.nodes}}},
                           {"antisymmetry_defect", gw.max_antisym_defect}};
    }

    result.files.push_back(
        write_artifact(cfg.out_dir, "report.json", report.dump(2)));
    result.files.push_back(write_artifact(
        cfg.out_dir, "manifest.json",
        manifest_json(result.files, config_to_json(cfg)).dump(2)));

    result.exit_code = verify_failed ? kExitVerifyFailed : kExitOk;
    return result;
}

} // namespace grsurf
