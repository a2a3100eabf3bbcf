#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grsurf/experiment.hpp"

namespace {

using grsurf::json;

struct SharedOptions {
    std::string config_path;
    std::string grid;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw grsurf::ConfigError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw grsurf::ConfigError(path + ": " + e.what());
    }
    return doc;
}

void apply_overrides(grsurf::ExperimentConfig& cfg, const SharedOptions& opt) {
    if (!opt.grid.empty()) {
        int nl = 0, nr = 0;
        double hl = 0, hr = 0;
        if (std::sscanf(opt.grid.c_str(), "%d,%d,%lf,%lf", &nl, &nr, &hl, &hr) != 4) {
            throw grsurf::ConfigError("--grid expects nL,nR,hL,hR");
        }
        cfg.grid.nL = nl;
        cfg.grid.nR = nr;
        cfg.grid.hL = hl;
        cfg.grid.hR = hr;
        cfg.grid.validate();
    }
    if (opt.has_seed) cfg.seed = opt.seed;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (cfg.basepoint_i >= cfg.grid.nL || cfg.basepoint_j >= cfg.grid.nR) {
        throw grsurf::ConfigError("basepoint outside the overridden grid");
    }
}

void print_summary(const grsurf::ExperimentResult& result) {
    const json& rep = result.report;
    std::printf("provenance: %s\n", rep.at("provenance").get<std::string>().c_str());
    if (rep.contains("verify")) {
        const json& v = rep.at("verify");
        std::printf("el residual (max): %s\n",
                    v.at("primary").at("el_residual").at("max").dump().c_str());
        std::printf("closedness residual: %s\n",
                    v.at("primary").at("closedness_residual").dump().c_str());
        if (v.contains("orders")) {
            for (const auto& [key, val] : v.at("orders").items()) {
                std::printf("convergence order %s: %.3f\n", key.c_str(), val.get<double>());
            }
        }
        for (const json& check : v.at("checks")) {
            std::printf("[%s] %s = %g (threshold %g)\n",
                        check.at("pass").get<bool>() ? "PASS" : "FAIL",
                        check.at("name").get<std::string>().c_str(),
                        check.at("value").get<double>(),
                        check.at("threshold").get<double>());
        }
    }
    if (rep.contains("geometry")) {
        const json& g = rep.at("geometry");
        std::printf("geometry: %d regular nodes, max|K| = %g, max|H| = %g\n",
                    g.at("regular_nodes").get<int>(), g.at("max_abs_K").get<double>(),
                    g.at("max_abs_H").get<double>());
    }
    if (rep.contains("frame")) {
        const json& f = rep.at("frame");
        std::printf("frame: orthonormality defect %g, GCR max %g (regular region %g)\n",
                    f.at("orthonormality_defect").get<double>(),
                    f.at("gcr").at("max").get<double>(),
                    f.at("gcr_regular_region").at("max").get<double>());
    }
    for (const grsurf::WrittenFile& f : result.files) {
        std::printf("wrote %s (%zu bytes, sha256 %.12s...)\n", f.path.c_str(), f.bytes,
                    f.sha256.c_str());
    }
}

int run_analysis(const SharedOptions& opt, const std::string& analysis) {
    json doc = load_json_file(opt.config_path);
    grsurf::ExperimentConfig cfg = grsurf::parse_config(doc);
    if (!analysis.empty()) cfg.analyses = {analysis};
    apply_overrides(cfg, opt);
    const grsurf::ExperimentResult result = grsurf::run_experiment(cfg);
    print_summary(result);
    return result.exit_code;
}

int run_export(const std::string& input, const std::string& out_dir, bool use_pca,
               const std::string& axes_str) {
    const grsurf::SurfaceMesh mesh = grsurf::surface_from_json(load_json_file(input));
    std::vector<int> axes = {0, 1, 2};
    if (!axes_str.empty()) {
        int a = 0, b = 0, c = 0;
        if (std::sscanf(axes_str.c_str(), "%d,%d,%d", &a, &b, &c) != 3) {
            throw grsurf::ConfigError("--axes expects i,j,k");
        }
        axes = {a, b, c};
    }
    std::vector<grsurf::WrittenFile> files;
    files.push_back(grsurf::write_artifact(out_dir, "projection.csv",
                                           grsurf::projection_csv(mesh, use_pca, axes)));
    files.push_back(grsurf::write_artifact(
        out_dir, "manifest-export.json",
        grsurf::manifest_json(files, json{{"input", input}}).dump(2)));
    for (const grsurf::WrittenFile& f : files) {
        std::printf("wrote %s (%zu bytes, sha256 %.12s...)\n", f.path.c_str(), f.bytes,
                    f.sha256.c_str());
    }
    return grsurf::kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surfaces of Grassmannian sigma models on light-cone lattices"};
    app.require_subcommand(1);

    SharedOptions opt;
    const std::vector<std::pair<std::string, std::string>> analyses = {
        {"verify", "Residual and invariant checks against configured tolerances"},
        {"solve", "Produce the lattice field and write gridfield.json"},
        {"surface", "Integrate the immersion and write surface.json/.csv"},
        {"geometry", "Per-node metric and curvature CSV"},
        {"frame", "Moving frame, connection matrices and compatibility residual"},
        {"all", "Run every analysis"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, desc] : analyses) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", opt.config_path, "Experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--grid", opt.grid, "Override grid: nL,nR,hL,hR");
        sub->add_option("--seed", opt.seed, "Override the experiment seed")
            ->each([&](const std::string&) { opt.has_seed = true; });
        sub->add_option("--out", opt.out_dir, "Output directory");
        subs.push_back(sub);
    }

    CLI::App* exp = app.add_subcommand("export", "Project a surface for plotting");
    std::string input, axes;
    std::string export_out = "out";
    bool use_pca = false;
    exp->add_option("--input", input, "surface.json produced by the surface analysis")
        ->required()
        ->check(CLI::ExistingFile);
    exp->add_option("--out", export_out, "Output directory");
    exp->add_flag("--pca", use_pca, "Use the top-3 principal components");
    exp->add_option("--axes", axes, "Basis coordinate axes i,j,k (default 0,1,2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : grsurf::kExitConfigError;
    }

    try {
        if (exp->parsed()) return run_export(input, export_out, use_pca, axes);
        for (std::size_t k = 0; k < subs.size(); ++k) {
            if (subs[k]->parsed()) {
                const std::string& name = analyses[k].first;
                return run_analysis(opt, name == "all" ? "all" : name);
            }
        }
        return grsurf::kExitConfigError;
    } catch (const grsurf::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return grsurf::kExitConfigError;
    } catch (const grsurf::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return grsurf::kExitNumericalError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return grsurf::kExitNumericalError;
    }
}
