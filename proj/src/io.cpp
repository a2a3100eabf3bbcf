#include "grsurf/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sha256.hpp"

namespace grsurf {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw ConfigError("malformed file: " + what);
}

} // namespace

json matrix_to_json(const CMatrix& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
            out.push_back({m(r, c).real(), m(r, c).imag()});
        }
    }
    return out;
}

CMatrix matrix_from_json(const json& j, int rows, int cols) {
    require(j.is_array() && static_cast<int>(j.size()) == rows * cols,
            "matrix entry count");
    CMatrix m(rows, cols);
    int k = 0;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c, ++k) {
            require(j[k].is_array() && j[k].size() == 2, "matrix entry pair");
            m(r, c) = Complex(j[k][0].get<double>(), j[k][1].get<double>());
        }
    }
    return m;
}

json grid_to_json(const LightConeGrid& g) {
    return json{{"xiL0", g.xiL0}, {"xiR0", g.xiR0}, {"hL", g.hL},
                {"hR", g.hR},     {"nL", g.nL},     {"nR", g.nR}};
}

LightConeGrid grid_from_json(const json& j) {
    LightConeGrid g;
    g.xiL0 = j.at("xiL0").get<double>();
    g.xiR0 = j.at("xiR0").get<double>();
    g.hL = j.at("hL").get<double>();
    g.hR = j.at("hR").get<double>();
    g.nL = j.at("nL").get<int>();
    g.nR = j.at("nR").get<int>();
    g.validate();
    return g;
}

json gridfield_to_json(const GridField& field) {
    json frames = json::array();
    for (const CMatrix& f : field.frames) frames.push_back(matrix_to_json(f));
    return json{{"format", "grsurf.gridfield"},
                {"version", 1},
                {"n", field.n},
                {"m", field.m},
                {"provenance", field.provenance == Provenance::Analytic ? "analytic" : "solved"},
                {"grid", grid_to_json(field.grid)},
                {"node_order", "index = i + nL*j (i along xiL)"},
                {"frames", frames}};
}

GridField gridfield_from_json(const json& j) {
    require(j.at("format") == "grsurf.gridfield", "format tag");
    GridField field;
    field.n = j.at("n").get<int>();
    field.m = j.at("m").get<int>();
    field.provenance =
        j.at("provenance") == "analytic" ? Provenance::Analytic : Provenance::Solved;
    field.grid = grid_from_json(j.at("grid"));
    const json& frames = j.at("frames");
    require(frames.size() == field.grid.size(), "frame count");
    field.frames.reserve(frames.size());
    for (const json& f : frames) {
        CMatrix x = matrix_from_json(f, field.n, field.m);
        if (StiefelFrame::constraint_defect(x) > kStiefelTol) {
            throw ConfigError("grid field node violates the Stiefel constraint");
        }
        field.frames.push_back(std::move(x));
    }
    return field;
}

json surface_to_json(const SurfaceMesh& mesh) {
    json z = json::array();
    json coords = json::array();
    for (std::size_t k = 0; k < mesh.z.size(); ++k) {
        z.push_back(matrix_to_json(mesh.z[k].mat()));
        json c = json::array();
        for (int q = 0; q < mesh.coords[k].size(); ++q) c.push_back(mesh.coords[k](q));
        coords.push_back(std::move(c));
    }
    return json{{"format", "grsurf.surface"},
                {"version", 1},
                {"n", mesh.n},
                {"grid", grid_to_json(mesh.grid)},
                {"basepoint", {mesh.basepoint_i, mesh.basepoint_j}},
                {"basis_order", "A_jk (j<k), B_jk (j<k), C_p"},
                {"z", z},
                {"coords", coords}};
}

SurfaceMesh surface_from_json(const json& j) {
    require(j.at("format") == "grsurf.surface", "format tag");
    SurfaceMesh mesh;
    mesh.n = j.at("n").get<int>();
    mesh.grid = grid_from_json(j.at("grid"));
    mesh.basepoint_i = j.at("basepoint")[0].get<int>();
    mesh.basepoint_j = j.at("basepoint")[1].get<int>();
    const json& z = j.at("z");
    const json& coords = j.at("coords");
    require(z.size() == mesh.grid.size() && coords.size() == mesh.grid.size(),
            "node count");
    for (std::size_t k = 0; k < z.size(); ++k) {
        mesh.z.emplace_back(matrix_from_json(z[k], mesh.n, mesh.n));
        RVector c(coords[k].size());
        for (std::size_t q = 0; q < coords[k].size(); ++q) {
            c(static_cast<int>(q)) = coords[k][q].get<double>();
        }
        mesh.coords.push_back(std::move(c));
    }
    return mesh;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string geometry_csv(const GeometryField& geo) {
    std::string out = "xiL,xiR,J_L,J_R,G_LR,detG,K,absH,regular\n";
    for (int j = 0; j < geo.grid.nR; ++j) {
        for (int i = 0; i < geo.grid.nL; ++i) {
            const std::size_t k = geo.grid.index(i, j);
            const MetricData& m = geo.metric[k];
            out += format_double(geo.grid.xiL(i)) + ',' + format_double(geo.grid.xiR(j)) +
                   ',' + format_double(m.jL) + ',' + format_double(m.jR) + ',' +
                   format_double(m.gLR) + ',' + format_double(m.detG) + ',';
            if (geo.hasK[k]) out += format_double(geo.K[k]);
            out += ',';
            if (geo.hasH[k]) out += format_double(geo.absH[k]);
            out += ',';
            out += geo.regular[k] ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

std::string surface_csv(const SurfaceMesh& mesh) {
    std::string out = "xiL,xiR";
    const int d = mesh.coords.empty() ? 0 : static_cast<int>(mesh.coords[0].size());
    for (int q = 0; q < d; ++q) out += ",c" + std::to_string(q);
    out += '\n';
    for (int j = 0; j < mesh.grid.nR; ++j) {
        for (int i = 0; i < mesh.grid.nL; ++i) {
            const RVector& c = mesh.coords[mesh.grid.index(i, j)];
            out += format_double(mesh.grid.xiL(i)) + ',' + format_double(mesh.grid.xiR(j));
            for (int q = 0; q < d; ++q) out += ',' + format_double(c(q));
            out += '\n';
        }
    }
    return out;
}

std::string projection_csv(const SurfaceMesh& mesh, bool use_pca,
                           const std::vector<int>& axes) {
    const int d = mesh.coords.empty() ? 0 : static_cast<int>(mesh.coords[0].size());
    const std::size_t nodes = mesh.coords.size();
    RMatrix proj(3, d);
    std::string header;
    if (use_pca) {
        RVector mean = RVector::Zero(d);
        for (const RVector& c : mesh.coords) mean += c;
        mean /= static_cast<double>(nodes);
        RMatrix cov = RMatrix::Zero(d, d);
        for (const RVector& c : mesh.coords) {
            const RVector dvec = c - mean;
            cov += dvec * dvec.transpose();
        }
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(cov);
        for (int q = 0; q < 3; ++q) {
            proj.row(q) = eig.eigenvectors().col(d - 1 - q).transpose();
        }
        header = "# projection: top-3 principal components of the node cloud\n";
    } else {
        if (axes.size() != 3) throw ConfigError("projection needs exactly 3 axes");
        proj.setZero();
        for (int q = 0; q < 3; ++q) {
            if (axes[static_cast<std::size_t>(q)] < 0 || axes[static_cast<std::size_t>(q)] >= d) {
                throw ConfigError("projection axis out of range");
            }
            proj(q, axes[static_cast<std::size_t>(q)]) = 1.0;
        }
        header = "# projection: basis coordinates " + std::to_string(axes[0]) + "," +
                 std::to_string(axes[1]) + "," + std::to_string(axes[2]) + "\n";
    }
    std::string out = header + "xiL,xiR,x,y,z\n";
    for (int j = 0; j < mesh.grid.nR; ++j) {
        for (int i = 0; i < mesh.grid.nL; ++i) {
            const RVector p = proj * mesh.coords[mesh.grid.index(i, j)];
            out += format_double(mesh.grid.xiL(i)) + ',' + format_double(mesh.grid.xiR(j)) +
                   ',' + format_double(p(0)) + ',' + format_double(p(1)) + ',' +
                   format_double(p(2)) + '\n';
        }
    }
    return out;
}

json frame_to_json(const FrameField& frames, const GaussWeingartenField& gw,
                   const GcrField& gcr) {
    json nodes = json::array();
    const LightConeGrid& g = frames.grid;
    for (int j = 0; j < g.nR; ++j) {
        for (int i = 0; i < g.nL; ++i) {
            const std::size_t k = g.index(i, j);
            json node{{"i", i}, {"j", j}};
            const auto& b = frames.at(i, j);
            node["regular"] = bool(b);
            if (b) {
                node["phi"] = matrix_to_json(b->phi);
                json normals = json::array();
                for (const AlgebraElement& nrm : b->normals) {
                    normals.push_back(matrix_to_json(nrm.mat()));
                }
                node["normals"] = std::move(normals);
            }
            node["gw_valid"] = bool(gw.valid[k]);
            if (gw.valid[k]) {
                json u = json::array(), v = json::array();
                for (int r = 0; r < gw.dim; ++r) {
                    for (int c = 0; c < gw.dim; ++c) {
                        u.push_back(gw.u[k](r, c));
                        v.push_back(gw.v[k](r, c));
                    }
                }
                node["u"] = std::move(u);
                node["v"] = std::move(v);
            }
            if (gcr.valid[k]) node["gcr_residual"] = gcr.residual[k];
            nodes.push_back(std::move(node));
        }
    }
    return json{{"format", "grsurf.frame"},
                {"version", 1},
                {"n", frames.n},
                {"m", frames.m},
                {"policy", frames.policy == NormalPolicy::TangentAnchored ? "anchored" : "split"},
                {"seed", frames.seed},
                {"grid", grid_to_json(g)},
                {"frame_order", "Z_L, Z_R, normals"},
                {"nodes", nodes}};
}

WrittenFile write_artifact(const std::string& dir, const std::string& name,
                           const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericalError("cannot open output file " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    return WrittenFile{name, content.size(), sha256_hex(content)};
}

json manifest_json(const std::vector<WrittenFile>& files, const json& config) {
    json list = json::array();
    for (const WrittenFile& f : files) {
        list.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    }
    return json{{"format", "grsurf.manifest"},
                {"version", 1},
                {"tool", "grsurf"},
                {"files", list},
                {"config", config}};
}

} // namespace grsurf
