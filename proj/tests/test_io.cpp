#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "grsurf/io.hpp"
#include "test_support.hpp"

// sha256 lives in src/; declared here to test against FIPS vectors
namespace grsurf {
std::string sha256_hex(const std::string& data);
}

using namespace grsurf;

TEST_CASE("sha256 reference vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    // block-boundary lengths
    CHECK(sha256_hex(std::string(64, 'a')) ==
          "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
}

TEST_CASE("matrix json round trip") {
    std::mt19937_64 rng(4);
    const CMatrix m = testing::random_complex(3, 2, rng);
    const CMatrix back = matrix_from_json(matrix_to_json(m), 3, 2);
    CHECK((m - back).norm() == 0.0);
    CHECK_THROWS_AS(matrix_from_json(matrix_to_json(m), 2, 2), ConfigError);
}

TEST_CASE("grid field json round trip") {
    const AnalyticSolution sol = balanced_torus(1.0, -0.4, 0.3, -0.7);
    const LightConeGrid grid{0.0, 0.0, 0.125, 0.125, 9, 9};
    const GridField field = sample_solution(sol, grid);
    const json doc = gridfield_to_json(field);
    const GridField back = gridfield_from_json(doc);
    CHECK(back.n == field.n);
    CHECK(back.m == field.m);
    CHECK(back.provenance == Provenance::Analytic);
    double worst = 0.0;
    for (std::size_t k = 0; k < field.frames.size(); ++k) {
        worst = std::max(worst, (field.frames[k] - back.frames[k]).norm());
    }
    CHECK(worst == 0.0); // bit-exact through JSON

    json corrupted = doc;
    corrupted["frames"][0][0][0] = 5.0; // breaks the Stiefel constraint
    CHECK_THROWS_AS(gridfield_from_json(corrupted), ConfigError);
}

TEST_CASE("surface json round trip and csv exports") {
    const AnalyticSolution sol = balanced_torus(1.0, -1.0, 0.5, -0.5);
    const LightConeGrid grid{0.0, 0.0, 0.25, 0.25, 5, 5};
    const GridField field = sample_solution(sol, grid);
    const SurfaceMesh mesh = weierstrass_integrate(field, 0, 0, AlgebraElement::Zero(2));

    const SurfaceMesh back = surface_from_json(surface_to_json(mesh));
    CHECK(back.n == 2);
    double worst = 0.0;
    for (std::size_t k = 0; k < mesh.z.size(); ++k) {
        worst = std::max(worst, (mesh.z[k].mat() - back.z[k].mat()).norm());
        worst = std::max(worst, (mesh.coords[k] - back.coords[k]).norm());
    }
    CHECK(worst == 0.0);

    const std::string csv = surface_csv(mesh);
    CHECK(csv.rfind("xiL,xiR,c0,c1,c2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 25);

    const std::string proj = projection_csv(mesh, false, {0, 1, 2});
    CHECK(proj.find("basis coordinates 0,1,2") != std::string::npos);
    CHECK_THROWS_AS(projection_csv(mesh, false, {0, 1, 99}), ConfigError);
    const std::string pca = projection_csv(mesh, true);
    CHECK(pca.find("principal components") != std::string::npos);
}

TEST_CASE("geometry csv layout") {
    const AnalyticSolution sum = direct_sum(balanced_torus(1.0, -1.0, 0.0, 0.0),
                                            balanced_torus(0.0, 0.0, 1.0, -1.0));
    const LightConeGrid grid{0.0, 0.0, 0.25, 0.25, 5, 5};
    const GeometryField geo = compute_geometry(sample_solution(sum, grid));
    const std::string csv = geometry_csv(geo);
    CHECK(csv.rfind("xiL,xiR,J_L,J_R,G_LR,detG,K,absH,regular\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 25);
    // interior row carries a K entry, corner rows leave it empty
    CHECK(csv.find(",,") != std::string::npos); // boundary K omitted
}

TEST_CASE("17 significant digit formatting round-trips") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-1e3, 1e3);
    for (int rep = 0; rep < 100; ++rep) {
        const double v = dist(rng);
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("artifact writing and manifest digests") {
    namespace fs = std::filesystem;
    const std::string dir = (fs::temp_directory_path() / "grsurf_io_test").string();
    fs::remove_all(dir);

    const WrittenFile f = write_artifact(dir, "hello.txt", "abc");
    CHECK(f.bytes == 3);
    CHECK(f.sha256 ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(fs::exists(fs::path(dir) / "hello.txt"));

    const json man = manifest_json({f}, json{{"demo", true}});
    CHECK(man.at("files").size() == 1);
    CHECK(man.at("files")[0].at("path") == "hello.txt");
    CHECK(man.at("config").at("demo") == true);
    fs::remove_all(dir);
}
