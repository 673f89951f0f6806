#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lpsketch/cli.hpp"

using namespace lpsketch;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("solve subcommand reports the objective") {
    TempFile lp_file{"cli_lp.json"};
    TempFile out_file{"cli_solve.json"};

    Matrix A(1, 1);
    A << 1.0;
    save_lp(make_lp(Vector::Ones(1), A, (Vector(1) << 1.0).finished()), lp_file.path);

    int rc = dispatch({"solve", "--in", lp_file.path, "--out", out_file.path});
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(slurp(out_file.path));
    CHECK(j.at("status") == "optimal");
    CHECK(j.at("objective").get<double>() == Catch::Approx(1.0));
}

TEST_CASE("unknown flags are usage errors") {
    CHECK(dispatch({"solve", "--in", "x.json", "--frobnicate"}) == 1);
    CHECK(dispatch({"no-such-subcommand"}) == 1);
    CHECK(dispatch({}) == 1);
}

TEST_CASE("missing input file is a runtime failure") {
    CHECK(dispatch({"solve", "--in", "definitely_missing.json"}) == 2);
}

TEST_CASE("gen then solve round trip") {
    TempFile lp_file{"cli_gen.json"};
    TempFile aux_file{"cli_gen_aux.json"};
    TempFile out_file{"cli_gen_solve.json"};

    CHECK(dispatch({"gen", "--m", "6", "--n", "9", "--density", "0.8", "--seed", "5",
                    "--out", lp_file.path, "--aux-out", aux_file.path}) == 0);
    auto aux = nlohmann::json::parse(slurp(aux_file.path));
    CHECK(aux.contains("planted_x"));

    CHECK(dispatch({"solve", "--in", lp_file.path, "--out", out_file.path}) == 0);
    auto j = nlohmann::json::parse(slurp(out_file.path));
    CHECK(j.at("status") == "optimal");

    // infeasible generation reports a certificate and solve confirms
    CHECK(dispatch({"gen", "--m", "6", "--n", "9", "--infeasible", "--seed", "5",
                    "--out", lp_file.path, "--aux-out", aux_file.path}) == 0);
    CHECK(nlohmann::json::parse(slurp(aux_file.path)).contains("certificate"));
    CHECK(dispatch({"solve", "--in", lp_file.path, "--out", out_file.path}) == 0);
    CHECK(nlohmann::json::parse(slurp(out_file.path)).at("status") == "infeasible");
}

TEST_CASE("bench count contract") {
    TempFile grid_file{"cli_grid.json"};
    TempFile out_file{"cli_bench.csv"};
    {
        nlohmann::json grid = nlohmann::json::array();
        for (int c = 0; c < 3; ++c)
            grid.push_back(GenConfig{10, 14, 0.5, 0, c % 2 == 0});
        std::ofstream out(grid_file.path);
        out << grid.dump();
    }
    CHECK(dispatch({"bench", "--grid", grid_file.path, "--eps", "0.2", "--cells", "2",
                    "--per-cell", "3", "--seed", "1", "--out", out_file.path}) == 0);
    auto text = slurp(out_file.path);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 6);  // header + 2 cells x 3 instances
}

TEST_CASE("identical argv and seed give byte-identical artifacts") {
    TempFile lp_file{"cli_det_lp.json"};
    TempFile out_a{"cli_det_a.json"};
    TempFile out_b{"cli_det_b.json"};
    REQUIRE(dispatch({"gen", "--m", "12", "--n", "18", "--seed", "7", "--out",
                      lp_file.path}) == 0);
    REQUIRE(dispatch({"retrieve", "--in", lp_file.path, "--eps", "0.2", "--method",
                      "pinv", "--solve-reference", "--seed", "3", "--out", out_a.path}) ==
            0);
    REQUIRE(dispatch({"retrieve", "--in", lp_file.path, "--eps", "0.2", "--method",
                      "pinv", "--solve-reference", "--seed", "3", "--out", out_b.path}) ==
            0);
    CHECK(slurp(out_a.path) == slurp(out_b.path));
}

TEST_CASE("seed falls back to the environment") {
    TempFile out_a{"cli_env_a.json"};
    TempFile out_b{"cli_env_b.json"};
    setenv("LPSKETCH_SEED", "99", 1);
    REQUIRE(dispatch({"gen", "--m", "5", "--n", "8", "--out", out_a.path}) == 0);
    unsetenv("LPSKETCH_SEED");
    REQUIRE(dispatch({"gen", "--m", "5", "--n", "8", "--seed", "99", "--out",
                      out_b.path}) == 0);
    CHECK(slurp(out_a.path) == slurp(out_b.path));
}

TEST_CASE("project subcommand writes a solvable instance") {
    TempFile lp_file{"cli_prj_lp.json"};
    TempFile prj_file{"cli_prj_out.json"};
    TempFile proj_file{"cli_prj_T.json"};
    REQUIRE(dispatch({"gen", "--m", "10", "--n", "15", "--seed", "11", "--out",
                      lp_file.path}) == 0);
    CHECK(dispatch({"project", "--in", lp_file.path, "--k", "4", "--seed", "12",
                    "--out", prj_file.path, "--projector-out", proj_file.path}) == 0);
    auto plp = load_lp(prj_file.path);
    CHECK(plp.rows() == 4);
    CHECK(plp.cols() == 15);
    auto T = nlohmann::json::parse(slurp(proj_file.path)).get<Projector>();
    CHECK(T.k == 4);
    CHECK(T.m == 10);
}

TEST_CASE("jll-check emits concentration statistics") {
    TempFile out_file{"cli_jll.json"};
    CHECK(dispatch({"jll-check", "--m", "200", "--points", "10", "--eps", "0.2",
                    "--seed", "2", "--out", out_file.path}) == 0);
    auto j = nlohmann::json::parse(slurp(out_file.path));
    CHECK(j.at("n_pairs").get<int>() == 45);
    CHECK(j.at("fraction_within").get<double>() >= 0.0);
}

TEST_CASE("ecc subcommand round trips a small text") {
    TempFile out_file{"cli_ecc.json"};
    CHECK(dispatch({"ecc", "--text", "ab", "--rate", "0", "--delta", "0.5", "--k", "7",
                    "--q", "0.1", "--seed", "3", "--out", out_file.path}) == 0);
    auto j = nlohmann::json::parse(slurp(out_file.path));
    CHECK(j.at("unprojected").at("text_recovered").get<bool>());
    CHECK(j.at("projected").at("text_recovered").get<bool>());
}
