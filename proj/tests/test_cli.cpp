// End-to-end exercises of the nsbesov binary: snapshots in, artifacts out,
// exit-code contract, determinism of emitted CSVs.

#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "nsbesov/experiments.hpp"
#include "nsbesov/multipliers.hpp"
#include "nsbesov/random.hpp"
#include "nsbesov/snapshot.hpp"

using namespace nsbesov;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(NSBESOV_BIN) + " " + args + " >cli_stdout.txt 2>cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("cli: stationary -> norms -> evolve round trip") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    VectorField f = vector_field_with_spectrum(g, 0.0, 3.0, 12345, true);
    f = frac_laplacian(f, 2.0);
    f *= 0.02 / besov_value(f, -0.5, 2.0);
    save_snapshot(f, "cli_force.nsbf");

    CHECK(run("stationary --force cli_force.nsbf --p 2 --out cli_st") == 0);
    const Snapshot st = load_snapshot("cli_st.nsbf");
    CHECK(st.is_vector());
    CHECK(st.as_vector().divergence_free_within(1e-10));
    CHECK(slurp("cli_st.txt").find("relative residual") != std::string::npos);

    CHECK(run("norms --input cli_st.nsbf --s 0.5 --p 2 --weak-lp 3 --report csv --out cli_norms.csv") == 0);
    const std::string csv = slurp("cli_norms.csv");
    CHECK(csv.rfind("j,block_lp,weighted", 0) == 0);
    CHECK(csv.find("summary") != std::string::npos);
    CHECK(csv.find("weak_lp_3") != std::string::npos);

    CHECK(run("evolve --initial cli_st.nsbf --force cli_force.nsbf --T 0.2 --dt 0.02 "
              "--samples 4 --method direct --out-prefix cli_ev") == 0);
    CHECK(slurp("cli_ev_trace.csv").rfind("t,", 0) == 0);
    CHECK(load_snapshot("cli_ev_final.nsbf").is_vector());

    // picard around the solved background: starting at U itself the
    // perturbation vanishes, so the final state is U again
    CHECK(run("evolve --initial cli_st.nsbf --force cli_force.nsbf --background solve "
              "--T 0.2 --dt 0.02 --samples 4 --method picard --out-prefix cli_pic") == 0);
    {
        const VectorField ufinal = load_snapshot("cli_pic_final.nsbf").as_vector();
        const VectorField ust = load_snapshot("cli_st.nsbf").as_vector();
        VectorField d = ufinal;
        d -= ust;
        CHECK(l2_coeff_norm(d) <= 1e-8 * l2_coeff_norm(ust));
    }
    std::remove("cli_pic_trace.csv");
    std::remove("cli_pic_final.nsbf");

    for (const char* p : {"cli_force.nsbf", "cli_st.nsbf", "cli_st.txt", "cli_norms.csv",
                          "cli_ev_trace.csv", "cli_ev_final.nsbf"})
        std::remove(p);
    for (int i = 0; i < 8; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "cli_ev_%04d.nsbf", i);
        std::remove(name);
        std::snprintf(name, sizeof(name), "cli_pic_%04d.nsbf", i);
        std::remove(name);
    }
}

TEST_CASE("cli: stability is deterministic and honors the config schema") {
    {
        std::ofstream cfg("cli_cfg.json");
        cfg << "{\n  \"N\": 16, \"L\": " << format_double(4.0 * M_PI)
            << ", \"t_min\": 0.02, \"t_max\": 0.4, \"dt\": 0.02,\n"
            << "  \"forcing_amplitude\": 0.01, \"epsilon\": 0.005, \"out_prefix\": \"cli_stab\"\n}\n";
    }
    CHECK(run("stability --config cli_cfg.json") == 0);
    const std::string csv1 = slurp("cli_stab.csv");
    const std::string json1 = slurp("cli_stab_summary.json");
    CHECK(csv1.rfind("t,besov_high,besov_base,besov_low,weak_lp_high,weak_lp_low", 0) == 0);
    for (const char* key : {"slope_high", "gamma", "seeds", "pass_low"})
        CHECK(json1.find(key) != std::string::npos);

    CHECK(run("stability --config cli_cfg.json") == 0);
    CHECK(slurp("cli_stab.csv") == csv1);
    CHECK(slurp("cli_stab_summary.json") == json1);

    // unknown key and precondition violations map to exit 2
    CHECK(run("stability --config cli_cfg.json --set bogus=1") == 2);
    CHECK(run("stability --config cli_cfg.json --set p=5.0") == 2);
    CHECK(run("stability --config cli_cfg.json --set t_max=100.0") == 2);

    for (const char* p : {"cli_cfg.json", "cli_stab.csv", "cli_stab_summary.json"}) std::remove(p);
}

TEST_CASE("cli: verify suite emits deterministic sweeps") {
    CHECK(run("verify --suite generator --N 16 --seed 7 --out cli_ver") == 0);
    const std::string sweep = slurp("cli_ver_generator_residual.csv");
    CHECK(sweep.rfind("t,lhs_norm,rhs_scale,ratio", 0) == 0);
    CHECK(run("verify --suite generator --N 16 --seed 7 --out cli_ver2") == 0);
    CHECK(slurp("cli_ver2_generator_residual.csv") == sweep);
    for (const char* p : {"cli_ver_generator_residual.csv", "cli_ver2_generator_residual.csv"})
        std::remove(p);
}

TEST_CASE("cli: io failures map to exit 4") {
    CHECK(run("norms --input does_not_exist.nsbf") == 4);
    {
        std::ofstream junk("cli_junk.nsbf", std::ios::binary);
        junk << "GARBAGEGARBAGE";
    }
    CHECK(run("norms --input cli_junk.nsbf") == 4);
    std::remove("cli_junk.nsbf");
    std::remove("cli_stdout.txt");
    std::remove("cli_stderr.txt");
}
