// End-to-end checks of the command-line front end. The binary path arrives as
// argv[1]; runs execute in a scratch directory.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string g_binary;
fs::path g_work;

int run(const std::string& args) {
    const std::string cmd = g_binary + " " + args + " >" + (g_work / "stdout.txt").string() +
                            " 2>" + (g_work / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kExample = R"([model]
d = 2
eps_r = 0.01
eps_b = 0.01
D_r = 1
D_b = 1
N_r = 200
N_b = 200
v_r = 2
v_b = 1

[grid]
n_cells = 200
)";

}  // namespace

TEST_CASE("equilibrium run produces a complete, reproducible bundle") {
    const fs::path cfg = g_work / "ex.cfg";
    write(cfg, kExample);

    const fs::path out1 = g_work / "eq1";
    const fs::path out2 = g_work / "eq2";
    REQUIRE(run("equilibrium --config " + cfg.string() + " --out " + out1.string()) == 0);
    REQUIRE(run("equilibrium --config " + cfg.string() + " --out " + out2.string()) == 0);

    // Manifest lists every file in the directory.
    const auto manifest = nlohmann::json::parse(slurp(out1 / "manifest.json"));
    std::vector<std::string> listed;
    for (const auto& f : manifest["outputs"]) listed.push_back(f["file"]);
    for (const auto& entry : fs::directory_iterator(out1)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue;
        CHECK(std::find(listed.begin(), listed.end(), name) != listed.end());
    }
    CHECK(manifest["stats"]["mass_r"].get<double>() == doctest::Approx(200.0).epsilon(1e-8));
    CHECK(manifest["stats"]["newton_iterations"].get<double>() <= 25);

    // Bit-identical outputs across repeated runs.
    CHECK(slurp(out1 / "equilibrium.csv") == slurp(out2 / "equilibrium.csv"));

    // Header contract of the profile export.
    std::ifstream csv(out1 / "equilibrium.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "x,r,b,rho,phi");
}

TEST_CASE("configuration errors exit with code 2 and write nothing") {
    const fs::path cfg = g_work / "bad.cfg";
    write(cfg, "[model]\nepsilon_r = 0.01\n");
    const fs::path out = g_work / "bad_out";
    CHECK(run("equilibrium --config " + cfg.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));

    const fs::path missing = g_work / "nonexistent.cfg";
    CHECK(run("equilibrium --config " + missing.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("evolve writes trajectory, final state and snapshots") {
    const fs::path cfg = g_work / "ev.cfg";
    write(cfg, std::string(kExample) +
                   "\n[evolve]\nt_end = 0.05\nsnapshot_stride = 50\n");
    const fs::path out = g_work / "ev_out";
    REQUIRE(run("evolve --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "trajectory.csv"));
    CHECK(fs::exists(out / "final_state.csv"));
    CHECK(fs::exists(out / "snapshot_0000.csv"));
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["notes"]["stepper"] == "mol");
    CHECK(manifest["stats"]["mass_r_final"].get<double>() ==
          doctest::Approx(200.0).epsilon(1e-8));
}

TEST_CASE("the regularized stepper is selectable from the command line") {
    const fs::path cfg = g_work / "reg.cfg";
    write(cfg, std::string(kExample) + "\n[evolve]\ntau = 1e-2\nsteps = 3\n");
    const fs::path out = g_work / "reg_out";
    REQUIRE(run("evolve --stepper regularized --config " + cfg.string() + " --out " +
                out.string()) == 0);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["notes"]["stepper"] == "regularized");
}

TEST_CASE("single-value sweep degenerates to the two-route comparison") {
    const fs::path cfg = g_work / "sw.cfg";
    write(cfg, std::string(kExample) + "\n[sweep]\naxis = theta_r\nvalues = 0\n");
    const fs::path out = g_work / "sw_out";
    REQUIRE(run("sweep --config " + cfg.string() + " --out " + out.string()) == 0);
    std::ifstream csv(out / "sweep.csv");
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header.rfind("theta_r,abs_err_r", 0) == 0);
    // Symmetric point sits at the discretization floor.
    const double rel = std::stod(row.substr(row.find(',', row.find(',', row.find(',') + 1) + 1) + 1));
    CHECK(rel <= 1e-4);
    CHECK(fs::exists(out / "plot_sweep.py"));
}

TEST_CASE("stability command reports a verdict and a spectrum") {
    const fs::path cfg = g_work / "st.cfg";
    write(cfg, std::string(kExample) + "\n[stability]\nk = 6\n");
    const fs::path out = g_work / "st_out";
    REQUIRE(run("stability --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string console = slurp(g_work / "stdout.txt");
    CHECK(console.find("stable") != std::string::npos);
    std::ifstream csv(out / "spectrum.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "index,eigenvalue");
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <crossdiff binary>\n", argv[0]);
        return 1;
    }
    doctest::Context ctx;
    ctx.applyCommandLine(1, argv);
    g_binary = argv[1];
    g_work = fs::temp_directory_path() / "crossdiff_cli_test";
    fs::remove_all(g_work);
    fs::create_directories(g_work);
    const int rc = ctx.run();
    fs::remove_all(g_work);
    return rc;
}
