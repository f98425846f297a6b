// End-to-end checks of the CLI: exit codes, report content, resumable
// sweeps and byte-identical deterministic reruns.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kScratch = fs::path("cli_scratch");

int run(const std::string& args) {
    std::string cmd = std::string(SPINSPLIT_BIN) + " " + args + " >> " +
                      (kScratch / "log.txt").string() + " 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

fs::path write_config(const std::string& name, const json& j) {
    fs::path p = kScratch / name;
    std::ofstream out(p);
    out << j.dump(2);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json toric_build_config() {
    return {{"model", {{"name", "toric"}, {"L", 2}, {"perturbation_seed_sites", {0}}}},
            {"output", {{"dir", (kScratch / "toric_build").string()}}}};
}

json ring_sweep_config(const std::string& outdir) {
    return {{"model", {{"name", "ising"}, {"nu", 1}, {"extents", {6}}}},
            {"sweep", {{"sizes", {4, 6, 8}}, {"epsilons", {0.0, 0.2}}, {"m", 2}}},
            {"output", {{"dir", (kScratch / outdir).string()}}}};
}

}  // namespace

TEST_CASE("cli scratch setup") {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
    CHECK(fs::exists(kScratch));
}

TEST_CASE("build: toric L=2 verifies and reports m=4") {
    fs::path cfg = write_config("toric.json", toric_build_config());
    CHECK(run("--config " + cfg.string() + " build") == 0);
    json rep = json::parse(slurp(kScratch / "toric_build" / "build_report.json"));
    CHECK(rep["classical"] == true);
    CHECK(rep["ground_degeneracy"] == 4);
    CHECK(rep["spectral_gap"].get<double>() == doctest::Approx(4.0));
    CHECK(rep["symmetry"]["transitive_on_ground_basis"] == true);
    CHECK(fs::exists(kScratch / "toric_build" / "resolved_config.json"));
}

TEST_CASE("exit 2: unknown config key") {
    json bad = toric_build_config();
    bad["model"]["perturbbation"] = "X";  // typo
    fs::path cfg = write_config("typo.json", bad);
    CHECK(run("--config " + cfg.string() + " build") == 2);
    CHECK(run("build") == 2);  // missing --config entirely
}

TEST_CASE("exit 3: anticommuting custom terms") {
    json cfg_json = {{"model",
                      {{"name", "custom"},
                       {"nu", 1},
                       {"extents", {2}},
                       {"terms", {"1.0 * X0", "1.0 * Z0"}}}},
                     {"output", {{"dir", (kScratch / "bad_model").string()}}}};
    fs::path cfg = write_config("anticommuting.json", cfg_json);
    CHECK(run("--config " + cfg.string() + " build") == 3);
}

TEST_CASE("exit 4: fit on a floored table") {
    fs::path table = kScratch / "floored.csv";
    {
        std::ofstream out(table);
        out << "model,nu,extents,n_spins,epsilon,m,splitting_spectral,splitting_diagonal,"
               "splitting_first_order,gap_to_next,method,floor_flag\n";
        out << "ising,1,6,6,0.1,2,1e-09,0,0,4,dense,1\n";
        out << "ising,1,8,8,0.1,2,1e-10,0,0,4,dense,1\n";
        out << "ising,1,10,10,0.1,2,1e-11,0,0,4,dense,1\n";
    }
    CHECK(run("fit --table " + table.string() + " --epsilon 0.1") == 4);
}

TEST_CASE("exit 5: more eigenpairs than the space holds") {
    json cfg_json = {{"model", {{"name", "ising"}, {"nu", 1}, {"extents", {3}}}},
                     {"solver", {{"k", 100}}},
                     {"output", {{"dir", (kScratch / "overflow").string()}}}};
    fs::path cfg = write_config("overflow.json", cfg_json);
    CHECK(run("--config " + cfg.string() + " spectrum") == 5);
}

TEST_CASE("sweep writes one row per cell and resumes idempotently") {
    fs::path cfg = write_config("sweep.json", ring_sweep_config("sweep_out"));
    CHECK(run("--config " + cfg.string() + " sweep") == 0);
    fs::path csv = kScratch / "sweep_out" / "splitting.csv";
    std::string first = slurp(csv);
    CHECK(std::count(first.begin(), first.end(), '\n') == 7);  // header + 6 cells

    // drop the last row; the rerun recomputes only the missing cell
    {
        std::string trimmed = first.substr(0, first.find_last_of('\n', first.size() - 2) + 1);
        std::ofstream out(csv, std::ios::trunc | std::ios::binary);
        out << trimmed;
    }
    CHECK(run("--config " + cfg.string() + " sweep") == 0);
    CHECK(slurp(csv) == first);

    // fully complete table: rerun changes nothing
    CHECK(run("--config " + cfg.string() + " sweep") == 0);
    CHECK(slurp(csv) == first);
}

TEST_CASE("spectrum command exports the solver record") {
    json cfg_json = {{"model",
                      {{"name", "ising"}, {"nu", 1}, {"extents", {6}}, {"epsilon", 0.2}}},
                     {"solver", {{"k", 4}}},
                     {"output", {{"dir", (kScratch / "spectrum_out").string()}}}};
    fs::path cfg = write_config("spectrum.json", cfg_json);
    CHECK(run("--config " + cfg.string() + " spectrum") == 0);
    json rec = json::parse(slurp(kScratch / "spectrum_out" / "spectrum.json"));
    CHECK(rec["model"] == "ising");
    CHECK(rec["n_spins"] == 6);
    CHECK(rec["epsilon"].get<double>() == doctest::Approx(0.2));
    CHECK(rec["k"] == 4);
    CHECK(rec["eigenvalues"].size() == 4);
    for (size_t i = 1; i < 4; ++i)
        CHECK(rec["eigenvalues"][i].get<double>() >= rec["eigenvalues"][i - 1].get<double>());
}

TEST_CASE("resolved-config echo reruns to identical results") {
    fs::path cfg = write_config("echo_src.json", ring_sweep_config("echo_run1"));
    CHECK(run("--config " + cfg.string() + " sweep") == 0);
    fs::path echo = kScratch / "echo_run1" / "resolved_config.json";
    CHECK(run("--config " + echo.string() + " --out " + (kScratch / "echo_run2").string() +
              " sweep") == 0);
    CHECK(slurp(kScratch / "echo_run1" / "splitting.csv") ==
          slurp(kScratch / "echo_run2" / "splitting.csv"));
}

TEST_CASE("exit 2: empty epsilon grid") {
    json cfg_json = ring_sweep_config("sweep_empty");
    cfg_json["sweep"]["epsilons"] = json::array();
    fs::path cfg = write_config("sweep_empty.json", cfg_json);
    CHECK(run("--config " + cfg.string() + " sweep") == 2);
}

TEST_CASE("fit on a synthetic table prints the generating law and N0") {
    fs::path table = kScratch / "synthetic.csv";
    {
        std::ofstream out(table);
        out.precision(17);
        out << "model,nu,extents,n_spins,epsilon,m,splitting_spectral,splitting_diagonal,"
               "splitting_first_order,gap_to_next,method,floor_flag\n";
        for (int n : {4, 6, 8, 10}) {
            out << "synthetic,1," << n << ',' << n << ",0.1,2," << std::exp(-2.0 * n)
                << ",0,0,4,dense,0\n";
        }
    }
    CHECK(run("fit --table " + table.string() + " --epsilon 0.1 --delta 1e-6 --out " +
              (kScratch / "fit_out").string()) == 0);
    json rep = json::parse(slurp(kScratch / "fit_out" / "fit_report.json"));
    CHECK(rep["selected"] == "exp_volume");
    CHECK(rep["models"]["exp_volume"]["c"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep["n0"].get<double>() == doctest::Approx(std::ceil(-std::log(1e-6) / 2.0)));
}

TEST_CASE("trotter command writes a convergence table with halving errors") {
    json cfg_json = {{"model",
                      {{"name", "ising"},
                       {"nu", 1},
                       {"extents", {4}},
                       {"epsilon", 0.3},
                       {"perturbation_axis", "X"}}},
                     {"trotter", {{"beta", 1.0}, {"steps", {64, 128}}}},
                     {"output", {{"dir", (kScratch / "trotter_out").string()}}}};
    fs::path cfg = write_config("trotter.json", cfg_json);
    CHECK(run("--config " + cfg.string() + " trotter") == 0);
    std::ifstream csv(kScratch / "trotter_out" / "trotter.csv");
    std::string header, row64, row128;
    std::getline(csv, header);
    std::getline(csv, row64);
    std::getline(csv, row128);
    auto err_of = [](const std::string& line) {
        std::stringstream ss(line);
        std::string field;
        for (int i = 0; i < 7; ++i) std::getline(ss, field, ',');
        return std::stod(field);
    };
    double ratio = err_of(row64) / err_of(row128);
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.5);
}

TEST_CASE("order command reports positive zeta for the transverse-field ring") {
    json cfg_json = {{"model",
                      {{"name", "ising"}, {"nu", 1}, {"extents", {8}}, {"epsilon", 0.2}}},
                     {"order", {{"observable_axis", "Z"}, {"states", 2}}},
                     {"output", {{"dir", (kScratch / "order_out").string()}}}};
    fs::path cfg = write_config("order.json", cfg_json);
    CHECK(run("--config " + cfg.string() + " order") == 0);
    json rep = json::parse(slurp(kScratch / "order_out" / "order_report.json"));
    CHECK(rep["locality_ok"] == true);
    CHECK(rep["mutual_commute_ok"] == true);
    CHECK(rep["zeta"].get<double>() > 0.1);
    for (const auto& m : rep["mean_values"]) CHECK(std::abs(m.get<double>()) < 1e-8);
}

TEST_CASE("peierls command reproduces rho = 2 on the 4x4 torus") {
    json cfg_json = {{"model", {{"name", "ising"}, {"nu", 2}, {"extents", {4, 4}}}},
                     {"peierls", {{"max_region", 4}, {"ground_config", 0}}},
                     {"output", {{"dir", (kScratch / "peierls_out").string()}}}};
    fs::path cfg = write_config("peierls.json", cfg_json);
    CHECK(run("--config " + cfg.string() + " peierls") == 0);
    json rep = json::parse(slurp(kScratch / "peierls_out" / "peierls_report.json"));
    CHECK(rep["rho"].get<double>() == 2.0);
}

TEST_CASE("deterministic reruns are byte-identical across thread counts") {
    fs::path cfg = write_config("det.json", ring_sweep_config("det_run"));
    fs::path dir = kScratch / "det_run";

    CHECK(run("--config " + cfg.string() + " --deterministic sweep") == 0);
    std::string csv1 = slurp(dir / "splitting.csv");
    std::string echo1 = slurp(dir / "resolved_config.json");

    fs::remove_all(dir);
    CHECK(run("--config " + cfg.string() + " --threads 4 sweep") == 0);
    CHECK(slurp(dir / "splitting.csv") == csv1);
    CHECK(slurp(dir / "resolved_config.json") == echo1);
}
