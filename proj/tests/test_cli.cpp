#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;
fs::path g_root;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
    const fs::path dir = g_root / tag;
    fs::create_directories(dir);
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = g_cli + " " + args + " > " + out.string() + " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path write_text(const std::string& tag, const std::string& name, const std::string& body) {
    const fs::path dir = g_root / tag;
    fs::create_directories(dir);
    const fs::path p = dir / name;
    std::ofstream f(p, std::ios::binary);
    f << body;
    return p;
}

// Four months of contiguous 15-minute load with daily peaks above 35 MVA,
// growing month over month.
std::string synthetic_load_csv() {
    std::string csv = "# units: MVA\ntimestamp,power\n";
    char buf[96];
    const int days_in_month[4] = {31, 28, 31, 30};
    int month = 1, day = 1;
    for (int d = 0; d < 120; ++d) {
        for (int q = 0; q < 96; ++q) {
            const double phase = 3.14159265358979323846 * (q - 48) / 48.0;
            const double power =
                28.0 + (1.0 + 0.05 * month) * 9.0 * std::max(0.0, std::cos(phase));
            const int minutes = q * 15;
            std::snprintf(buf, sizeof(buf), "2015-%02d-%02dT%02d:%02d:00,%.4f\n", month, day,
                          minutes / 60, minutes % 60, power);
            csv += buf;
        }
        if (++day > days_in_month[month - 1]) {
            day = 1;
            ++month;
        }
    }
    return csv;
}

std::string monthly_price_csv(int n, bool constant, bool explosive) {
    std::string csv = "timestamp,price\n";
    char buf[80];
    int year = 2008, month = 1;
    double geometric = 2.0;
    for (int k = 0; k < n; ++k) {
        double price = 2.6;
        if (constant) {
            price = 2.6;
        } else if (explosive) {
            price = geometric;
            geometric *= 1.01;
        } else {
            price = 2.6 + 0.3 * std::sin(k / 3.0);
        }
        std::snprintf(buf, sizeof(buf), "%04d-%02d-01T00:00:00,%.6f\n", year, month, price);
        csv += buf;
        if (++month > 12) {
            month = 1;
            ++year;
        }
    }
    return csv;
}

} // namespace

TEST_CASE("value: writes report, table row, stopping times, and manifest") {
    const RunResult r = run_cli("value --paths 2000 --out " + (g_root / "value_out").string(),
                                "value");
    REQUIRE(r.code == 0);
    const json rep = json::parse(slurp(g_root / "value_out" / "report.json"));
    CHECK(rep["recommendation"] == "defer");
    CHECK(rep["standard_npv"].get<double>() < 0.0);
    CHECK(rep["option_value"].get<double>() > 0.0);
    CHECK(rep["flexible_npv"].get<double>() ==
          rep["standard_npv"].get<double>() + rep["option_value"].get<double>());

    const json manifest = json::parse(slurp(g_root / "value_out" / "manifest.json"));
    CHECK(manifest["command"] == "value");
    CHECK(manifest["outputs"].size() == 3);
    for (const auto& path : manifest["outputs"]) {
        CHECK(fs::exists(path.get<std::string>()));
    }
    CHECK(slurp(g_root / "value_out" / "stopping_times.csv")
              .rfind("path,tau_invest,tau_expand\n", 0) == 0);

    CHECK(r.out.find("\"recommendation\"") != std::string::npos);
}

TEST_CASE("value: --standalone emits the paired comparison") {
    const RunResult r = run_cli("value --paths 2000 --standalone --out " +
                                    (g_root / "value_sa").string(),
                                "value_sa");
    REQUIRE(r.code == 0);
    const json cmp = json::parse(slurp(g_root / "value_sa" / "standalone_vs_compound.json"));
    CHECK(cmp["compound"]["option_value"].get<double>() >
          cmp["standalone_deferral_value"].get<double>());
    CHECK(cmp["compound_minus_standalone"].get<double>() > 0.0);
}

TEST_CASE("value: byte-identical outputs for a fixed seed") {
    const std::string out1 = (g_root / "det1").string();
    const std::string out2 = (g_root / "det2").string();
    REQUIRE(run_cli("value --paths 1500 --seed 7 --out " + out1, "det1").code == 0);
    REQUIRE(run_cli("value --paths 1500 --seed 7 --out " + out2, "det2").code == 0);
    CHECK(slurp(fs::path(out1) / "report.json") == slurp(fs::path(out2) / "report.json"));
    CHECK(slurp(fs::path(out1) / "stopping_times.csv") ==
          slurp(fs::path(out2) / "stopping_times.csv"));

    const std::string out3 = (g_root / "det3").string();
    REQUIRE(run_cli("value --paths 1500 --seed 8 --out " + out3, "det3").code == 0);
    CHECK(slurp(fs::path(out1) / "report.json") != slurp(fs::path(out3) / "report.json"));
}

TEST_CASE("value: csv format prints the table row") {
    const RunResult r = run_cli("value --paths 500 --format csv --out " +
                                    (g_root / "value_csv").string(),
                                "value_csv");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("scenario,description,year1_pct", 0) == 0);
    CHECK(r.out.find("S1,\"Benchmark\"") != std::string::npos);
}

TEST_CASE("simulate: reproducible path CSVs with the documented header") {
    const std::string outa = (g_root / "sima").string();
    const std::string outb = (g_root / "simb").string();
    REQUIRE(run_cli("simulate --paths 300 --out " + outa, "sima").code == 0);
    REQUIRE(run_cli("simulate --paths 300 --out " + outb, "simb").code == 0);
    for (const char* name : {"demand_paths.csv", "fuel_paths.csv", "pv_cost_paths.csv"}) {
        const std::string a = slurp(fs::path(outa) / name);
        CHECK(a == slurp(fs::path(outb) / name));
        CHECK(a.rfind("path,t0,t1,", 0) == 0);
    }
}

TEST_CASE("simulate: invalid configuration exits 2 listing violations") {
    const fs::path cfg = write_text("bad_cfg", "cfg.json", R"({"run": {"n_paths": 0}})");
    const RunResult r = run_cli("simulate --config " + cfg.string() + " --out " +
                                    (g_root / "bad_cfg_out").string(),
                                "bad_cfg");
    CHECK(r.code == 2);
    CHECK(r.err.find("n_paths") != std::string::npos);
}

TEST_CASE("value: config file overrides defaults and cli flags override config") {
    const fs::path cfg = write_text("cfgfile", "cfg.json",
                                    R"({"run": {"n_paths": 800, "seed": 5}})");
    const RunResult r = run_cli("value --config " + cfg.string() + " --seed 11 --out " +
                                    (g_root / "cfgfile_out").string(),
                                "cfgfile");
    REQUIRE(r.code == 0);
    const json rep = json::parse(slurp(g_root / "cfgfile_out" / "report.json"));
    CHECK(rep["n_paths"] == 800);
    CHECK(rep["seed"] == 11);
}

TEST_CASE("calibrate: happy path writes both calibration files") {
    const fs::path load = write_text("cal", "load.csv", synthetic_load_csv());
    const fs::path prices = write_text("cal", "prices.csv", monthly_price_csv(96, false, false));
    const std::string out = (g_root / "cal_out").string();
    const RunResult r = run_cli("calibrate --load " + load.string() + " --thermal-limit '35 MVA'" +
                                    " --prices " + prices.string() + " --out " + out,
                                "cal");
    REQUIRE(r.code == 0);
    const json demand = json::parse(slurp(fs::path(out) / "demand_gbm.json"));
    CHECK(demand["model"] == "gbm");
    CHECK(demand["n_obs"].get<int>() == 3);
    CHECK(demand["sigma"].get<double>() >= 0.0);
    const json fuel = json::parse(slurp(fs::path(out) / "fuel_mean_reverting.json"));
    CHECK(fuel["model"] == "mean_reverting");
    CHECK(fuel["beta_unidentifiable"] == false);
    CHECK(fuel["s_bar"].get<double>() > 0.0);
}

TEST_CASE("calibrate: constant price series exits 0 with beta flagged unidentifiable") {
    const fs::path load = write_text("cal_const", "load.csv", synthetic_load_csv());
    const fs::path prices =
        write_text("cal_const", "prices.csv", monthly_price_csv(60, true, false));
    const std::string out = (g_root / "cal_const_out").string();
    const RunResult r = run_cli("calibrate --load " + load.string() + " --thermal-limit '35 MVA'" +
                                    " --prices " + prices.string() + " --out " + out,
                                "cal_const");
    REQUIRE(r.code == 0);
    CHECK(r.err.find("unidentifiable") != std::string::npos);
    const json fuel = json::parse(slurp(fs::path(out) / "fuel_mean_reverting.json"));
    CHECK(fuel["beta_unidentifiable"] == true);
    CHECK(fuel["beta"].is_null());
    CHECK(fuel["sigma"].get<double>() == 0.0);
}

TEST_CASE("calibrate: unit mismatch between the limit and the load file exits 2") {
    const fs::path load = write_text("cal_unit", "load.csv", synthetic_load_csv());
    const fs::path prices =
        write_text("cal_unit", "prices.csv", monthly_price_csv(60, false, false));
    const RunResult r = run_cli("calibrate --load " + load.string() +
                                    " --thermal-limit '35000 kW' --prices " + prices.string() +
                                    " --out " + (g_root / "cal_unit_out").string(),
                                "cal_unit");
    CHECK(r.code == 2);
    CHECK(r.err.find("unit") != std::string::npos);
}

TEST_CASE("calibrate: malformed load csv exits 2 with the line number") {
    const fs::path load = write_text("cal_bad", "load.csv",
                                     "# units: MVA\ntimestamp,power\n2015-01-01T00:00:00,30\n"
                                     "2015-01-01T00:15:00,garbage\n");
    const fs::path prices =
        write_text("cal_bad", "prices.csv", monthly_price_csv(60, false, false));
    const RunResult r = run_cli("calibrate --load " + load.string() +
                                    " --thermal-limit '35 MVA' --prices " + prices.string() +
                                    " --out " + (g_root / "cal_bad_out").string(),
                                "cal_bad");
    CHECK(r.code == 2);
    CHECK(r.err.find("line 4") != std::string::npos);
}

TEST_CASE("calibrate: a non-reverting price series exits 3") {
    const fs::path load = write_text("cal_rw", "load.csv", synthetic_load_csv());
    const fs::path prices =
        write_text("cal_rw", "prices.csv", monthly_price_csv(120, false, true));
    const RunResult r = run_cli("calibrate --load " + load.string() +
                                    " --thermal-limit '35 MVA' --prices " + prices.string() +
                                    " --out " + (g_root / "cal_rw_out").string(),
                                "cal_rw");
    CHECK(r.code == 3);
    CHECK(r.err.find("mean-revert") != std::string::npos);
}

TEST_CASE("sensitivity: table-2 shaped summary csv plus per-scenario reports") {
    const fs::path sweeps = write_text(
        "sens", "sweeps.json",
        R"({"sweeps": [{"param": "mu_d", "values": [0.03]}, {"param": "sigma_d", "values": [0.20]}]})");
    const std::string out = (g_root / "sens_out").string();
    const RunResult r = run_cli("sensitivity --paths 1000 --sweeps " + sweeps.string() +
                                    " --out " + out + " --format csv",
                                "sens");
    REQUIRE(r.code == 0);
    const std::string table = slurp(fs::path(out) / "table2.csv");
    CHECK(table.rfind("scenario,description,year1_pct", 0) == 0);
    CHECK(table.find("\nS2,") != std::string::npos);
    CHECK(table.find("\nS3,") != std::string::npos);
    CHECK(fs::exists(fs::path(out) / "S1.json"));
    CHECK(fs::exists(fs::path(out) / "S3.json"));
    CHECK(slurp(fs::path(out) / "fig5_series.csv").rfind("scenario,param,value,", 0) == 0);
}

TEST_CASE("sensitivity: empty sweep list produces only the base report") {
    const fs::path sweeps = write_text("sens_empty", "sweeps.json", R"({"sweeps": []})");
    const std::string out = (g_root / "sens_empty_out").string();
    const RunResult r = run_cli("sensitivity --paths 500 --sweeps " + sweeps.string() +
                                    " --out " + out,
                                "sens_empty");
    REQUIRE(r.code == 0);
    CHECK(fs::exists(fs::path(out) / "S1.json"));
    CHECK_FALSE(fs::exists(fs::path(out) / "S2.json"));
}

TEST_CASE("sensitivity: unknown parameter exits 2 naming it") {
    const fs::path sweeps = write_text("sens_bad", "sweeps.json",
                                       R"({"sweeps": [{"param": "mu_x", "values": [0.1]}]})");
    const RunResult r = run_cli("sensitivity --paths 500 --sweeps " + sweeps.string() +
                                    " --out " + (g_root / "sens_bad_out").string(),
                                "sens_bad");
    CHECK(r.code == 2);
    CHECK(r.err.find("mu_x") != std::string::npos);
}

TEST_CASE("unknown cli usage exits 2") {
    CHECK(run_cli("valuate", "usage").code == 2);
    CHECK(run_cli("value --paths 0 --out " + (g_root / "usage0").string(), "usage0").code == 2);
}

int main(int argc, char** argv) {
    doctest::Context ctx;
    if (argc > 1 && argv[1][0] != '-') {
        g_cli = argv[1];
        ctx.applyCommandLine(argc - 1, argv + 1);
    } else {
        if (const char* env = std::getenv("ROV_CLI")) g_cli = env;
        ctx.applyCommandLine(argc, argv);
    }
    if (g_cli.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-rov-binary>\n");
        return 1;
    }
    g_root = fs::temp_directory_path() / "rov_cli_tests";
    std::error_code ec;
    fs::remove_all(g_root, ec);
    fs::create_directories(g_root);
    return ctx.run();
}
