#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "vpfocus/harness.hpp"

using namespace vpfocus;

namespace {

ExperimentSpec small_spec(SystemKind kind)
{
    ExperimentSpec s;
    s.kind = kind;
    s.grid = {16, 16, 4};
    return s;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing")
{
    std::istringstream in("# focusing run\nkind = rvp\nC1 = 2\nC2=20\na = 1.5\nb = 2.5  # outer\nc = 4\n"
                          "n_r = 32\nn_w = 48\nn_l = 8\nsafety_factor = 1.5\ndt_frac = 0.0005\n");
    const ExperimentSpec s = parse_config(in);
    CHECK(s.kind == SystemKind::RVP);
    CHECK(s.targets.C1 == 2.0);
    CHECK(s.targets.C2 == 20.0);
    CHECK(s.targets.a == 1.5);
    CHECK(s.targets.b == 2.5);
    CHECK(s.targets.c == 4.0);
    CHECK(s.grid.n_r == 32);
    CHECK(s.grid.n_w == 48);
    CHECK(s.grid.n_l == 8);
    CHECK(s.safety_factor == 1.5);
    CHECK(s.resolved_dt_fraction() == 0.0005);
}

TEST_CASE("config rejects bad input")
{
    std::istringstream swapped("a = 2\nb = 1\n");
    CHECK_THROWS_AS(parse_config(swapped), DomainError);
    std::istringstream unknown("gamma = 1\n");
    CHECK_THROWS_AS(parse_config(unknown), DomainError);
    std::istringstream junk("C1 = 1x\n");
    CHECK_THROWS_AS(parse_config(junk), DomainError);
    std::istringstream no_eq("C1 1\n");
    CHECK_THROWS_AS(parse_config(no_eq), DomainError);
    std::istringstream big_dt("dt_frac = 0.5\n");
    CHECK_THROWS_AS(parse_config(big_dt), DomainError);
    std::istringstream grid("n_r = 2.5\n");
    CHECK_THROWS_AS(parse_config(grid), DomainError);
}

TEST_CASE("grid strings")
{
    const SamplingGrid g = parse_grid("64x32x16");
    CHECK(g.n_r == 64);
    CHECK(g.n_w == 32);
    CHECK(g.n_l == 16);
    CHECK_THROWS_AS(parse_grid("64x32"), DomainError);
    CHECK_THROWS_AS(parse_grid("axbxc"), DomainError);
}

TEST_CASE("default time step depends on the system")
{
    CHECK(ExperimentSpec{}.resolved_dt_fraction() == 1.0 / 4096.0);
    ExperimentSpec r;
    r.kind = SystemKind::RVP;
    CHECK(r.resolved_dt_fraction() == 1.0 / 16384.0);
}

TEST_CASE("small classical experiment passes and writes artifacts")
{
    const auto dir = std::filesystem::temp_directory_path() / "vpfocus_harness_test";
    std::filesystem::remove_all(dir);
    ExperimentSpec s = small_spec(SystemKind::VP);
    s.output_dir = dir;
    const Report r = run_experiment(s);
    CHECK(r.status == RunStatus::Ok);
    REQUIRE(r.checks.size() == 6);
    for (const auto& c : r.checks) {
        INFO(c.name);
        CHECK(c.pass);
    }
    CHECK(r.pass());
    CHECK(r.exit_code() == 0);
    for (const auto& c : r.cross_checks) {
        INFO(c.name);
        CHECK(c.pass);
    }
    for (const char* name : {"params.json", "initial.csv", "snapshots.csv", "profiles_t0.csv", "profiles_T.csv",
                             "field_t0.csv", "field_T.csv", "report.json"})
        CHECK(std::filesystem::exists(dir / name));
    CHECK(read_text_file(dir / "initial.csv").rfind("t,shell_id,r,w,l,mu,m_enclosed\n", 0) == 0);
    CHECK(read_text_file(dir / "profiles_T.csv").rfind("r_mid,rho\n", 0) == 0);

    const Json j = Json::parse(read_text_file(dir / "report.json"));
    CHECK(j["pass"].get<bool>());
    CHECK(exit_code_of(j) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("reports are deterministic and round-trip")
{
    const Report a = run_experiment(small_spec(SystemKind::VP));
    const Report b = run_experiment(small_spec(SystemKind::VP));
    Json ja = report_to_json(a);
    Json jb = report_to_json(b);
    ja.erase("timing");
    jb.erase("timing");
    CHECK(ja.dump(2) == jb.dump(2));

    const std::string text = emit(a, Format::Json);
    CHECK(emit(Json::parse(text), Format::Json) == text);
    const std::string table = emit(a, Format::Text);
    CHECK(table.find("final_radius_in_ab") != std::string::npos);
    CHECK(table.find("overall: PASS") != std::string::npos);
}

TEST_CASE("a failing check sets exit code 1 and is named")
{
    Report r = run_experiment(small_spec(SystemKind::VP));
    r.checks[4].pass = false;
    r.checks[4].margin = -1.0;
    CHECK_FALSE(r.pass());
    CHECK(r.exit_code() == 1);
    const Json j = report_to_json(r);
    CHECK_FALSE(j["pass"].get<bool>());
    CHECK(exit_code_of(j) == 1);
    CHECK(j["checks"][4]["name"] == "rhoT_sup_ge_C2");
    CHECK(j["checks"][4]["margin"] == -1.0);
    CHECK(emit(j, Format::Text).find("FAIL") != std::string::npos);
}

TEST_CASE("infeasible targets give a failed partial report")
{
    ExperimentSpec s = small_spec(SystemKind::VP);
    s.targets = {1.0, 10.0, 1.0, 100.0, 200.0};
    const Report r = run_experiment(s);
    CHECK(r.status == RunStatus::Infeasible);
    CHECK(r.exit_code() == 2);
    CHECK_FALSE(r.pass());
    CHECK(r.error.find("vp_time_fixed_point") != std::string::npos);
    const Json j = report_to_json(r);
    CHECK(j["parameters"].is_null());
    CHECK(j["status"] == "infeasible");
}

TEST_CASE("invalid specs are rejected before running")
{
    ExperimentSpec s = small_spec(SystemKind::VP);
    s.targets.a = 2.0;
    s.targets.b = 1.0;
    CHECK_THROWS_AS(run_experiment(s), DomainError);
}

}
