#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "openbo/commands.hpp"

using namespace openbo;
using namespace openbo::cli;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

std::string header_value(const ScanTable& table, const std::string& key)
{
    for (const auto& [k, v] : table.header())
        if (k == key)
            return v;
    return {};
}

} // namespace

TEST_CASE("unknown keys and malformed values are configuration errors")
{
    RunConfig config;
    CHECK(code_of([&] { config.set("colour", "red"); }) == ErrorCode::InvalidConfig);
    config.set("g", "abc");
    CHECK(code_of([&] { run_command("steady", config); }) == ErrorCode::InvalidConfig);
    RunConfig grid;
    grid.set("g-steps", "0");
    CHECK(code_of([&] { run_command("spectrum", grid); }) == ErrorCode::InvalidConfig);
    RunConfig both;
    both.set("g", "0.1");
    both.set("g-min", "0.0");
    CHECK(code_of([&] { run_command("spectrum", both); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([&] { run_command("plot", RunConfig{}); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("spectrum rows")
{
    RunConfig config;
    config.set("g-max", "1");
    config.set("g-steps", "3");
    const auto table = run_command("spectrum", config);
    REQUIRE(table.rows().size() == 3);
    const auto& closed = table.rows()[0];
    CHECK(closed[table.column_index("Re_E2")] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(closed[table.column_index("Re_E4")] == doctest::Approx(-2.0).epsilon(1e-12));
    const auto& row = table.rows()[2];
    CHECK(row[table.column_index("Im_E1")] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(row[table.column_index("Re_E1")] == doctest::Approx(0.0));
    CHECK(table.columns()[3].unit == "muB");
    CHECK(header_value(table, "subcommand") == "spectrum");
    CHECK(header_value(table, "g") == "0,0.5,1");
}

TEST_CASE("steady table carries a unit trace row")
{
    RunConfig config;
    config.set("g", "0.5");
    const auto table = run_command("steady", config);
    REQUIRE(table.rows().size() == 5);
    CHECK(table.columns().size() == 4);
    const auto& trace = table.rows().back();
    CHECK(trace[0] == -1.0);
    CHECK(std::abs(trace[2] - 1.0) < 1e-9);
    CHECK(std::abs(trace[3]) < 1e-9);
    RunConfig closed;
    closed.set("g", "0");
    CHECK(code_of([&] { run_command("steady", closed); }) == ErrorCode::NoZeroMode);
}

TEST_CASE("scans are deterministic across worker counts")
{
    RunConfig config;
    config.set("g-steps", "3");
    config.set("T-steps", "4");
    config.set("T-max", "0.5");
    const auto serial = run_command("pz-scan", config);
    config.set("jobs", "3");
    const auto parallel = run_command("pz-scan", config);
    CHECK(serial.to_csv() == parallel.to_csv());
    CHECK(serial.rows().size() == 12);
    CHECK(header_value(serial, "jobs").empty());
}

TEST_CASE("gamma scan normalizes its first row")
{
    RunConfig config;
    config.set("g-steps", "4");
    const auto table = run_command("gamma-scan", config);
    CHECK(table.rows()[0][table.column_index("Gamma_normalized")] == 1.0);
    CHECK(!header_value(table, "Gamma0").empty());
    CHECK(header_value(table, "alpha") == "9.9999999999999995e-07");
    RunConfig mass;
    mass.set("mass", "1000");
    mass.set("g-steps", "2");
    const auto by_mass = run_command("gamma-scan", mass);
    CHECK(by_mass.rows()[1][1] == doctest::Approx(table.rows()[3][1]).epsilon(1e-12));
    mass.set("alpha", "1e-6");
    CHECK(code_of([&] { run_command("gamma-scan", mass); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("disscom check reports interior residuals")
{
    RunConfig config;
    config.set("g-steps", "2");
    const auto table = run_command("disscom-check", config);
    CHECK(std::stod(header_value(table, "lc_interior_residual")) < 1e-10);
    CHECK(std::stod(header_value(table, "cd_interior_residual")) < 1e-10);
    CHECK(table.rows().size() == 2);
}

TEST_CASE("config files fill in keys not given on the command line")
{
    const std::string path = "openbo_test.conf";
    {
        std::ofstream out(path);
        out << "# comment\n g = 0.7 \nphi = 0.2 # trailing\n";
    }
    RunConfig config;
    config.set("g", "0.5");
    config.load_file(path);
    CHECK(config.text("g", "") == "0.5");
    CHECK(config.number("phi", 0.0) == 0.2);
    {
        std::ofstream out(path);
        out << "nonsense line\n";
    }
    CHECK(code_of([&] { config.load_file(path); }) == ErrorCode::InvalidConfig);
    std::remove(path.c_str());
    CHECK(code_of([&] { config.load_file(path); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("csv format")
{
    ScanTable table({{"a", "1"}, {"b", "s"}});
    table.add_header("k", "v");
    table.add_row({0.1, -0.0});
    CHECK(table.to_csv() == "# k=v\na[1],b[s]\n0.10000000000000001,0\n");
    CHECK_THROWS_AS(table.add_row({1.0}), Error);
}
