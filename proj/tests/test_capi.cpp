#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "openbo/openbo.h"

TEST_CASE("C API round trip")
{
    obo_config* config = nullptr;
    REQUIRE(obo_config_create(&config) == OBO_OK);
    CHECK(obo_config_set(config, "g-steps", "2") == OBO_OK);
    CHECK(obo_config_set(config, "nope", "1") == OBO_ERR_CONFIG);
    CHECK(std::string(obo_last_error_kind()) == "InvalidConfig");
    CHECK(std::strlen(obo_last_error()) > 0);

    obo_table* table = nullptr;
    REQUIRE(obo_run(config, "spectrum", &table) == OBO_OK);
    CHECK(obo_table_rows(table) == 2);
    CHECK(obo_table_cols(table) == 11);
    CHECK(std::string(obo_table_column_name(table, 2)) == "g");
    CHECK(std::string(obo_table_column_unit(table, 2)) == "muB");
    CHECK(obo_table_column_name(table, 11) == nullptr);
    double value = 0.0;
    CHECK(obo_table_value(table, 1, 4, &value) == OBO_OK);
    CHECK(value == doctest::Approx(-0.5));
    CHECK(obo_table_value(table, 9, 0, &value) == OBO_ERR_ARGUMENT);
    CHECK(std::string(obo_table_header_lookup(table, "subcommand")) == "spectrum");
    CHECK(obo_table_header_lookup(table, "missing") == nullptr);
    CHECK(obo_table_header_count(table) > 3);
    CHECK(std::string(obo_table_header_key(table, 0)) == "subcommand");
    CHECK(std::string(obo_table_header_value(table, 1)) == obo_version());
    const auto path = (std::filesystem::temp_directory_path() / "openbo_capi_table.csv").string();
    CHECK(obo_table_write_csv(table, path.c_str()) == OBO_OK);
    std::string first;
    std::getline(std::ifstream(path) >> std::ws, first);
    CHECK(first.rfind("#", 0) == 0);
    std::filesystem::remove(path);
    CHECK(obo_table_write_csv(table, "/nonexistent/dir/x.csv") == OBO_ERR_CONFIG);
    obo_table_destroy(table);

    CHECK(obo_run(config, "bogus", &table) == OBO_ERR_CONFIG);
    CHECK(table == nullptr);
    obo_config_destroy(config);
    CHECK(obo_run(nullptr, "spectrum", &table) == OBO_ERR_ARGUMENT);
}

TEST_CASE("C API numeric failures")
{
    obo_config* config = nullptr;
    REQUIRE(obo_config_create(&config) == OBO_OK);
    obo_config_set(config, "g", "0");
    obo_table* table = nullptr;
    CHECK(obo_run(config, "steady", &table) == OBO_ERR_NUMERIC);
    CHECK(std::string(obo_last_error_kind()) == "NoZeroMode");
    obo_config_destroy(config);
}

TEST_CASE("C API direct helpers")
{
    double re[4], im[4];
    REQUIRE(obo_helical_spectrum(0.0, 0.0, 0.6, re, im) == OBO_OK);
    CHECK(im[0] == doctest::Approx(-0.3));
    double pz = 0.0;
    REQUIRE(obo_helical_steady_pz(1.0, std::numbers::pi / 2, &pz) == OBO_OK);
    CHECK(pz == doctest::Approx(-1.0 / 9.0).epsilon(1e-12));
    REQUIRE(obo_helical_polarization(0.0, std::numbers::pi / 2, 1.0, 0, 0, &pz) == OBO_OK);
    CHECK(pz == doctest::Approx(std::cos(2.0)).epsilon(1e-8));
    CHECK(obo_helical_polarization(0.0, std::numbers::pi / 2, -1.0, 0, 0, &pz) == OBO_ERR_NUMERIC);
    CHECK(obo_helical_polarization(0.0, std::numbers::pi / 2, 1.0, 0, 0, nullptr) == OBO_ERR_ARGUMENT);
}
