#include "openbo/openbo.h"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "openbo/commands.hpp"
#include "openbo/helical.hpp"

struct obo_config {
    openbo::cli::RunConfig config;
};

struct obo_table {
    openbo::ScanTable table;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_kind;

obo_status fail(obo_status status, const char* kind, const std::string& message)
{
    last_kind = kind;
    last_error = message;
    return status;
}

template <typename F>
obo_status guarded(F&& body)
{
    try {
        body();
        last_error.clear();
        last_kind.clear();
        return OBO_OK;
    } catch (const openbo::Error& e) {
        const auto status = openbo::is_config_error(e.code()) ? OBO_ERR_CONFIG : OBO_ERR_NUMERIC;
        return fail(status, openbo::to_string(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(OBO_ERR_INTERNAL, "OutOfMemory", "allocation failed");
    } catch (const std::exception& e) {
        return fail(OBO_ERR_INTERNAL, "Internal", e.what());
    }
}

obo_status null_argument(const char* what) { return fail(OBO_ERR_ARGUMENT, "InvalidArgument", what); }

} // namespace

extern "C" {

const char* obo_version(void) { return OPENBO_VERSION; }
const char* obo_last_error(void) { return last_error.c_str(); }
const char* obo_last_error_kind(void) { return last_kind.c_str(); }

obo_status obo_config_create(obo_config** out)
{
    if (!out)
        return null_argument("out is null");
    return guarded([&] { *out = new obo_config{}; });
}

void obo_config_destroy(obo_config* config) { delete config; }

obo_status obo_config_set(obo_config* config, const char* key, const char* value)
{
    if (!config || !key || !value)
        return null_argument("null config, key or value");
    return guarded([&] { config->config.set(key, value); });
}

obo_status obo_config_load_file(obo_config* config, const char* path)
{
    if (!config || !path)
        return null_argument("null config or path");
    return guarded([&] { config->config.load_file(path); });
}

obo_status obo_run(const obo_config* config, const char* subcommand, obo_table** out)
{
    if (!config || !subcommand || !out)
        return null_argument("null config, subcommand or out");
    *out = nullptr;
    return guarded([&] { *out = new obo_table{openbo::cli::run_command(subcommand, config->config)}; });
}

size_t obo_table_rows(const obo_table* table) { return table ? table->table.rows().size() : 0; }
size_t obo_table_cols(const obo_table* table) { return table ? table->table.columns().size() : 0; }

const char* obo_table_column_name(const obo_table* table, size_t col)
{
    if (!table || col >= table->table.columns().size())
        return nullptr;
    return table->table.columns()[col].name.c_str();
}

const char* obo_table_column_unit(const obo_table* table, size_t col)
{
    if (!table || col >= table->table.columns().size())
        return nullptr;
    return table->table.columns()[col].unit.c_str();
}

obo_status obo_table_value(const obo_table* table, size_t row, size_t col, double* out)
{
    if (!table || !out)
        return null_argument("null table or out");
    if (row >= table->table.rows().size() || col >= table->table.columns().size())
        return null_argument("table index out of range");
    *out = table->table.rows()[row][col];
    return OBO_OK;
}

size_t obo_table_header_count(const obo_table* table) { return table ? table->table.header().size() : 0; }

const char* obo_table_header_key(const obo_table* table, size_t index)
{
    if (!table || index >= table->table.header().size())
        return nullptr;
    return table->table.header()[index].first.c_str();
}

const char* obo_table_header_value(const obo_table* table, size_t index)
{
    if (!table || index >= table->table.header().size())
        return nullptr;
    return table->table.header()[index].second.c_str();
}

const char* obo_table_header_lookup(const obo_table* table, const char* key)
{
    if (!table || !key)
        return nullptr;
    for (const auto& [k, v] : table->table.header())
        if (k == key)
            return v.c_str();
    return nullptr;
}

obo_status obo_table_write_csv(const obo_table* table, const char* path)
{
    if (!table)
        return null_argument("null table");
    if (!path) {
        table->table.write_csv(std::cout);
        std::cout.flush();
        return std::cout ? OBO_OK : fail(OBO_ERR_INTERNAL, "Io", "failed writing to stdout");
    }
    std::ofstream out(path);
    if (!out)
        return fail(OBO_ERR_CONFIG, "InvalidConfig", std::string("cannot open output file '") + path + "'");
    table->table.write_csv(out);
    out.close();
    return out ? OBO_OK : fail(OBO_ERR_INTERNAL, "Io", std::string("failed writing '") + path + "'");
}

void obo_table_destroy(obo_table* table) { delete table; }

obo_status obo_helical_spectrum(double phi, double phi_a, double g, double re[4], double im[4])
{
    if (!re || !im)
        return null_argument("null output arrays");
    return guarded([&] {
        const auto energies = openbo::helical::spectrum_analytic(phi, phi_a, g);
        for (std::size_t i = 0; i < 4; ++i) {
            re[i] = energies[i].real();
            im[i] = energies[i].imag();
        }
    });
}

obo_status obo_helical_steady_pz(double g, double theta, double* pz)
{
    if (!pz)
        return null_argument("null output");
    return guarded([&] {
        const openbo::ComplexMatrix rho = openbo::helical::steady_state(g, 0.0, theta).matrix();
        *pz = std::real(rho(0, 0) - rho(1, 1));
    });
}

obo_status obo_helical_polarization(double g, double theta, double duration, size_t steps, int exact, double* pz)
{
    if (!pz)
        return null_argument("null output");
    return guarded([&] {
        openbo::helical::HelicalModel model;
        model.g = g;
        model.theta = theta;
        openbo::helical::DriveProtocol protocol;
        protocol.duration = duration;
        protocol.steps = steps;
        protocol.samples = 1;
        protocol.dynamics =
            exact ? openbo::helical::Dynamics::Exact : openbo::helical::Dynamics::BornOppenheimer;
        *pz = openbo::helical::polarization_run(model, protocol).final_pz;
    });
}

} // extern "C"
