// openbo: spectra, polarization scans and validity scans for the helical-field
// spin model. Exit codes: 0 success, 2 configuration error, 3 numeric failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "openbo/openbo.h"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericExit = 3;

struct ConfigDeleter {
    void operator()(obo_config* c) const { obo_config_destroy(c); }
};
struct TableDeleter {
    void operator()(obo_table* t) const { obo_table_destroy(t); }
};
using ConfigHandle = std::unique_ptr<obo_config, ConfigDeleter>;
using TableHandle = std::unique_ptr<obo_table, TableDeleter>;

int report(obo_status status)
{
    std::fprintf(stderr, "openbo: %s\n", obo_last_error());
    return status == OBO_ERR_CONFIG ? kConfigExit : kNumericExit;
}

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

const std::vector<Flag>& flags()
{
    static const std::vector<Flag> list{
        {"--theta", "theta", "field tilt angle [rad]"},
        {"--period", "period", "helix period L"},
        {"--mass", "mass", "particle mass (sets alpha)"},
        {"--muB", "muB", "Zeeman energy mu B"},
        {"--g", "g", "single relaxation rate [muB]"},
        {"--g-min", "g-min", "g grid start"},
        {"--g-max", "g-max", "g grid end"},
        {"--g-steps", "g-steps", "g grid points"},
        {"--g-list", "g-list", "comma-separated g values (pz-gt)"},
        {"--T-min", "T-min", "duration grid start [pi/muB]"},
        {"--T-max", "T-max", "duration grid end [pi/muB]"},
        {"--T-steps", "T-steps", "duration grid points"},
        {"--gT-min", "gT-min", "gT grid start [pi]"},
        {"--gT-max", "gT-max", "gT grid end [pi]"},
        {"--gT-steps", "gT-steps", "gT grid points"},
        {"--steps", "steps", "integration steps per run (0 = automatic)"},
        {"--dynamics", "dynamics", "bo or exact"},
        {"--alpha", "alpha", "1 / (mu B M^2 L)"},
        {"--beta", "beta", "k_z / (mu B M L)"},
        {"--loop-points", "loop-points", "samples along the field period"},
        {"--window", "window", "momentum-transfer window"},
        {"--phi", "phi", "field angle [rad]"},
        {"--phi-a", "phi-a", "ancilla field angle [rad]"},
        {"--rate1", "rate1", "position-diffusion rate"},
        {"--rate2", "rate2", "friction rate"},
        {"--n-max", "n-max", "oscillator truncation"},
    };
    return list;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Born-Oppenheimer analysis of open spin systems in a helical field"};
    app.set_version_flag("--version", std::string(obo_version()));
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> given;
    for (const auto& f : flags())
        app.add_option(f.name, given[f.key], f.help);
    std::string out;
    std::string config_path;
    std::size_t jobs = 1;
    app.add_option("--out", out, "CSV output path (default stdout)");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--config", config_path, "key = value file; flags take precedence");

    const char* descriptions[][2] = {
        {"spectrum", "doubled-space eigenvalues over a g grid"},
        {"steady", "steady-state density matrix"},
        {"pz-scan", "final polarization over (g, T)"},
        {"pz-gt", "final polarization against gT"},
        {"gamma-scan", "validity measure over g"},
        {"disscom-check", "center-of-mass dissipation consistency and validity"},
    };
    for (const auto& d : descriptions)
        app.add_subcommand(d[0], d[1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    obo_config* raw = nullptr;
    if (const auto status = obo_config_create(&raw); status != OBO_OK)
        return report(status);
    ConfigHandle config(raw);
    for (const auto& f : flags()) {
        if (app.count(f.name) == 0)
            continue;
        if (const auto status = obo_config_set(config.get(), f.key, given[f.key].c_str()); status != OBO_OK)
            return report(status);
    }
    if (app.count("--jobs"))
        if (const auto status = obo_config_set(config.get(), "jobs", std::to_string(jobs).c_str()); status != OBO_OK)
            return report(status);
    if (!config_path.empty())
        if (const auto status = obo_config_load_file(config.get(), config_path.c_str()); status != OBO_OK)
            return report(status);

    const std::string subcommand = app.get_subcommands().front()->get_name();
    const auto start = std::chrono::steady_clock::now();
    obo_table* table_raw = nullptr;
    if (const auto status = obo_run(config.get(), subcommand.c_str(), &table_raw); status != OBO_OK)
        return report(status);
    TableHandle table(table_raw);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (const auto status = obo_table_write_csv(table.get(), out.empty() ? nullptr : out.c_str()); status != OBO_OK)
        return report(status);

    const char* observable = obo_table_header_lookup(table.get(), "observable");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t c = 0; observable && c < obo_table_cols(table.get()); ++c) {
        if (std::string(obo_table_column_name(table.get(), c)) != observable)
            continue;
        for (std::size_t r = 0; r < obo_table_rows(table.get()); ++r) {
            double v = 0.0;
            obo_table_value(table.get(), r, c, &v);
            v += 0.0; // no negative zero in the summary
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    std::fprintf(stderr, "%s: %zu rows, %s min=%.6g max=%.6g, %.3f s\n", subcommand.c_str(),
                 obo_table_rows(table.get()), observable ? observable : "-", lo, hi, seconds);
    return 0;
}
