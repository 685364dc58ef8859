#include "openbo/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "openbo/disscom.hpp"
#include "openbo/helical.hpp"

namespace openbo::cli {
namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::InvalidConfig, message); }

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        config_error("'" + key + "' expects a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(value))
        config_error("'" + key + "' expects a finite number, got '" + text + "'");
    return value;
}

std::string join(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
        out += (i ? "," : "") + format_number(values[i]);
    return out;
}

struct Grid {
    double min;
    double max;
    std::size_t steps;
};

// Inclusive linspace; a single step yields the minimum.
std::vector<double> linspace(const Grid& grid)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < grid.steps; ++i)
        out.push_back(grid.steps == 1 ? grid.min
                                      : grid.min + (grid.max - grid.min) * static_cast<double>(i) /
                                                       static_cast<double>(grid.steps - 1));
    return out;
}

class Context {
public:
    Context(const std::string& subcommand, const RunConfig& config) : config_(config)
    {
        header_.emplace_back("subcommand", subcommand);
        header_.emplace_back("version", OPENBO_VERSION);
    }

    double positive(const std::string& key, double fallback)
    {
        const double v = config_.number(key, fallback);
        if (!(v > 0.0))
            config_error("'" + key + "' must be positive");
        return echo(key, v);
    }

    double non_negative(const std::string& key, double fallback)
    {
        const double v = config_.number(key, fallback);
        if (!(v >= 0.0))
            config_error("'" + key + "' must be non-negative");
        return echo(key, v);
    }

    double any(const std::string& key, double fallback) { return echo(key, config_.number(key, fallback)); }

    std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum)
    {
        const std::size_t v = config_.count(key, fallback);
        if (v < minimum)
            config_error("'" + key + "' must be at least " + std::to_string(minimum));
        header_.emplace_back(key, std::to_string(v));
        return v;
    }

    std::vector<double> grid(const std::string& prefix, const Grid& fallback, bool allow_zero)
    {
        const double lo = config_.number(prefix + "-min", fallback.min);
        const double hi = config_.number(prefix + "-max", fallback.max);
        const std::size_t steps = config_.count(prefix + "-steps", fallback.steps);
        if (steps == 0)
            config_error("'" + prefix + "' grid is empty");
        if (lo > hi)
            config_error("'" + prefix + "' grid must be increasing");
        if (lo < 0.0 || (!allow_zero && lo == 0.0))
            config_error("'" + prefix + "' grid values must be " + (allow_zero ? "non-negative" : "positive"));
        auto values = linspace({lo, hi, steps});
        header_.emplace_back(prefix, join(values));
        return values;
    }

    std::vector<double> values(const std::string& key, const std::vector<double>& fallback)
    {
        auto v = config_.list(key, fallback);
        if (v.empty())
            config_error("'" + key + "' is empty");
        header_.emplace_back(key, join(v));
        return v;
    }

    std::string text(const std::string& key, const std::string& fallback)
    {
        auto v = config_.text(key, fallback);
        header_.emplace_back(key, v);
        return v;
    }

    void note(const std::string& key, const std::string& value) { header_.emplace_back(key, value); }

    const RunConfig& config() const { return config_; }

    ScanTable finish(ScanTable table, const std::string& observable)
    {
        for (auto& [k, v] : header_)
            table.add_header(k, v);
        table.add_header("observable", observable);
        return table;
    }

private:
    double echo(const std::string& key, double v)
    {
        header_.emplace_back(key, format_number(v));
        return v;
    }

    const RunConfig& config_;
    std::vector<std::pair<std::string, std::string>> header_;
};

helical::HelicalModel model_from(Context& ctx)
{
    helical::HelicalModel model;
    model.theta = ctx.any("theta", kHalfPi);
    if (model.theta < 0.0 || model.theta > std::numbers::pi)
        config_error("'theta' must lie in [0, pi]");
    model.L = ctx.positive("period", 1.0);
    model.B = ctx.positive("muB", 1.0);
    model.mu = 1.0;
    return model;
}

std::size_t jobs_from(const RunConfig& config)
{
    const std::size_t jobs = config.count("jobs", 1);
    return std::max<std::size_t>(jobs, 1);
}

helical::DriveProtocol protocol_from(Context& ctx)
{
    helical::DriveProtocol protocol;
    protocol.steps = ctx.count("steps", 0, 0);
    if (protocol.steps != 0 && protocol.steps < 100)
        config_error("'steps' must be 0 (automatic) or at least 100");
    const auto dynamics = ctx.text("dynamics", "bo");
    if (dynamics == "bo")
        protocol.dynamics = helical::Dynamics::BornOppenheimer;
    else if (dynamics == "exact")
        protocol.dynamics = helical::Dynamics::Exact;
    else
        config_error("'dynamics' must be 'bo' or 'exact'");
    return protocol;
}

helical::GammaParams gamma_params_from(Context& ctx, const helical::HelicalModel& model)
{
    helical::GammaParams params;
    const auto& config = ctx.config();
    if (config.has("mass") && config.has("alpha"))
        config_error("'mass' and 'alpha' both fix the mass; give one");
    if (config.has("mass")) {
        const double mass = ctx.positive("mass", 1.0);
        params.alpha = 1.0 / (model.muB() * mass * mass * model.L);
        ctx.note("alpha", format_number(params.alpha));
    } else {
        params.alpha = ctx.positive("alpha", params.alpha);
    }
    params.beta = ctx.non_negative("beta", params.beta);
    params.loop_points = ctx.count("loop-points", params.loop_points, 1);
    params.window = static_cast<int>(ctx.count("window", static_cast<std::size_t>(params.window), 0));
    return params;
}

std::vector<double> g_grid_from(Context& ctx, const Grid& fallback)
{
    if (ctx.config().has("g")) {
        for (const char* key : {"g-min", "g-max", "g-steps"})
            if (ctx.config().has(key))
                config_error("'g' and the g grid keys are exclusive");
        const double g = ctx.non_negative("g", 0.0);
        return {g};
    }
    return ctx.grid("g", fallback, true);
}

std::array<cplx, 4> sorted_spectrum(double phi, double phi_a, double theta, double g)
{
    if (theta == kHalfPi)
        return helical::spectrum_analytic(phi, phi_a, g);
    const auto spectrum = linalg::eig_general(helical::hst_matrix(phi, phi_a, theta, g));
    std::array<cplx, 4> out;
    for (std::size_t i = 0; i < 4; ++i)
        out[i] = spectrum.pairs[i].value;
    return out;
}

ScanTable cmd_spectrum(Context& ctx)
{
    const auto model = model_from(ctx);
    const double phi = ctx.any("phi", 0.0);
    const double phi_a = ctx.any("phi-a", phi);
    const auto g_grid = g_grid_from(ctx, {0.0, 1.0, 11});
    std::vector<Column> columns{{"phi", "rad"}, {"phi_A", "rad"}, {"g", "muB"}};
    for (int j = 1; j <= 4; ++j) {
        columns.push_back({"Re_E" + std::to_string(j), "muB"});
        columns.push_back({"Im_E" + std::to_string(j), "muB"});
    }
    ScanTable table(columns);
    for (double g : g_grid) {
        const auto energies = sorted_spectrum(phi, phi_a, model.theta, g);
        std::vector<double> row{phi, phi_a, g};
        for (const auto& e : energies) {
            row.push_back(e.real());
            row.push_back(e.imag());
        }
        table.add_row(std::move(row));
    }
    return ctx.finish(std::move(table), "Im_E1");
}

ScanTable cmd_steady(Context& ctx)
{
    const auto model = model_from(ctx);
    const double g = ctx.non_negative("g", 0.5);
    const double phi = ctx.any("phi", 0.0);
    const auto rho = helical::steady_state(g, phi, model.theta, true).matrix();
    ScanTable table({{"row", "1"}, {"col", "1"}, {"Re_rho", "1"}, {"Im_rho", "1"}});
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j)
            table.add_row({static_cast<double>(i), static_cast<double>(j), rho(i, j).real(), rho(i, j).imag()});
    const cplx trace = rho.trace();
    table.add_row({-1.0, -1.0, trace.real(), trace.imag()});
    ctx.note("trace_row", "row=-1,col=-1");
    ctx.note("Pz", format_number(std::real(rho(0, 0) - rho(1, 1))));
    return ctx.finish(std::move(table), "Re_rho");
}

ScanTable cmd_pz_scan(Context& ctx)
{
    const auto model = model_from(ctx);
    const auto protocol = protocol_from(ctx);
    const auto g_grid = g_grid_from(ctx, {0.0, 0.5, 26});
    const auto t_grid = ctx.grid("T", {3.0 / 121.0, 3.0, 121}, true);
    auto table = helical::pz_surface(model, g_grid, t_grid, protocol, jobs_from(ctx.config()));
    return ctx.finish(std::move(table), "Pz");
}

ScanTable cmd_pz_gt(Context& ctx)
{
    const auto model = model_from(ctx);
    const auto protocol = protocol_from(ctx);
    std::vector<double> g_list;
    if (ctx.config().has("g-list") || !ctx.config().has("g"))
        g_list = ctx.values("g-list", {0.5, 2.0, 10.0, 50.0});
    else
        g_list = {ctx.positive("g", 1.0)};
    for (double g : g_list)
        if (!(g > 0.0))
            config_error("pz-gt needs positive g values");
    const auto gt_grid = ctx.grid("gT", {10.0 / 201.0, 10.0, 201}, true);
    auto table = helical::pz_vs_gT(model, g_list, gt_grid, protocol, jobs_from(ctx.config()));
    return ctx.finish(std::move(table), "Pz");
}

ScanTable cmd_gamma_scan(Context& ctx)
{
    const auto model = model_from(ctx);
    const auto params = gamma_params_from(ctx, model);
    const auto g_grid = g_grid_from(ctx, {0.0, 1.0, 51});
    helical::HelicalModel reference = model;
    reference.g = 0.0;
    const auto report = helical::gamma_report(reference, params);
    ctx.note("Gamma0", format_number(report.gamma));
    ctx.note("momentum_set", report.momentum_set);
    auto table = helical::gamma_scan(model, g_grid, params, jobs_from(ctx.config()));
    return ctx.finish(std::move(table), "Gamma_normalized");
}

// Largest interior discrepancy between the direct generator, its C/D
// rewriting and the doubled-space matrix, on a fixed pseudo-random state.
std::array<double, 2> disscom_residuals(const disscom::MotionBasis& basis, const disscom::DissCOMRates& rates)
{
    const auto n = static_cast<Eigen::Index>(basis.n_max);
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> normal;
    ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            a(i, j) = cplx{normal(rng), normal(rng)};
    ComplexMatrix rho = a * a.adjoint();
    rho /= rho.trace();

    const ComplexMatrix direct = disscom::disscom_rhs(rho, rates, basis);
    const ComplexVector doubled =
        -I_UNIT * (disscom::build_LC(basis, rates) * liouville::flatten(rho));
    const ComplexMatrix vectorized = liouville::unflatten(doubled);
    const Eigen::Index inner = n - 2;
    double lc = (direct - vectorized).topLeftCorner(inner, inner).cwiseAbs().maxCoeff();
    double cd = std::nan("");
    if (rates.gamma1 > 0.0) {
        const auto pair = disscom::build_CD(rates, basis);
        const ComplexMatrix rewritten = liouville::apply_dissipator(pair, rho);
        cd = (direct - rewritten).topLeftCorner(inner, inner).cwiseAbs().maxCoeff();
    }
    return {lc, cd};
}

ScanTable cmd_disscom_check(Context& ctx)
{
    const auto model = model_from(ctx);
    const auto params = gamma_params_from(ctx, model);
    const auto g_grid = g_grid_from(ctx, {0.0, 1.0, 6});
    disscom::DissCOMRates rates;
    rates.gamma1 = ctx.non_negative("rate1", 1e-3);
    rates.gamma2 = ctx.non_negative("rate2", 1e-4);
    const auto basis = disscom::xp_matrices(ctx.count("n-max", 8, 4));
    const auto residuals = disscom_residuals(basis, rates);
    ctx.note("lc_interior_residual", format_number(residuals[0]));
    ctx.note("cd_interior_residual", std::isnan(residuals[1]) ? "skipped" : format_number(residuals[1]));
    ctx.note("motion_states", "0,1");

    const auto chis = disscom::oscillator_states(basis, 2);
    const ComplexMatrix lc_table = disscom::lc_level_table(disscom::build_LC(basis, rates), chis);
    helical::HelicalModel reference = model;
    reference.g = 0.0;
    const double gamma0 = helical::gamma_report(reference, params).gamma;
    ctx.note("Gamma0", format_number(gamma0));

    const auto rows = parallel_map<std::array<double, 4>>(
        g_grid.size(), jobs_from(ctx.config()), [&](std::size_t i) {
            helical::HelicalModel m = model;
            m.g = g_grid[i];
            const auto bundle = helical::helical_loop_bundle(m, params);
            const auto spec = helical::helical_channels(m, params);
            const auto spin = bo::gamma_measure(bundle, spec, gamma0);
            const auto full = disscom::disscom_validity(bundle, lc_table, spec, gamma0);
            return std::array<double, 4>{g_grid[i], spin.gamma, full.gamma, full.normalized};
        });
    ScanTable table({{"g", "muB"}, {"Gamma", "1"}, {"Gamma_disscom", "1"}, {"Gamma_disscom_normalized", "1"}});
    for (const auto& r : rows)
        table.add_row({r[0], r[1], r[2], r[3]});
    return ctx.finish(std::move(table), "Gamma_disscom");
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value)
{
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        config_error("unknown key '" + key + "'");
    values_[key] = trim(value);
}

void RunConfig::load_file(const std::string& path, bool keep_existing)
{
    std::ifstream in(path);
    if (!in)
        config_error("cannot open config file '" + path + "'");
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            config_error(path + ":" + std::to_string(number) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (keep_existing && has(key))
            continue;
        set(key, line.substr(eq + 1));
    }
}

double RunConfig::number(const std::string& key, double fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::size_t RunConfig::count(const std::string& key, std::size_t fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    const double v = parse_double(key, it->second);
    if (v < 0.0 || v != std::floor(v) || v > 1e9)
        config_error("'" + key + "' expects a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const
{
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::vector<double> RunConfig::list(const std::string& key, const std::vector<double>& fallback) const
{
    const auto it = values_.find(key);
    if (it == values_.end())
        return fallback;
    std::vector<double> out;
    std::stringstream stream(it->second);
    std::string item;
    while (std::getline(stream, item, ','))
        out.push_back(parse_double(key, trim(item)));
    return out;
}

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{
        "theta", "period", "mass", "muB", "g", "g-min", "g-max", "g-steps", "g-list", "T-min", "T-max",
        "T-steps", "gT-min", "gT-max", "gT-steps", "steps", "dynamics", "alpha", "beta", "loop-points",
        "window", "phi", "phi-a", "rate1", "rate2", "n-max", "out", "jobs"};
    return keys;
}

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"spectrum", "steady", "pz-scan", "pz-gt", "gamma-scan",
                                                "disscom-check"};
    return names;
}

ScanTable run_command(const std::string& subcommand, const RunConfig& config)
{
    Context ctx(subcommand, config);
    if (subcommand == "spectrum")
        return cmd_spectrum(ctx);
    if (subcommand == "steady")
        return cmd_steady(ctx);
    if (subcommand == "pz-scan")
        return cmd_pz_scan(ctx);
    if (subcommand == "pz-gt")
        return cmd_pz_gt(ctx);
    if (subcommand == "gamma-scan")
        return cmd_gamma_scan(ctx);
    if (subcommand == "disscom-check")
        return cmd_disscom_check(ctx);
    config_error("unknown subcommand '" + subcommand + "'");
}

} // namespace openbo::cli
