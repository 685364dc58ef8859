#include "openbo/helical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "openbo/pauli.hpp"

namespace openbo::helical {
namespace {

constexpr double kPi = std::numbers::pi;

// Forward-mode derivative along one real direction.
struct Dual {
    cplx v{};
    cplx d{};
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
Dual constant(cplx v) { return {v, {0.0, 0.0}}; }

// exp(i * angle) for a real angle with derivative `rate`.
Dual phase(double angle, double rate)
{
    const cplx e = std::polar(1.0, angle);
    return {e, I_UNIT * e * rate};
}

bool is_half_pi(double theta) { return std::abs(theta - 0.5 * kPi) < 1e-15; }

std::array<cplx, 3> sorted_cubic_roots(double delta, double g)
{
    auto roots = linalg::solve_cubic(1.5 * I_UNIT * g, -0.5 * (8.0 + g * g),
                                     2.0 * I_UNIT * g * (std::polar(1.0, -delta) - 1.0));
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        if (a.real() != b.real())
            return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

struct DualLevel {
    Dual energy;
    std::array<Dual, 4> right;
    std::array<Dual, 4> row;   // (a, b, c, d)
};

// Closed-form right vector and left row for level j, differentiated along
// (d phi, d phi^A) = (rate, rate_a).
DualLevel dual_level(std::size_t j, double phi, double phi_a, double g, const std::array<cplx, 4>& energies,
                     double rate, double rate_a)
{
    const Dual ep = phase(phi, rate);
    const Dual ea = phase(phi_a, rate_a);
    const Dual em = phase(-phi, -rate);
    const Dual eam = phase(-phi_a, -rate_a);
    DualLevel out;
    if (j == 0) {
        out.energy = constant(-0.5 * I_UNIT * g);
        out.right = {constant(0.0), eam, ep, constant(0.0)};
        out.row = {constant(0.0), ea, em, constant(0.0)};
        return out;
    }
    const cplx e = energies[j];
    const double delta = phi - phi_a;
    const cplx slope = 3.0 * e * e + 3.0 * I_UNIT * g * e - 0.5 * (8.0 + g * g);
    cplx de{0.0, 0.0};
    if (g != 0.0) {
        if (std::abs(slope) < 1e-14)
            throw Error(ErrorCode::DegenerateEigenvalue, "double root of the cubic; derivative undefined");
        de = -2.0 * g * std::polar(1.0, -delta) * (rate - rate_a) / slope;
    }
    const Dual en{e, de};
    const Dual gi = constant(I_UNIT * g);
    const Dual rel = ep * eam;   // exp(i(phi - phi^A))
    const Dual poly = constant(4.0) - gi * en - constant(2.0) * en * en;
    out.energy = en;
    out.right = {poly, constant(-2.0) * em * gi + constant(2.0) * eam * en,
                 constant(2.0) * ea * gi - constant(2.0) * ep * en,
                 constant(4.0) * rel + constant(g) * (constant(g) - constant(2.0 * I_UNIT) * en)};
    out.row = {rel * poly, constant(2.0) * ep * en, constant(-2.0) * eam * en, constant(4.0)};
    return out;
}

Dual bilinear_norm(const DualLevel& level)
{
    Dual n = constant(0.0);
    for (std::size_t i = 0; i < 4; ++i)
        n = n + level.right[i] * level.row[i];
    return n;
}

// Squared Euclidean norm with its derivative (real valued).
std::array<double, 2> norm2(const std::array<Dual, 4>& v)
{
    double value = 0.0, rate = 0.0;
    for (const auto& c : v) {
        value += std::norm(c.v);
        rate += 2.0 * std::real(std::conj(c.v) * c.d);
    }
    return {value, rate};
}

struct BalancedLevel {
    cplx energy;
    ComplexVector right;
    ComplexVector left;
    ComplexVector right_rate;
};

BalancedLevel balanced_level(std::size_t j, double phi, double phi_a, double g, const std::array<cplx, 4>& energies,
                             double rate, double rate_a)
{
    const DualLevel level = dual_level(j, phi, phi_a, g, energies, rate, rate_a);
    const Dual norm = bilinear_norm(level);
    if (std::abs(norm.v) < 1e-12)
        throw Error(ErrorCode::DegenerateEigenvalue, "self-orthogonal eigenvector (exceptional point)");
    std::array<Dual, 4> scaled_row;
    for (std::size_t i = 0; i < 4; ++i)
        scaled_row[i] = level.row[i] / norm;
    const auto nr = norm2(level.right);
    const auto nl = norm2(scaled_row);
    const double s = std::pow(nl[0] / nr[0], 0.25);
    const double ds = 0.25 * s * (nl[1] / nl[0] - nr[1] / nr[0]);

    BalancedLevel out;
    out.energy = level.energy.v;
    out.right.resize(4);
    out.left.resize(4);
    out.right_rate.resize(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const auto& r = level.right[static_cast<std::size_t>(i)];
        out.right(i) = s * r.v;
        out.right_rate(i) = ds * r.v + s * r.d;
        out.left(i) = std::conj(scaled_row[static_cast<std::size_t>(i)].v) / s;
    }
    return out;
}

std::array<cplx, 4> level_energies(double phi, double phi_a, double g)
{
    const auto cubic = sorted_cubic_roots(phi - phi_a, g);
    return {-0.5 * I_UNIT * g, cubic[0], cubic[1], cubic[2]};
}

double point_phi(const bo::SlowPoint& point)
{
    if (point.system.size() != 1 || point.ancilla.size() != 1)
        throw Error(ErrorCode::DimensionMismatch, "helical slow points carry (phi, phi^A)");
    return point.system[0];
}

ComplexVector flat_up() { return liouville::flatten(ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}); }

double pz_of(const ComplexVector& doubled) { return std::real(doubled(0) - doubled(3)); }

struct Physicality {
    double trace = 0.0;
    double hermiticity = 0.0;
    double min_eigenvalue = 0.0;
};

void monitor(const ComplexVector& doubled, Physicality& p)
{
    const ComplexMatrix rho = liouville::unflatten(doubled);
    p.trace = std::max(p.trace, std::abs(rho.trace() - 1.0));
    p.hermiticity = std::max(p.hermiticity, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    p.min_eigenvalue = std::min(p.min_eigenvalue, solver.eigenvalues().minCoeff());
}

std::vector<std::size_t> sample_boundaries(std::size_t steps, std::size_t samples)
{
    std::vector<std::size_t> out;
    const std::size_t count = std::max<std::size_t>(1, std::min(samples, steps));
    for (std::size_t i = 1; i <= count; ++i) {
        const auto b = static_cast<std::size_t>(std::llround(static_cast<double>(steps) * static_cast<double>(i) /
                                                             static_cast<double>(count)));
        if (out.empty() || b > out.back())
            out.push_back(b);
    }
    return out;
}

std::shared_ptr<const bo::EigenSource> drive_source(const HelicalModel& model)
{
    if (is_half_pi(model.theta))
        return std::make_shared<HelicalAnalyticSource>(model.g);
    return numeric_source(model.theta, model.g);
}

PolarizationTrace run_born_oppenheimer(const HelicalModel& model, const DriveProtocol& protocol, std::size_t steps)
{
    const auto source = drive_source(model);
    const double duration = protocol.duration;
    const double dt = duration / static_cast<double>(steps);
    auto point_at = [&](std::size_t s) {
        const double angle = 2.0 * kPi * static_cast<double>(s) / static_cast<double>(steps);
        return slow_point(angle, angle);
    };

    std::vector<bo::Level> previous = source->levels(point_at(0));
    const ComplexVector psi0 = flat_up();
    std::vector<cplx> amplitude;
    for (const auto& level : previous)
        amplitude.push_back(level.left.dot(psi0));

    auto state = [&](const std::vector<bo::Level>& levels) {
        ComplexVector psi = ComplexVector::Zero(4);
        for (std::size_t n = 0; n < levels.size(); ++n)
            psi += amplitude[n] * levels[n].right;
        return psi;
    };

    PolarizationTrace trace;
    Physicality physical;
    trace.samples.push_back({0.0, pz_of(psi0)});
    const auto boundaries = sample_boundaries(steps, protocol.samples);
    std::size_t next_sample = 0;
    for (std::size_t s = 1; s <= steps; ++s) {
        auto raw = source->levels(point_at(s));
        double worst = 1.0;
        const auto index = bo::match_levels(previous, raw, worst);
        std::vector<bo::Level> current;
        for (auto i : index)
            current.push_back(std::move(raw[i]));
        for (std::size_t n = 0; n < current.size(); ++n) {
            auto& now = current[n];
            const auto& before = previous[n];
            const cplx overlap = before.right.dot(now.right);
            if (std::abs(overlap) > 0.0) {
                const cplx align = std::conj(overlap) / std::abs(overlap);
                now.right *= align;
                now.left *= align;
            }
            const cplx forward = now.left.dot(before.right);
            const cplx backward = before.left.dot(now.right);
            const cplx transport = std::sqrt(forward / backward);
            amplitude[n] *= transport * std::exp(-I_UNIT * 0.5 * (before.energy + now.energy) * dt);
        }
        previous = std::move(current);
        if (next_sample < boundaries.size() && s == boundaries[next_sample]) {
            const ComplexVector psi = state(previous);
            monitor(psi, physical);
            const double pz = pz_of(psi);
            if (std::abs(pz) > 1.0 + 1e-8)
                throw Error(ErrorCode::StepOverflow, "polarization left [-1, 1]");
            trace.samples.push_back({dt * static_cast<double>(s), pz});
            ++next_sample;
        }
    }
    trace.final_pz = trace.samples.back()[1];
    trace.max_trace_error = physical.trace;
    trace.max_hermiticity_error = physical.hermiticity;
    trace.min_eigenvalue = physical.min_eigenvalue;
    return trace;
}

PolarizationTrace run_exact(const HelicalModel& model, const DriveProtocol& protocol, std::size_t steps)
{
    const auto generator = liouville::generator_function(drive_model(model, protocol.duration));
    const double dt = protocol.duration / static_cast<double>(steps);
    ComplexVector psi = flat_up();
    PolarizationTrace trace;
    Physicality physical;
    trace.samples.push_back({0.0, pz_of(psi)});
    std::size_t done = 0;
    for (auto boundary : sample_boundaries(steps, protocol.samples)) {
        psi = linalg::propagate_steps(generator, psi, dt * static_cast<double>(done),
                                      dt * static_cast<double>(boundary), boundary - done);
        done = boundary;
        monitor(psi, physical);
        trace.samples.push_back({dt * static_cast<double>(done), pz_of(psi)});
    }
    trace.final_pz = trace.samples.back()[1];
    trace.max_trace_error = physical.trace;
    trace.max_hermiticity_error = physical.hermiticity;
    trace.min_eigenvalue = physical.min_eigenvalue;
    return trace;
}

} // namespace

void HelicalModel::validate() const
{
    if (!(B > 0.0) || !(L > 0.0) || !(M > 0.0) || !(mu > 0.0))
        throw Error(ErrorCode::InvalidArgument, "B, mu, L and M must be positive");
    if (!(g >= 0.0) || !std::isfinite(g) || !std::isfinite(theta))
        throw Error(ErrorCode::InvalidArgument, "g must be finite and non-negative");
}

std::array<double, 3> helical_B(const HelicalModel& model, double z)
{
    const double angle = 2.0 * kPi * z / model.L;
    const double s = std::sin(model.theta);
    return {model.B * s * std::cos(angle), model.B * s * std::sin(angle), model.B * std::cos(model.theta)};
}

ChiEigensystem chi_eigensystem(const HelicalModel& model, double z)
{
    const double angle = 2.0 * kPi * z / model.L;
    const cplx e = std::polar(1.0, -angle);
    const double c = std::cos(0.5 * model.theta);
    const double s = std::sin(0.5 * model.theta);
    ChiEigensystem out;
    out.chi1 = ComplexVector(2);
    out.chi1 << c * e, s;
    out.chi2 = ComplexVector(2);
    out.chi2 << s * e, -c;
    out.eps1 = model.muB();
    out.eps2 = -model.muB();
    return out;
}

ComplexMatrix spin_hamiltonian(double theta, double phi)
{
    return std::sin(theta) * std::cos(phi) * pauli::x() + std::sin(theta) * std::sin(phi) * pauli::y() +
           std::cos(theta) * pauli::z();
}

ComplexMatrix hst_matrix(double phi, double phi_a, double theta, double g)
{
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const cplx ig = I_UNIT * g;
    const cplx ep = std::polar(1.0, phi), em = std::polar(1.0, -phi);
    const cplx ea = std::polar(1.0, phi_a), eam = std::polar(1.0, -phi_a);
    ComplexMatrix m(4, 4);
    m << -ig, -s * ea, s * em, 0.0,
         -s * eam, 2.0 * c - 0.5 * ig, 0.0, s * em,
         s * ep, 0.0, -2.0 * c - 0.5 * ig, -s * ea,
         ig, s * ep, -s * eam, 0.0;
    return m;
}

ComplexMatrix hst_from_liouville(double phi, double phi_a, double theta, double g)
{
    const ComplexMatrix id = pauli::identity();
    const ComplexMatrix h = spin_hamiltonian(theta, phi);
    const ComplexMatrix ha = liouville::ancilla_conjugate(spin_hamiltonian(theta, phi_a));
    return linalg::kron(h, id) - linalg::kron(id, ha) + liouville::build_LS(g, pauli::lowering());
}

std::array<cplx, 4> spectrum_analytic(double phi, double phi_a, double g)
{
    return level_energies(phi, phi_a, g);
}

AnalyticPair eigvecs_analytic(std::size_t j, double phi, double phi_a, double g)
{
    if (j > 3)
        throw Error(ErrorCode::InvalidArgument, "level index must be 0..3");
    const auto energies = level_energies(phi, phi_a, g);
    const DualLevel level = dual_level(j, phi, phi_a, g, energies, 0.0, 0.0);
    const cplx norm = bilinear_norm(level).v;
    if (std::abs(norm) < 1e-12)
        throw Error(ErrorCode::DegenerateEigenvalue, "self-orthogonal eigenvector (exceptional point)");
    AnalyticPair out;
    out.value = level.energy.v;
    out.norm = norm;
    out.right.resize(4);
    out.left.resize(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        out.right(i) = level.right[static_cast<std::size_t>(i)].v;
        out.left(i) = std::conj(level.row[static_cast<std::size_t>(i)].v / norm);
    }
    return out;
}

HelicalAnalyticSource::HelicalAnalyticSource(double g, double muB) : g_(g), muB_(muB)
{
    if (!(g >= 0.0) || !(muB > 0.0))
        throw Error(ErrorCode::InvalidArgument, "analytic source needs g >= 0 and mu B > 0");
}

ComplexMatrix HelicalAnalyticSource::block(const bo::SlowPoint& point) const
{
    return muB_ * hst_matrix(point_phi(point), point.ancilla[0], 0.5 * kPi, g_);
}

std::vector<bo::Level> HelicalAnalyticSource::levels(const bo::SlowPoint& point) const
{
    const double phi = point_phi(point);
    const double phi_a = point.ancilla[0];
    const auto energies = level_energies(phi, phi_a, g_);
    std::vector<bo::Level> out;
    for (std::size_t j = 0; j < 4; ++j) {
        auto level = balanced_level(j, phi, phi_a, g_, energies, 0.0, 0.0);
        out.push_back({muB_ * level.energy, std::move(level.right), std::move(level.left)});
    }
    return out;
}

std::optional<std::vector<ComplexVector>> HelicalAnalyticSource::right_derivatives(const bo::SlowPoint& point,
                                                                                   std::size_t j) const
{
    if (j > 1)
        throw Error(ErrorCode::InvalidArgument, "helical slow coordinates are (phi, phi^A)");
    const double phi = point_phi(point);
    const double phi_a = point.ancilla[0];
    const auto energies = level_energies(phi, phi_a, g_);
    std::vector<ComplexVector> out;
    for (std::size_t n = 0; n < 4; ++n)
        out.push_back(balanced_level(n, phi, phi_a, g_, energies, j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0).right_rate);
    return out;
}

std::shared_ptr<bo::NumericSource> numeric_source(double theta, double g, double muB)
{
    return std::make_shared<bo::NumericSource>(4, [theta, g, muB](const bo::SlowPoint& point) {
        return ComplexMatrix(muB * hst_matrix(point_phi(point), point.ancilla[0], theta, g));
    });
}

bo::SlowPoint slow_point(double phi, double phi_a) { return bo::SlowPoint{{phi}, {phi_a}, true, true}; }

liouville::DensityMatrix steady_state(double g, double phi, double theta, bool strict)
{
    if (!(g >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "g must be non-negative");
    const ComplexMatrix block = hst_matrix(phi, phi, theta, g);
    const double scale = std::max(1.0, block.norm());
    const auto spectrum = linalg::eig_general(block);
    std::size_t zero = 0;
    for (std::size_t i = 1; i < spectrum.pairs.size(); ++i)
        if (std::abs(spectrum.pairs[i].value) < std::abs(spectrum.pairs[zero].value))
            zero = i;
    if (std::abs(spectrum.pairs[zero].value) > 1e-10 * scale)
        throw Error(ErrorCode::NoZeroMode, "no eigenvalue within tolerance of zero");
    if (strict)
        for (std::size_t i = 0; i < spectrum.pairs.size(); ++i)
            if (i != zero && std::abs(spectrum.pairs[i].value - spectrum.pairs[zero].value) < 1e-8 * scale)
                throw Error(ErrorCode::NoZeroMode, "zero mode is degenerate");
    ComplexMatrix rho = liouville::unflatten(spectrum.pairs[zero].right);
    const cplx trace = rho.trace();
    if (std::abs(trace) < 1e-12)
        throw Error(ErrorCode::NoZeroMode, "zero mode is traceless");
    rho /= trace;
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return liouville::DensityMatrix(rho);
}

liouville::OpenSystemModel drive_model(const HelicalModel& model, double duration)
{
    model.validate();
    if (!(duration > 0.0))
        throw Error(ErrorCode::InvalidArgument, "duration must be positive");
    const double theta = model.theta;
    liouville::LindbladSet dissipation{{{model.g, pauli::lowering()}}};
    return liouville::OpenSystemModel(
        2, [theta, duration](double t) { return spin_hamiltonian(theta, 2.0 * kPi * t / duration); },
        dissipation);
}

PolarizationTrace polarization_run(const HelicalModel& model, const DriveProtocol& protocol)
{
    model.validate();
    if (!(protocol.duration > 0.0) || !std::isfinite(protocol.duration))
        throw Error(ErrorCode::InvalidArgument, "duration must be positive");
    const std::size_t steps =
        protocol.steps ? protocol.steps : std::max<std::size_t>(100, linalg::default_steps(protocol.duration));
    if (steps < 100)
        throw Error(ErrorCode::InvalidArgument, "at least 100 steps are required");
    if (protocol.dynamics == Dynamics::Exact)
        return run_exact(model, protocol, steps);
    return run_born_oppenheimer(model, protocol, steps);
}

namespace {

double final_pz(const HelicalModel& base, double g, double duration, const DriveProtocol& protocol)
{
    if (duration <= 0.0)
        return 1.0;
    HelicalModel model = base;
    model.g = g;
    DriveProtocol p = protocol;
    p.duration = duration;
    p.samples = 1;
    return polarization_run(model, p).final_pz;
}

} // namespace

ScanTable pz_surface(const HelicalModel& model, const std::vector<double>& g_grid, const std::vector<double>& t_grid,
                     const DriveProtocol& protocol, std::size_t jobs)
{
    if (g_grid.empty() || t_grid.empty())
        throw Error(ErrorCode::InvalidArgument, "pz surface needs non-empty grids");
    const std::size_t width = t_grid.size();
    const auto values = parallel_map<double>(g_grid.size() * width, jobs, [&](std::size_t i) {
        return final_pz(model, g_grid[i / width], kPi * t_grid[i % width], protocol);
    });
    ScanTable table({{"g", "muB"}, {"T", "pi/muB"}, {"Pz", "1"}});
    for (std::size_t i = 0; i < values.size(); ++i)
        table.add_row({g_grid[i / width], t_grid[i % width], values[i]});
    return table;
}

ScanTable pz_vs_gT(const HelicalModel& model, const std::vector<double>& g_list, const std::vector<double>& gt_grid,
                   const DriveProtocol& protocol, std::size_t jobs)
{
    if (g_list.empty() || gt_grid.empty())
        throw Error(ErrorCode::InvalidArgument, "pz vs gT needs non-empty grids");
    for (double g : g_list)
        if (!(g > 0.0))
            throw Error(ErrorCode::InvalidArgument, "g values must be positive for a gT scan");
    const std::size_t width = gt_grid.size();
    const auto values = parallel_map<double>(g_list.size() * width, jobs, [&](std::size_t i) {
        const double g = g_list[i / width];
        return final_pz(model, g, kPi * gt_grid[i % width] / g, protocol);
    });
    ScanTable table({{"g", "muB"}, {"gT", "pi"}, {"T", "pi/muB"}, {"Pz", "1"}});
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double g = g_list[i / width];
        const double gt = gt_grid[i % width];
        table.add_row({g, gt, gt / g, values[i]});
    }
    return table;
}

double gamma_mass(const HelicalModel& model, const GammaParams& params)
{
    if (!(params.alpha > 0.0))
        throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
    return 1.0 / std::sqrt(params.alpha * model.muB() * model.L);
}

double gamma_momentum(const HelicalModel& model, const GammaParams& params)
{
    return params.beta * model.muB() * gamma_mass(model, params) * model.L;
}

bo::EigenBundle helical_loop_bundle(const HelicalModel& model, const GammaParams& params)
{
    model.validate();
    if (params.loop_points < 1)
        throw Error(ErrorCode::InvalidArgument, "loop needs at least one point");
    std::shared_ptr<const bo::EigenSource> source;
    if (is_half_pi(model.theta))
        source = std::make_shared<HelicalAnalyticSource>(model.g, model.muB());
    else
        source = numeric_source(model.theta, model.g, model.muB());
    std::vector<bo::SlowPoint> grid;
    for (std::size_t l = 0; l < params.loop_points; ++l) {
        const double angle = 2.0 * kPi * static_cast<double>(l) / static_cast<double>(params.loop_points);
        grid.push_back(slow_point(angle, angle));
    }
    bo::BundleOptions options;
    options.mass = gamma_mass(model, params);
    options.coordinate_scale = 2.0 * kPi / model.L;
    options.loop = true;
    return bo::build_bundle(std::move(source), std::move(grid), options);
}

bo::ChannelSpec helical_channels(const HelicalModel& model, const GammaParams& params)
{
    const double k = gamma_momentum(model, params);
    bo::ChannelSpec spec;
    spec.kappa = {cplx{k, 0.0}, I_UNIT * k};
    spec.transfer = {cplx{2.0 * kPi / model.L, 0.0}, cplx{0.0, 0.0}};
    spec.window = params.window;
    return spec;
}

bo::ValidityReport gamma_report(const HelicalModel& model, const GammaParams& params, std::optional<double> gamma0)
{
    const auto bundle = helical_loop_bundle(model, params);
    return bo::gamma_measure(bundle, helical_channels(model, params), gamma0);
}

ScanTable gamma_scan(const HelicalModel& model, const std::vector<double>& g_grid, const GammaParams& params,
                     std::size_t jobs)
{
    if (g_grid.empty())
        throw Error(ErrorCode::InvalidArgument, "gamma scan needs a non-empty g grid");
    HelicalModel reference = model;
    reference.g = 0.0;
    const double gamma0 = gamma_report(reference, params).gamma;
    const auto reports = parallel_map<bo::ValidityReport>(g_grid.size(), jobs, [&](std::size_t i) {
        HelicalModel m = model;
        m.g = g_grid[i];
        return gamma_report(m, params, gamma0);
    });
    ScanTable table({{"g", "muB"}, {"Gamma", "1"}, {"Gamma_normalized", "1"}, {"excluded_channels", "1"}});
    for (std::size_t i = 0; i < reports.size(); ++i)
        table.add_row({g_grid[i], reports[i].gamma, reports[i].normalized,
                       static_cast<double>(reports[i].excluded)});
    return table;
}

} // namespace openbo::helical
