#include "openbo/bo_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace openbo::bo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTrackingFloor = 0.5;
constexpr double kBundleResidual = 1e-9;

double normalized_overlap(const ComplexVector& a, const ComplexVector& b)
{
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return std::abs(a.dot(b)) / (na * nb);
}

} // namespace

std::vector<std::size_t> match_levels(const std::vector<Level>& reference, const std::vector<Level>& candidates,
                                      double& worst)
{
    const std::size_t count = reference.size();
    if (candidates.size() != count)
        throw Error(ErrorCode::DimensionMismatch, "level count changed between points");
    std::vector<std::vector<double>> score(count, std::vector<double>(count));
    for (std::size_t a = 0; a < count; ++a)
        for (std::size_t b = 0; b < count; ++b)
            score[a][b] = normalized_overlap(reference[a].right, candidates[b].right);

    std::vector<std::size_t> result(count, count);
    std::vector<bool> used(count, false);
    worst = 1.0;
    for (std::size_t round = 0; round < count; ++round) {
        double best = -1.0;
        std::size_t best_a = 0, best_b = 0;
        for (std::size_t a = 0; a < count; ++a) {
            if (result[a] != count)
                continue;
            for (std::size_t b = 0; b < count; ++b)
                if (!used[b] && score[a][b] > best) {
                    best = score[a][b];
                    best_a = a;
                    best_b = b;
                }
        }
        result[best_a] = best_b;
        used[best_b] = true;
        worst = std::min(worst, best);
    }
    return result;
}

namespace {

double block_gap(const std::vector<Level>& levels)
{
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < levels.size(); ++a)
        for (std::size_t b = a + 1; b < levels.size(); ++b)
            gap = std::min(gap, std::abs(levels[a].energy - levels[b].energy));
    return gap;
}

struct OffGrid {
    std::vector<Level> levels;
    std::vector<std::size_t> index;   // bundle level n -> position in levels
};

// Source levels at an off-grid point, matched to the bundle's levels at grid point k.
OffGrid evaluate_near(const EigenBundle& bundle, std::size_t k, const SlowPoint& point)
{
    OffGrid out;
    out.levels = bundle.source->levels(point);
    const auto& here = bundle.levels[k];
    double worst = 1.0;
    out.index = match_levels(here, out.levels, worst);
    if (!bundle.source->fixes_gauge())
        for (std::size_t n = 0; n < here.size(); ++n)
            apply_gauge(out.levels[out.index[n]], bundle.reference_component[n]);
    return out;
}

std::vector<ComplexVector> rights_at(const EigenBundle& bundle, std::size_t k, const SlowPoint& point)
{
    const auto near = evaluate_near(bundle, k, point);
    std::vector<ComplexVector> out;
    for (std::size_t n = 0; n < bundle.level_count(); ++n)
        out.push_back(near.levels[near.index[n]].right);
    return out;
}

// Analytic first derivatives at an arbitrary point, reordered to bundle labels.
std::optional<std::vector<ComplexVector>> analytic_first(const EigenBundle& bundle, std::size_t k,
                                                         const SlowPoint& point, std::size_t j)
{
    if (!bundle.source->fixes_gauge())
        return std::nullopt;
    auto raw = bundle.source->right_derivatives(point, j);
    if (!raw)
        return std::nullopt;
    const auto near = evaluate_near(bundle, k, point);
    std::vector<ComplexVector> out;
    for (std::size_t n = 0; n < bundle.level_count(); ++n)
        out.push_back((*raw)[near.index[n]]);
    return out;
}

std::vector<ComplexVector> central_first(const EigenBundle& bundle, std::size_t k, std::size_t j, double h)
{
    const auto plus = rights_at(bundle, k, bundle.grid[k].shifted(j, h));
    const auto minus = rights_at(bundle, k, bundle.grid[k].shifted(j, -h));
    std::vector<ComplexVector> out;
    for (std::size_t n = 0; n < plus.size(); ++n)
        out.push_back((plus[n] - minus[n]) / (2.0 * h));
    return out;
}

std::vector<ComplexVector> central_second(const EigenBundle& bundle, std::size_t k, std::size_t j, double h)
{
    const auto& centre = bundle.levels[k];
    if (auto plus = analytic_first(bundle, k, bundle.grid[k].shifted(j, h), j)) {
        const auto minus = analytic_first(bundle, k, bundle.grid[k].shifted(j, -h), j);
        std::vector<ComplexVector> out;
        for (std::size_t n = 0; n < plus->size(); ++n)
            out.push_back(((*plus)[n] - (*minus)[n]) / (2.0 * h));
        return out;
    }
    const auto plus = rights_at(bundle, k, bundle.grid[k].shifted(j, h));
    const auto minus = rights_at(bundle, k, bundle.grid[k].shifted(j, -h));
    std::vector<ComplexVector> out;
    for (std::size_t n = 0; n < plus.size(); ++n)
        out.push_back((plus[n] - 2.0 * centre[n].right + minus[n]) / (h * h));
    return out;
}

template <typename Rule>
std::vector<ComplexVector> with_richardson(const EigenBundle& bundle, Rule rule)
{
    const double h = bundle.options.derivative.step;
    auto coarse = rule(h);
    if (!bundle.options.derivative.richardson)
        return coarse;
    const auto fine = rule(0.5 * h);
    for (std::size_t n = 0; n < coarse.size(); ++n)
        coarse[n] = (4.0 * fine[n] - coarse[n]) / 3.0;
    return coarse;
}

std::vector<ComplexVector> all_first(const EigenBundle& bundle, std::size_t k, std::size_t j)
{
    if (auto exact = analytic_first(bundle, k, bundle.grid[k], j))
        return *exact;
    return with_richardson(bundle, [&](double h) { return central_first(bundle, k, j, h); });
}

std::vector<ComplexVector> all_second(const EigenBundle& bundle, std::size_t k, std::size_t j)
{
    return with_richardson(bundle, [&](double h) { return central_second(bundle, k, j, h); });
}

ComplexMatrix sandwich(const std::vector<Level>& levels, const std::vector<ComplexVector>& derivatives)
{
    const auto count = static_cast<Eigen::Index>(levels.size());
    ComplexMatrix out(count, count);
    for (Eigen::Index m = 0; m < count; ++m)
        for (Eigen::Index n = 0; n < count; ++n)
            out(m, n) = levels[static_cast<std::size_t>(m)].left.dot(derivatives[static_cast<std::size_t>(n)]);
    return out;
}

void check_indices(const EigenBundle& bundle, std::size_t n, std::size_t k)
{
    if (k >= bundle.point_count() || n >= bundle.level_count())
        throw Error(ErrorCode::InvalidArgument, "level or grid index out of range");
}

cplx scaled_weight(const EigenBundle& bundle, std::size_t j)
{
    return bundle.grid.front().weight(j) * bundle.options.coordinate_scale;
}

} // namespace

double SlowPoint::coordinate(std::size_t j) const
{
    if (j < system.size())
        return system[j];
    if (j < size())
        return ancilla[j - system.size()];
    throw Error(ErrorCode::InvalidArgument, "slow coordinate index out of range");
}

SlowPoint SlowPoint::shifted(std::size_t j, double h) const
{
    SlowPoint out = *this;
    if (j < system.size())
        out.system[j] += h;
    else if (j < size())
        out.ancilla[j - system.size()] += h;
    else
        throw Error(ErrorCode::InvalidArgument, "slow coordinate index out of range");
    return out;
}

SlowPoint SlowPoint::reduced() const
{
    SlowPoint out = *this;
    if (!periodic)
        return out;
    auto wrap = [](double& x) {
        x = std::fmod(x, kTwoPi);
        if (x < 0.0)
            x += kTwoPi;
        if (x >= kTwoPi)
            x = 0.0;
    };
    std::for_each(out.system.begin(), out.system.end(), wrap);
    std::for_each(out.ancilla.begin(), out.ancilla.end(), wrap);
    return out;
}

cplx SlowPoint::weight(std::size_t j) const
{
    if (j >= size())
        throw Error(ErrorCode::InvalidArgument, "slow coordinate index out of range");
    if (j < system.size() || !complex_ancilla)
        return {1.0, 0.0};
    return -I_UNIT;
}

NumericSource::NumericSource(Eigen::Index dim, BlockFn block) : dim_(dim), block_(std::move(block))
{
    if (dim_ <= 0 || !block_)
        throw Error(ErrorCode::InvalidArgument, "numeric source needs a dimension and a block");
}

std::vector<Level> NumericSource::levels(const SlowPoint& point) const
{
    const ComplexMatrix a = block_(point);
    if (a.rows() != dim_ || a.cols() != dim_)
        throw Error(ErrorCode::DimensionMismatch, "block dimension differs from the source dimension");
    const auto spectrum = linalg::eig_general(a);
    std::vector<Level> out;
    for (const auto& pair : spectrum.pairs)
        out.push_back({pair.value, pair.right, pair.left});
    return out;
}

BlockFn doubled_block(std::function<ComplexMatrix(std::span<const double>)> hamiltonian, ComplexMatrix dissipative)
{
    return [hamiltonian = std::move(hamiltonian), dissipative = std::move(dissipative)](const SlowPoint& point) {
        const ComplexMatrix h = hamiltonian(point.system);
        const ComplexMatrix ha = hamiltonian(point.ancilla).conjugate();
        const ComplexMatrix id = ComplexMatrix::Identity(h.rows(), h.cols());
        return ComplexMatrix(linalg::kron(h, id) - linalg::kron(id, ha) + dissipative);
    };
}

ComplexMatrix spin_block(const EigenSource& source, const SlowPoint& point) { return source.block(point); }

void apply_gauge(Level& level, Eigen::Index anchor)
{
    const double nr = level.right.norm();
    const double nl = level.left.norm();
    if (nr == 0.0 || nl == 0.0)
        throw Error(ErrorCode::SingularPairing, "zero eigenvector cannot be gauge fixed");
    const double scale = std::sqrt(nl / nr);
    level.right *= scale;
    level.left /= scale;
    const cplx component = level.right(anchor);
    if (std::abs(component) > 0.0) {
        const cplx phase = std::conj(component) / std::abs(component);
        level.right *= phase;
        level.left *= phase;
    }
}

EigenBundle build_bundle(std::shared_ptr<const EigenSource> source, std::vector<SlowPoint> grid,
                         const BundleOptions& options)
{
    if (!source)
        throw Error(ErrorCode::InvalidArgument, "bundle needs an eigen source");
    if (grid.empty())
        throw Error(ErrorCode::InvalidArgument, "bundle grid is empty");
    if (!(options.mass > 0.0))
        throw Error(ErrorCode::InvalidArgument, "mass must be positive");

    EigenBundle bundle;
    bundle.source = std::move(source);
    bundle.options = options;
    bundle.min_gap = std::numeric_limits<double>::infinity();
    const auto coords = grid.front().size();
    for (auto& point : grid) {
        if (point.size() != coords)
            throw Error(ErrorCode::DimensionMismatch, "grid points differ in coordinate count");
        point = point.reduced();
    }
    bundle.grid = std::move(grid);

    for (std::size_t k = 0; k < bundle.grid.size(); ++k) {
        const ComplexMatrix block = bundle.source->block(bundle.grid[k]);
        auto raw = bundle.source->levels(bundle.grid[k]);
        if (static_cast<Eigen::Index>(raw.size()) != block.rows())
            throw Error(ErrorCode::DimensionMismatch, "source returned an incomplete level set");
        const double norm = block.norm();

        std::vector<Level> ordered;
        if (k == 0) {
            ordered = std::move(raw);
            bundle.reference_component.resize(ordered.size());
            for (std::size_t n = 0; n < ordered.size(); ++n) {
                Eigen::Index anchor = 0;
                ordered[n].right.cwiseAbs().maxCoeff(&anchor);
                bundle.reference_component[n] = anchor;
            }
        } else {
            double worst = 1.0;
            const auto index = match_levels(bundle.levels[k - 1], raw, worst);
            if (worst < kTrackingFloor)
                throw Error(ErrorCode::TrackingAmbiguity,
                            "maximal overlap " + std::to_string(worst) + " at grid point " + std::to_string(k));
            for (auto i : index)
                ordered.push_back(raw[i]);
        }
        if (!bundle.source->fixes_gauge())
            for (std::size_t n = 0; n < ordered.size(); ++n)
                apply_gauge(ordered[n], bundle.reference_component[n]);

        for (const auto& level : ordered) {
            const double residual = (block * level.right - level.energy * level.right).norm() / level.right.norm();
            if (residual > kBundleResidual * std::max(norm, 1e-300))
                throw Error(ErrorCode::ConvergenceFailure, "eigenbundle residual too large at grid point " +
                                                               std::to_string(k));
        }
        const double gap = block_gap(ordered);
        bundle.min_gap = std::min(bundle.min_gap, gap);
        if (options.strict && gap < options.degeneracy_threshold * norm)
            throw Error(ErrorCode::NearDegenerate, "eigenvalue gap " + std::to_string(gap) + " at grid point " +
                                                       std::to_string(k));
        if (k > 0)
            for (std::size_t n = 0; n < ordered.size(); ++n)
                if (!(bundle.levels[k - 1][n].right.dot(ordered[n].right).real() > 0.0))
                    bundle.gauge_continuous = false;
        bundle.levels.push_back(std::move(ordered));
    }
    return bundle;
}

DerivativeTables derivative_tables(const EigenBundle& bundle, std::size_t k)
{
    check_indices(bundle, 0, k);
    DerivativeTables out;
    for (std::size_t j = 0; j < bundle.coordinate_count(); ++j) {
        out.first.push_back(sandwich(bundle.levels[k], all_first(bundle, k, j)));
        out.second.push_back(sandwich(bundle.levels[k], all_second(bundle, k, j)));
    }
    return out;
}

ComplexVector right_derivative(const EigenBundle& bundle, std::size_t n, std::size_t k, std::size_t j)
{
    check_indices(bundle, n, k);
    return all_first(bundle, k, j)[n];
}

ComplexVector right_second_derivative(const EigenBundle& bundle, std::size_t n, std::size_t k, std::size_t j)
{
    check_indices(bundle, n, k);
    return all_second(bundle, k, j)[n];
}

namespace {

std::vector<cplx> connection_from(const EigenBundle& bundle, const DerivativeTables& tables, std::size_t n)
{
    std::vector<cplx> out;
    for (std::size_t j = 0; j < tables.first.size(); ++j) {
        const auto nn = static_cast<Eigen::Index>(n);
        out.push_back(I_UNIT * scaled_weight(bundle, j) * tables.first[j](nn, nn));
    }
    return out;
}

std::vector<cplx> f_components_from(const EigenBundle& bundle, const DerivativeTables& tables, std::size_t n)
{
    const double prefactor = -1.0 / (2.0 * bundle.options.mass);
    const auto nn = static_cast<Eigen::Index>(n);
    std::vector<cplx> out;
    for (std::size_t j = 0; j < tables.first.size(); ++j) {
        const cplx w = scaled_weight(bundle, j);
        cplx sum{0.0, 0.0};
        for (Eigen::Index m = 0; m < tables.first[j].rows(); ++m)
            if (m != nn)
                sum += tables.first[j](nn, m) * tables.first[j](m, nn);
        out.push_back(prefactor * w * w * sum);
    }
    return out;
}

CouplingO coupling_from(const EigenBundle& bundle, const DerivativeTables& tables, std::size_t n, std::size_t m)
{
    const double prefactor = -1.0 / (2.0 * bundle.options.mass);
    const auto nn = static_cast<Eigen::Index>(n);
    const auto mm = static_cast<Eigen::Index>(m);
    CouplingO out{{}, {0.0, 0.0}};
    for (std::size_t j = 0; j < tables.first.size(); ++j) {
        const cplx w = scaled_weight(bundle, j);
        out.first_derivative.push_back(prefactor * 2.0 * w * tables.first[j](nn, mm));
        out.scalar += prefactor * w * w * tables.second[j](nn, mm);
    }
    return out;
}

} // namespace

std::vector<cplx> connection(const EigenBundle& bundle, std::size_t n, std::size_t k)
{
    check_indices(bundle, n, k);
    return connection_from(bundle, derivative_tables(bundle, k), n);
}

std::vector<cplx> geometric_F_components(const EigenBundle& bundle, std::size_t n, std::size_t k)
{
    check_indices(bundle, n, k);
    return f_components_from(bundle, derivative_tables(bundle, k), n);
}

cplx geometric_F(const EigenBundle& bundle, std::size_t n, std::size_t k)
{
    const auto parts = geometric_F_components(bundle, n, k);
    return std::accumulate(parts.begin(), parts.end(), cplx{0.0, 0.0});
}

CouplingO coupling_O(const EigenBundle& bundle, std::size_t n, std::size_t m, std::size_t k)
{
    check_indices(bundle, n, k);
    check_indices(bundle, m, k);
    if (n == m)
        throw Error(ErrorCode::DiagonalRequest, "coupling_O needs two distinct levels");
    return coupling_from(bundle, derivative_tables(bundle, k), n, m);
}

cplx ZerothHamiltonian::energy(std::span<const cplx> kappa, std::size_t k) const
{
    if (k >= potential.size())
        throw Error(ErrorCode::InvalidArgument, "grid index out of range");
    const auto& a = connection[k];
    if (kappa.size() != a.size())
        throw Error(ErrorCode::DimensionMismatch, "momentum has the wrong number of components");
    cplx kinetic{0.0, 0.0};
    for (std::size_t j = 0; j < a.size(); ++j)
        kinetic += (kappa[j] - a[j]) * (kappa[j] - a[j]);
    return kinetic_prefactor * kinetic + potential[k];
}

cplx ZerothHamiltonian::mean_energy(std::span<const cplx> kappa) const
{
    if (potential.empty())
        throw Error(ErrorCode::InvalidArgument, "empty zeroth-order Hamiltonian");
    const auto count = static_cast<double>(potential.size());
    std::vector<cplx> mean_a(connection.front().size(), cplx{0.0, 0.0});
    cplx mean_v{0.0, 0.0};
    for (std::size_t k = 0; k < potential.size(); ++k) {
        for (std::size_t j = 0; j < mean_a.size(); ++j)
            mean_a[j] += connection[k][j] / count;
        mean_v += potential[k] / count;
    }
    if (kappa.size() != mean_a.size())
        throw Error(ErrorCode::DimensionMismatch, "momentum has the wrong number of components");
    cplx kinetic{0.0, 0.0};
    for (std::size_t j = 0; j < mean_a.size(); ++j)
        kinetic += (kappa[j] - mean_a[j]) * (kappa[j] - mean_a[j]);
    return kinetic_prefactor * kinetic + mean_v;
}

namespace {

struct LoopData {
    std::vector<DerivativeTables> tables;
    std::vector<ZerothHamiltonian> zeroth;
};

ZerothHamiltonian zeroth_from(const EigenBundle& bundle, const std::vector<DerivativeTables>& tables, std::size_t n)
{
    ZerothHamiltonian h;
    h.kinetic_prefactor = 1.0 / (2.0 * bundle.options.mass);
    for (std::size_t k = 0; k < bundle.point_count(); ++k) {
        h.connection.push_back(connection_from(bundle, tables[k], n));
        h.potential.push_back(bundle.levels[k][n].energy);
    }
    return h;
}

LoopData loop_data(const EigenBundle& bundle)
{
    LoopData data;
    for (std::size_t k = 0; k < bundle.point_count(); ++k)
        data.tables.push_back(derivative_tables(bundle, k));
    for (std::size_t n = 0; n < bundle.level_count(); ++n)
        data.zeroth.push_back(zeroth_from(bundle, data.tables, n));
    return data;
}

// s-th harmonic of samples along a uniformly sampled loop; plain mean otherwise.
cplx harmonic(const std::vector<cplx>& samples, int s, bool loop)
{
    const auto count = samples.size();
    cplx sum{0.0, 0.0};
    for (std::size_t l = 0; l < count; ++l) {
        const double angle = loop ? kTwoPi * static_cast<double>(l) / static_cast<double>(count) : 0.0;
        sum += samples[l] * std::polar(1.0, -static_cast<double>(s) * angle);
    }
    return sum / static_cast<double>(count);
}

std::vector<Channel> channels_from(const EigenBundle& bundle, const LoopData& data, std::size_t n,
                                   const ChannelSpec& spec)
{
    const auto coords = bundle.coordinate_count();
    if (spec.kappa.size() != coords || spec.transfer.size() != coords)
        throw Error(ErrorCode::DimensionMismatch, "channel momenta need one component per slow coordinate");
    const std::size_t levels = bundle.level_count();
    if (spec.extra_coupling &&
        (spec.extra_coupling->rows() != static_cast<Eigen::Index>(levels) ||
         spec.extra_coupling->cols() != static_cast<Eigen::Index>(levels)))
        throw Error(ErrorCode::DimensionMismatch, "extra coupling must be level x level");
    if (spec.extra_energy && spec.extra_energy->size() != levels)
        throw Error(ErrorCode::DimensionMismatch, "extra energies need one entry per level");
    const int window = bundle.options.loop ? std::max(0, spec.window) : 0;

    auto extra_energy = [&](std::size_t level) {
        return spec.extra_energy ? (*spec.extra_energy)[level] : cplx{0.0, 0.0};
    };
    const cplx source_energy = data.zeroth[n].mean_energy(spec.kappa) + extra_energy(n);

    std::vector<Channel> out;
    for (std::size_t target = 0; target < levels; ++target) {
        // Samples of the perturbation coupling `target` <- n along the loop.
        std::vector<cplx> samples;
        for (std::size_t k = 0; k < bundle.point_count(); ++k) {
            if (target == n) {
                const auto parts = f_components_from(bundle, data.tables[k], n);
                samples.push_back(std::accumulate(parts.begin(), parts.end(), cplx{0.0, 0.0}));
            } else {
                const auto o = coupling_from(bundle, data.tables[k], target, n);
                cplx value = o.scalar;
                for (std::size_t j = 0; j < coords; ++j)
                    value += o.first_derivative[j] * I_UNIT * spec.kappa[j];
                samples.push_back(value);
            }
        }
        for (int s = -window; s <= window; ++s) {
            if (target == n && s == 0)
                continue;
            std::vector<cplx> kappa_out(coords);
            for (std::size_t j = 0; j < coords; ++j)
                kappa_out[j] = spec.kappa[j] + static_cast<double>(s) * spec.transfer[j];
            Channel channel;
            channel.from = n;
            channel.to = target;
            channel.shift = s;
            channel.numerator = harmonic(samples, s, bundle.options.loop);
            if (s == 0 && spec.extra_coupling)
                channel.numerator += (*spec.extra_coupling)(static_cast<Eigen::Index>(target),
                                                            static_cast<Eigen::Index>(n));
            channel.denominator = data.zeroth[target].mean_energy(kappa_out) + extra_energy(target) - source_energy;
            if (std::abs(channel.denominator) < kSmallDenominator) {
                channel.excluded = true;
                channel.ratio = cplx{0.0, 0.0};
            } else {
                channel.ratio = channel.numerator / channel.denominator;
            }
            out.push_back(channel);
        }
    }
    return out;
}

} // namespace

ZerothHamiltonian zeroth_hamiltonian(const EigenBundle& bundle, std::size_t n)
{
    check_indices(bundle, n, 0);
    std::vector<DerivativeTables> tables;
    for (std::size_t k = 0; k < bundle.point_count(); ++k)
        tables.push_back(derivative_tables(bundle, k));
    return zeroth_from(bundle, tables, n);
}

std::vector<Channel> first_order_correction(const EigenBundle& bundle, std::size_t n, const ChannelSpec& spec)
{
    check_indices(bundle, n, 0);
    const auto data = loop_data(bundle);
    auto channels = channels_from(bundle, data, n, spec);
    for (const auto& channel : channels)
        if (channel.excluded)
            throw Error(ErrorCode::SmallDenominator,
                        "denominator " + std::to_string(std::abs(channel.denominator)) + " for channel " +
                            std::to_string(channel.from) + "->" + std::to_string(channel.to) +
                            " shift " + std::to_string(channel.shift));
    return channels;
}

ValidityReport gamma_measure(const EigenBundle& bundle, const ChannelSpec& spec, std::optional<double> gamma0)
{
    const auto data = loop_data(bundle);
    ValidityReport report;
    report.window = bundle.options.loop ? std::max(0, spec.window) : 0;
    report.momentum_set = "plane waves kappa + s*transfer, |s| <= " + std::to_string(report.window) +
                          (bundle.options.loop ? ", loop harmonics" : ", single point");
    for (std::size_t n = 0; n < bundle.level_count(); ++n) {
        auto channels = channels_from(bundle, data, n, spec);
        for (auto& channel : channels) {
            if (channel.excluded)
                ++report.excluded;
            else
                report.gamma = std::max(report.gamma, std::abs(channel.ratio));
            report.channels.push_back(channel);
        }
    }
    if (gamma0 && *gamma0 > 0.0)
        report.normalized = report.gamma / *gamma0;
    else
        report.normalized = report.gamma > 0.0 ? 1.0 : 0.0;
    return report;
}

} // namespace openbo::bo
