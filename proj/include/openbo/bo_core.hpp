// Born-Oppenheimer machinery for doubled (system (x) ancilla) spin blocks:
// eigenbundles over slow coordinates, geometric potentials and the
// first-order validity measure.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "openbo/linalg.hpp"

namespace openbo::bo {

// Real slow coordinates. Internally the ancilla block is addressed through
// r = (x, i x^A), so d/dr_A = -i d/dx^A.
struct SlowPoint {
    std::vector<double> system;
    std::vector<double> ancilla;
    bool periodic = true;           // angular coordinates, reduced to [0, 2pi)
    bool complex_ancilla = true;    // apply the r = (x, i x^A) weighting

    std::size_t size() const noexcept { return system.size() + ancilla.size(); }
    double coordinate(std::size_t j) const;
    SlowPoint shifted(std::size_t j, double h) const;
    SlowPoint reduced() const;
    // Derivative weight of coordinate j: 1 for system, -i for ancilla.
    cplx weight(std::size_t j) const;
};

struct Level {
    cplx energy;
    ComplexVector right;
    ComplexVector left;   // ket, left.dot(right) == 1
};

class EigenSource {
public:
    virtual ~EigenSource() = default;

    virtual Eigen::Index dimension() const = 0;
    virtual ComplexMatrix block(const SlowPoint& point) const = 0;
    // Biorthonormal levels at the point, in the source's own order.
    virtual std::vector<Level> levels(const SlowPoint& point) const = 0;
    // True when levels() already carries a smooth, balanced gauge.
    virtual bool fixes_gauge() const { return false; }
    // d right / d coordinate j for each entry of levels(point), when known.
    virtual std::optional<std::vector<ComplexVector>> right_derivatives(const SlowPoint& point,
                                                                        std::size_t j) const
    {
        (void)point;
        (void)j;
        return std::nullopt;
    }
};

using BlockFn = std::function<ComplexMatrix(const SlowPoint&)>;

// Diagonalizes block(point) with eig_general.
class NumericSource final : public EigenSource {
public:
    NumericSource(Eigen::Index dim, BlockFn block);

    Eigen::Index dimension() const override { return dim_; }
    ComplexMatrix block(const SlowPoint& point) const override { return block_(point); }
    std::vector<Level> levels(const SlowPoint& point) const override;

private:
    Eigen::Index dim_;
    BlockFn block_;
};

// H(x) (x) I - I (x) conj(H(x^A)) + dissipative, for a system Hamiltonian
// that depends on one slow coordinate block.
BlockFn doubled_block(std::function<ComplexMatrix(std::span<const double>)> hamiltonian,
                      ComplexMatrix dissipative);

ComplexMatrix spin_block(const EigenSource& source, const SlowPoint& point);

struct DerivativeOptions {
    double step = 1e-4;
    bool richardson = false;
};

struct BundleOptions {
    bool strict = false;
    double degeneracy_threshold = 1e-8;   // relative to ||block||_F
    double mass = 1.0;
    double coordinate_scale = 1.0;        // d(coordinate)/d(length), e.g. 2pi/L
    bool loop = false;                    // grid samples a closed loop uniformly
    DerivativeOptions derivative;
};

struct EigenBundle {
    std::shared_ptr<const EigenSource> source;
    std::vector<SlowPoint> grid;
    std::vector<std::vector<Level>> levels;        // [point][level]
    std::vector<Eigen::Index> reference_component; // numeric gauge anchor per level
    BundleOptions options;
    bool gauge_continuous = true;
    double min_gap = 0.0;

    std::size_t level_count() const { return levels.empty() ? 0 : levels.front().size(); }
    std::size_t point_count() const { return grid.size(); }
    std::size_t coordinate_count() const { return grid.empty() ? 0 : grid.front().size(); }
};

// Greedy maximal-overlap assignment of right vectors: result[n] is the index
// in `candidates` matched to reference level n; `worst` receives the smallest
// normalized overlap used.
std::vector<std::size_t> match_levels(const std::vector<Level>& reference, const std::vector<Level>& candidates,
                                      double& worst);

// Balanced biorthonormal scaling ||right|| = ||left||, then right[anchor] real positive.
void apply_gauge(Level& level, Eigen::Index anchor);

EigenBundle build_bundle(std::shared_ptr<const EigenSource> source, std::vector<SlowPoint> grid,
                         const BundleOptions& options = {});

// <L_m | d_j R_n> at grid point k, unweighted and unscaled, one matrix per coordinate.
struct DerivativeTables {
    std::vector<ComplexMatrix> first;
    std::vector<ComplexMatrix> second;
};

DerivativeTables derivative_tables(const EigenBundle& bundle, std::size_t k);

// Derivative of level n's right vector at grid point k along coordinate j.
ComplexVector right_derivative(const EigenBundle& bundle, std::size_t n, std::size_t k, std::size_t j);
ComplexVector right_second_derivative(const EigenBundle& bundle, std::size_t n, std::size_t k, std::size_t j);

// i <L_n | d_r R_n> per coordinate, weighted and scaled.
std::vector<cplx> connection(const EigenBundle& bundle, std::size_t n, std::size_t k);

cplx geometric_F(const EigenBundle& bundle, std::size_t n, std::size_t k);
// Per-coordinate contributions to F; they sum to geometric_F.
std::vector<cplx> geometric_F_components(const EigenBundle& bundle, std::size_t n, std::size_t k);

struct CouplingO {
    std::vector<cplx> first_derivative;   // multiplies d/dr_j
    cplx scalar;
};

CouplingO coupling_O(const EigenBundle& bundle, std::size_t n, std::size_t m, std::size_t k);

struct ZerothHamiltonian {
    double kinetic_prefactor = 0.5;            // 1 / 2M
    std::vector<std::vector<cplx>> connection; // per point, per coordinate
    std::vector<cplx> potential;               // V + E_n per point

    // sum_j (kappa_j - A_j)^2 / 2M + V + E_n at grid point k.
    cplx energy(std::span<const cplx> kappa, std::size_t k) const;
    // Same with loop-averaged connection and potential.
    cplx mean_energy(std::span<const cplx> kappa) const;
};

ZerothHamiltonian zeroth_hamiltonian(const EigenBundle& bundle, std::size_t n);

// Plane-wave channels. Target momenta are kappa + s * transfer, |s| <= window;
// the coupling enters through its s-th Fourier harmonic along the loop.
struct ChannelSpec {
    std::vector<cplx> kappa;
    std::vector<cplx> transfer;
    int window = 8;
    // Optional extra perturbation (constant along the loop) added to the s = 0
    // numerators, and per-level additions to the zeroth-order energies.
    std::optional<ComplexMatrix> extra_coupling;
    std::optional<std::vector<cplx>> extra_energy;
};

struct Channel {
    std::size_t from = 0;
    std::size_t to = 0;
    int shift = 0;
    cplx numerator;
    cplx denominator;
    cplx ratio;
    bool excluded = false;
};

struct ValidityReport {
    std::vector<Channel> channels;
    double gamma = 0.0;
    double normalized = 1.0;
    std::size_t excluded = 0;
    int window = 0;
    std::string momentum_set;
};

inline constexpr double kSmallDenominator = 1e-10;

// Channels out of level n. Throws SmallDenominator on a vanishing denominator.
std::vector<Channel> first_order_correction(const EigenBundle& bundle, std::size_t n, const ChannelSpec& spec);

// Max |ratio| over all channels; small denominators are excluded and counted.
// `gamma0` normalizes the result when given and positive.
ValidityReport gamma_measure(const EigenBundle& bundle, const ChannelSpec& spec,
                             std::optional<double> gamma0 = std::nullopt);

} // namespace openbo::bo
