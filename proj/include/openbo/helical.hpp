// Spin-1/2 particle dragged through a helical magnetic field with spin
// relaxation: analytic doubled-space spectrum, steady state, polarization
// dynamics and the validity scan.

#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include "openbo/bo_core.hpp"
#include "openbo/liouville.hpp"
#include "openbo/scan.hpp"

namespace openbo::helical {

struct HelicalModel {
    double B = 1.0;
    double mu = 1.0;
    double theta = 1.5707963267948966;
    double L = 1.0;
    double M = 1.0;
    double g = 0.0;   // relaxation rate in units of mu * B

    double muB() const noexcept { return mu * B; }
    void validate() const;
};

std::array<double, 3> helical_B(const HelicalModel& model, double z);

struct ChiEigensystem {
    ComplexVector chi1;
    ComplexVector chi2;
    double eps1 = 0.0;
    double eps2 = 0.0;
};

ChiEigensystem chi_eigensystem(const HelicalModel& model, double z);

// H_S / (mu B) for field angle phi (= 2 pi z / L) and tilt theta.
ComplexMatrix spin_hamiltonian(double theta, double phi);

// Doubled spin block in units of mu B, typed entrywise.
ComplexMatrix hst_matrix(double phi, double phi_a, double theta, double g);

// The same block assembled through the generic vectorization.
ComplexMatrix hst_from_liouville(double phi, double phi_a, double theta, double g);

// theta = pi/2: {-ig/2, cubic roots by descending real part}.
std::array<cplx, 4> spectrum_analytic(double phi, double phi_a, double g);

// Closed-form eigenvector j (0-based, same order as spectrum_analytic).
// right = (A, B, C, D); left is the ket conj((a, b, c, d) / N).
struct AnalyticPair {
    cplx value;
    ComplexVector right;
    ComplexVector left;
    cplx norm;   // N_j
};

AnalyticPair eigvecs_analytic(std::size_t j, double phi, double phi_a, double g);

// Slow coordinates (phi, phi^A). Levels in spectrum_analytic order with the
// closed-form phases, balanced moduli and exact first derivatives.
class HelicalAnalyticSource final : public bo::EigenSource {
public:
    explicit HelicalAnalyticSource(double g, double muB = 1.0);

    Eigen::Index dimension() const override { return 4; }
    ComplexMatrix block(const bo::SlowPoint& point) const override;
    std::vector<bo::Level> levels(const bo::SlowPoint& point) const override;
    bool fixes_gauge() const override { return true; }
    std::optional<std::vector<ComplexVector>> right_derivatives(const bo::SlowPoint& point,
                                                                std::size_t j) const override;

private:
    double g_;
    double muB_;
};

std::shared_ptr<bo::NumericSource> numeric_source(double theta, double g, double muB = 1.0);

bo::SlowPoint slow_point(double phi, double phi_a);

// Steady state at phi = phi^A from the zero mode of the doubled block.
liouville::DensityMatrix steady_state(double g, double phi = 0.0, double theta = 1.5707963267948966,
                                      bool strict = false);

liouville::OpenSystemModel drive_model(const HelicalModel& model, double duration);

enum class Dynamics {
    BornOppenheimer,   // zeroth order: each doubled mode transported adiabatically
    Exact,             // full vectorized master equation
};

struct DriveProtocol {
    double duration = 1.0;       // mu B * T
    std::size_t steps = 0;       // 0: default resolution
    std::size_t samples = 100;
    Dynamics dynamics = Dynamics::BornOppenheimer;
};

struct PolarizationTrace {
    std::vector<std::array<double, 2>> samples;   // (mu B t, P_z)
    double final_pz = 1.0;
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
};

PolarizationTrace polarization_run(const HelicalModel& model, const DriveProtocol& protocol);

// Figure generators. Durations are in units of pi / (mu B).
ScanTable pz_surface(const HelicalModel& model, const std::vector<double>& g_grid,
                     const std::vector<double>& t_grid, const DriveProtocol& protocol, std::size_t jobs = 1);

ScanTable pz_vs_gT(const HelicalModel& model, const std::vector<double>& g_list,
                   const std::vector<double>& gt_grid, const DriveProtocol& protocol, std::size_t jobs = 1);

struct GammaParams {
    double alpha = 1e-6;   // 1 / (mu B M^2 L)
    double beta = 2e-4;    // k_z / (mu B M L)
    std::size_t loop_points = 16;
    int window = 8;
};

// M and k_z from the dimensionless pair at fixed mu B and L.
double gamma_mass(const HelicalModel& model, const GammaParams& params);
double gamma_momentum(const HelicalModel& model, const GammaParams& params);

bo::EigenBundle helical_loop_bundle(const HelicalModel& model, const GammaParams& params);
bo::ChannelSpec helical_channels(const HelicalModel& model, const GammaParams& params);

bo::ValidityReport gamma_report(const HelicalModel& model, const GammaParams& params,
                                std::optional<double> gamma0 = std::nullopt);

ScanTable gamma_scan(const HelicalModel& model, const std::vector<double>& g_grid, const GammaParams& params,
                     std::size_t jobs = 1);

} // namespace openbo::helical
