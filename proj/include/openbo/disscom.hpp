// Quadratic (non-Lindblad) center-of-mass dissipation in a truncated
// harmonic-oscillator basis, its doubled-space generator and the
// corresponding validity measure.

#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "openbo/bo_core.hpp"
#include "openbo/liouville.hpp"

namespace openbo::disscom {

// Oscillator units: mass * frequency = 1, hbar = 1.
struct MotionBasis {
    std::size_t n_max = 0;
    ComplexMatrix x;
    ComplexMatrix p;
};

struct DissCOMRates {
    double gamma1 = 0.0;   // position diffusion
    double gamma2 = 0.0;   // friction
};

MotionBasis xp_matrices(std::size_t n_max);

// C = sqrt(g1) x, D = sqrt(g1) x - (g2 / sqrt(g1)) p.
liouville::QuadraticPair build_CD(const DissCOMRates& rates, const MotionBasis& basis);

// g1 (2 x rho x - rho x^2 - x^2 rho) + g2 (x p rho + rho p x - x rho p - p rho x).
ComplexMatrix disscom_rhs(const ComplexMatrix& rho, const DissCOMRates& rates, const MotionBasis& basis);

// Doubled-space generator, i * vec(disscom_rhs) on the truncation interior.
ComplexMatrix build_LC(const MotionBasis& basis, const DissCOMRates& rates);

// <chi_m (x) chi_n^A | L_C | chi_p (x) chi_q^A>, with chi^A = conj(chi).
cplx lc_matrix_element(const ComplexMatrix& lc, const ComplexVector& chi_m, const ComplexVector& chi_n,
                       const ComplexVector& chi_p, const ComplexVector& chi_q);

// All elements over pairs (m, n), m-major: row m * K + n, column p * K + q.
ComplexMatrix lc_level_table(const ComplexMatrix& lc, std::span<const ComplexVector> chis);

// Spin-only report with L_C added to the perturbation and to the zeroth-order
// energies. The table must be level x level for the bundle.
bo::ValidityReport disscom_validity(const bo::EigenBundle& bundle, const ComplexMatrix& lc_table,
                                    const bo::ChannelSpec& spec, std::optional<double> gamma0 = std::nullopt);

// Lowest `count` oscillator eigenstates as basis vectors.
std::vector<ComplexVector> oscillator_states(const MotionBasis& basis, std::size_t count);

} // namespace openbo::disscom
