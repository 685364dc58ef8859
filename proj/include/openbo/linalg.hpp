// Dense complex linear algebra: biorthogonal eigen-decomposition,
// closed-form polynomial roots and a fixed-step RK4 propagator.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "openbo/error.hpp"

namespace openbo {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cplx I_UNIT{0.0, 1.0};

namespace linalg {

// One eigen-triple. `left` is stored as a ket: <left| = left.adjoint(),
// so the biorthonormality condition reads left.dot(right) == 1.
struct EigenPair {
    cplx value;
    ComplexVector right;
    ComplexVector left;
};

struct Spectrum {
    std::vector<EigenPair> pairs;
    double gap = 0.0;  // smallest pairwise |value_i - value_j|; +inf for 1x1
};

struct EigOptions {
    double tol = 1e-10;                    // residual tolerance relative to ||A||
    bool strict = false;                   // raise NearDegenerate when gap is below threshold
    double degeneracy_threshold = 1e-8;    // relative to ||A||
};

// Roots of E^3 + c2 E^2 + c1 E + c0, each polished by one Newton step.
std::array<cplx, 3> solve_cubic(cplx c2, cplx c1, cplx c0);

// Roots of E^4 + c3 E^3 + c2 E^2 + c1 E + c0 (Ferrari), Newton-polished.
std::array<cplx, 4> solve_quartic(cplx c3, cplx c2, cplx c1, cplx c0);

// Monic characteristic polynomial coefficients c_0..c_{n-1} (Faddeev-LeVerrier).
std::vector<cplx> characteristic_polynomial(const ComplexMatrix& a);

Spectrum eig_general(const ComplexMatrix& a, const EigOptions& options = {});

// Rescales the lefts so that <left_m|right_n> = delta_mn. Rights are returned
// unchanged. Throws SingularPairing if the overlap matrix is rank deficient.
void biorthonormalize(std::vector<ComplexVector>& rights, std::vector<ComplexVector>& lefts);

// Largest |<left_m|right_n> - delta_mn| over the whole overlap matrix.
double biorthonormality_defect(const std::vector<ComplexVector>& rights,
                               const std::vector<ComplexVector>& lefts);

using TimeGenerator = std::function<ComplexMatrix(double)>;

// Fixed-step RK4 for i d/dt psi = H(t) psi. `steps` equal slices of [t0, t1].
ComplexVector propagate_steps(const TimeGenerator& generator, const ComplexVector& psi0,
                              double t0, double t1, std::size_t steps);

// Same, with the step count derived from dt (ceil((t1 - t0) / dt), at least one).
ComplexVector propagate(const TimeGenerator& generator, const ComplexVector& psi0,
                        double t0, double t1, double dt);

// Default integrator resolution: 2000 steps per unit of (energy scale) * time.
std::size_t default_steps(double duration, double energy_scale = 1.0);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& a, double tol);

} // namespace linalg
} // namespace openbo
