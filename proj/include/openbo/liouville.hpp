// Vectorized master equations: density matrices become doubled kets of
// system (x) ancilla, and the Liouvillian becomes a non-Hermitian generator.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "openbo/linalg.hpp"

namespace openbo::liouville {

struct LindbladTerm {
    double rate = 0.0;
    ComplexMatrix jump;
};

struct LindbladSet {
    std::vector<LindbladTerm> terms;
};

// Quadratic generator C rho D^+ + D rho C^+ - {D^+ C, rho}/2 - {C^+ D, rho}/2.
// Not of Lindblad form in general; positivity is monitored, not enforced.
struct QuadraticPair {
    ComplexMatrix c;
    ComplexMatrix d;
};

using Dissipation = std::variant<std::monostate, LindbladSet, QuadraticPair>;
using HamiltonianFn = std::function<ComplexMatrix(double)>;

class OpenSystemModel {
public:
    OpenSystemModel(ComplexMatrix hamiltonian, Dissipation dissipation);
    // Time-dependent H(t); Hermiticity is checked at t = 0.
    OpenSystemModel(Eigen::Index dim, HamiltonianFn hamiltonian, Dissipation dissipation);

    Eigen::Index dim() const noexcept { return dim_; }
    ComplexMatrix hamiltonian(double t = 0.0) const { return hamiltonian_(t); }
    const Dissipation& dissipation() const noexcept { return dissipation_; }

private:
    void validate() const;

    Eigen::Index dim_;
    HamiltonianFn hamiltonian_;
    Dissipation dissipation_;
};

class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix rho);

    const ComplexMatrix& matrix() const noexcept { return rho_; }
    Eigen::Index dim() const noexcept { return rho_.rows(); }

private:
    ComplexMatrix rho_;
};

// Component m*N + n stores rho_mn.
struct DoubledKet {
    ComplexVector amplitudes;
};

struct EffectiveGenerator {
    ComplexMatrix matrix;
    ComplexMatrix system_part;       // H (x) I
    ComplexMatrix ancilla_part;      // I (x) H^A, entering with a minus sign
    ComplexMatrix dissipative_part;  // L_S for jump lists, L_C-style for quadratic pairs
};

// Raw row-major flattening, no validation.
ComplexVector flatten(const ComplexMatrix& m);
ComplexMatrix unflatten(const ComplexVector& v);

DoubledKet vectorize(const DensityMatrix& rho);
// `basis` columns are |E_m>; component (m, n) = <E_m|rho|E_n>.
DoubledKet vectorize(const DensityMatrix& rho, const ComplexMatrix& basis);
ComplexMatrix devectorize(const DoubledKet& ket);
ComplexMatrix devectorize(const DoubledKet& ket, const ComplexMatrix& basis);

// <<I|ket>>: sum of the (m, m) components.
cplx trace_functional(const DoubledKet& ket);

// O^A, the entrywise complex conjugate in the fixed basis.
ComplexMatrix ancilla_conjugate(const ComplexMatrix& o);

// Doubled-space dissipator for a single jump operator.
ComplexMatrix build_LS(double rate, const ComplexMatrix& jump);

ComplexMatrix dissipative_generator(const Dissipation& dissipation, Eigen::Index dim);

EffectiveGenerator build_effective_generator(const OpenSystemModel& model, double t = 0.0);

// H_T(t) as a callable, with the dissipative part assembled once.
linalg::TimeGenerator generator_function(const OpenSystemModel& model);

// The dissipator applied directly to a matrix.
ComplexMatrix apply_dissipator(const Dissipation& dissipation, const ComplexMatrix& rho);

// -i[H(t), rho] + D(rho).
ComplexMatrix master_rhs(const OpenSystemModel& model, const ComplexMatrix& rho, double t = 0.0);

ComplexMatrix evolve_direct(const DensityMatrix& rho0, const OpenSystemModel& model, double duration,
                            std::size_t steps);
ComplexMatrix evolve_vectorized(const DensityMatrix& rho0, const OpenSystemModel& model, double duration,
                                std::size_t steps);

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace openbo::liouville
