#include "openbo/liouville.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace openbo::liouville {
namespace {

constexpr double kHermitianTol = 1e-12;

void check_square(const ComplexMatrix& m, Eigen::Index dim, const char* what)
{
    if (m.rows() != dim || m.cols() != dim)
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has the wrong shape");
}

ComplexMatrix checked_overflow(ComplexMatrix m, double t)
{
    const double largest = m.cwiseAbs().maxCoeff();
    if (!std::isfinite(largest) || largest > 1e12)
        throw Error(ErrorCode::StepOverflow, "density matrix entry exceeded 1e12 at t=" + std::to_string(t));
    return m;
}

} // namespace

OpenSystemModel::OpenSystemModel(ComplexMatrix hamiltonian, Dissipation dissipation)
    : dim_(hamiltonian.rows()),
      hamiltonian_([h = std::move(hamiltonian)](double) { return h; }),
      dissipation_(std::move(dissipation))
{
    validate();
}

OpenSystemModel::OpenSystemModel(Eigen::Index dim, HamiltonianFn hamiltonian, Dissipation dissipation)
    : dim_(dim), hamiltonian_(std::move(hamiltonian)), dissipation_(std::move(dissipation))
{
    validate();
}

void OpenSystemModel::validate() const
{
    if (dim_ <= 0)
        throw Error(ErrorCode::InvalidArgument, "model dimension must be positive");
    const ComplexMatrix h = hamiltonian_(0.0);
    check_square(h, dim_, "hamiltonian");
    if (!h.allFinite() || !linalg::is_hermitian(h, kHermitianTol))
        throw Error(ErrorCode::InvalidArgument, "hamiltonian is not Hermitian");

    if (const auto* set = std::get_if<LindbladSet>(&dissipation_)) {
        for (const auto& term : set->terms) {
            if (!(term.rate >= 0.0) || !std::isfinite(term.rate))
                throw Error(ErrorCode::InvalidRates, "Lindblad rates must be finite and non-negative");
            check_square(term.jump, dim_, "jump operator");
        }
    } else if (const auto* pair = std::get_if<QuadraticPair>(&dissipation_)) {
        check_square(pair->c, dim_, "C");
        check_square(pair->d, dim_, "D");
        if (!linalg::is_hermitian(pair->c, kHermitianTol) || !linalg::is_hermitian(pair->d, kHermitianTol))
            throw Error(ErrorCode::InvalidArgument, "C and D must be Hermitian");
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho))
{
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0)
        throw Error(ErrorCode::DimensionMismatch, "density matrix must be square");
    if (!rho_.allFinite())
        throw Error(ErrorCode::InvalidArgument, "density matrix has non-finite entries");
    if (!linalg::is_hermitian(rho_, 1e-10))
        throw Error(ErrorCode::InvalidArgument, "density matrix is not Hermitian");
    if (std::abs(rho_.trace() - 1.0) > 1e-10)
        throw Error(ErrorCode::InvalidArgument, "density matrix trace differs from 1");
    const ComplexMatrix hermitian = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-8)
        throw Error(ErrorCode::InvalidArgument, "density matrix has a negative eigenvalue");
}

ComplexVector flatten(const ComplexMatrix& m)
{
    ComplexVector v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            v(i * m.cols() + j) = m(i, j);
    return v;
}

ComplexMatrix unflatten(const ComplexVector& v)
{
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size())
        throw Error(ErrorCode::DimensionMismatch, "vector length is not a perfect square");
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = v(i * n + j);
    return m;
}

namespace {

void check_basis(const ComplexMatrix& basis, Eigen::Index dim)
{
    check_square(basis, dim, "basis");
    const ComplexMatrix gram = basis.adjoint() * basis;
    if ((gram - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10)
        throw Error(ErrorCode::InvalidArgument, "basis is not orthonormal");
}

} // namespace

DoubledKet vectorize(const DensityMatrix& rho) { return {flatten(rho.matrix())}; }

DoubledKet vectorize(const DensityMatrix& rho, const ComplexMatrix& basis)
{
    check_basis(basis, rho.dim());
    return {flatten(basis.adjoint() * rho.matrix() * basis)};
}

ComplexMatrix devectorize(const DoubledKet& ket) { return unflatten(ket.amplitudes); }

ComplexMatrix devectorize(const DoubledKet& ket, const ComplexMatrix& basis)
{
    const ComplexMatrix components = unflatten(ket.amplitudes);
    check_basis(basis, components.rows());
    return basis * components * basis.adjoint();
}

cplx trace_functional(const DoubledKet& ket)
{
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(ket.amplitudes.size()))));
    if (n * n != ket.amplitudes.size())
        throw Error(ErrorCode::DimensionMismatch, "doubled ket length is not a perfect square");
    cplx sum{0.0, 0.0};
    for (Eigen::Index m = 0; m < n; ++m)
        sum += ket.amplitudes(m * n + m);
    return sum;
}

ComplexMatrix ancilla_conjugate(const ComplexMatrix& o)
{
    if (o.rows() != o.cols())
        throw Error(ErrorCode::DimensionMismatch, "ancilla_conjugate needs a square operator");
    return o.conjugate();
}

ComplexMatrix build_LS(double rate, const ComplexMatrix& jump)
{
    if (jump.rows() != jump.cols())
        throw Error(ErrorCode::DimensionMismatch, "jump operator must be square");
    if (!(rate >= 0.0))
        throw Error(ErrorCode::InvalidRates, "rate must be non-negative");
    const auto n = jump.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix number = jump.adjoint() * jump;
    const ComplexMatrix jump_a = ancilla_conjugate(jump);
    const ComplexMatrix number_a = ancilla_conjugate(number);
    return I_UNIT * rate *
           (linalg::kron(jump, jump_a) - 0.5 * linalg::kron(number, id) - 0.5 * linalg::kron(id, number_a));
}

ComplexMatrix dissipative_generator(const Dissipation& dissipation, Eigen::Index dim)
{
    const auto size = dim * dim;
    if (const auto* set = std::get_if<LindbladSet>(&dissipation)) {
        ComplexMatrix out = ComplexMatrix::Zero(size, size);
        for (const auto& term : set->terms)
            out += build_LS(term.rate, term.jump);
        return out;
    }
    if (const auto* pair = std::get_if<QuadraticPair>(&dissipation)) {
        // vec(A rho B) = (A (x) B^T) vec(rho) in row-major order
        const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
        const ComplexMatrix dc = pair->d.adjoint() * pair->c;
        const ComplexMatrix cd = pair->c.adjoint() * pair->d;
        const ComplexMatrix vec = linalg::kron(pair->c, pair->d.conjugate()) +
                                  linalg::kron(pair->d, pair->c.conjugate()) -
                                  0.5 * (linalg::kron(dc, id) + linalg::kron(id, dc.transpose())) -
                                  0.5 * (linalg::kron(cd, id) + linalg::kron(id, cd.transpose()));
        return I_UNIT * vec;
    }
    throw Error(ErrorCode::UnsupportedDissipator, "model carries no recognised dissipator");
}

EffectiveGenerator build_effective_generator(const OpenSystemModel& model, double t)
{
    const auto n = model.dim();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix h = model.hamiltonian(t);
    EffectiveGenerator out;
    out.dissipative_part = dissipative_generator(model.dissipation(), n);
    out.system_part = linalg::kron(h, id);
    out.ancilla_part = linalg::kron(id, ancilla_conjugate(h));
    out.matrix = out.system_part - out.ancilla_part + out.dissipative_part;
    return out;
}

linalg::TimeGenerator generator_function(const OpenSystemModel& model)
{
    const auto n = model.dim();
    ComplexMatrix dissipative = dissipative_generator(model.dissipation(), n);
    return [model, dissipative = std::move(dissipative), n](double t) {
        const ComplexMatrix id = ComplexMatrix::Identity(n, n);
        const ComplexMatrix h = model.hamiltonian(t);
        return ComplexMatrix(linalg::kron(h, id) - linalg::kron(id, h.conjugate()) + dissipative);
    };
}

ComplexMatrix apply_dissipator(const Dissipation& dissipation, const ComplexMatrix& rho)
{
    if (const auto* set = std::get_if<LindbladSet>(&dissipation)) {
        ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
        for (const auto& term : set->terms) {
            const ComplexMatrix number = term.jump.adjoint() * term.jump;
            out += term.rate * (term.jump * rho * term.jump.adjoint() - 0.5 * (number * rho + rho * number));
        }
        return out;
    }
    if (const auto* pair = std::get_if<QuadraticPair>(&dissipation)) {
        const ComplexMatrix& c = pair->c;
        const ComplexMatrix& d = pair->d;
        const ComplexMatrix dc = d.adjoint() * c;
        const ComplexMatrix cd = c.adjoint() * d;
        return c * rho * d.adjoint() + d * rho * c.adjoint() - 0.5 * (dc * rho + rho * dc) -
               0.5 * (cd * rho + rho * cd);
    }
    throw Error(ErrorCode::UnsupportedDissipator, "model carries no recognised dissipator");
}

ComplexMatrix master_rhs(const OpenSystemModel& model, const ComplexMatrix& rho, double t)
{
    const ComplexMatrix h = model.hamiltonian(t);
    return -I_UNIT * (h * rho - rho * h) + apply_dissipator(model.dissipation(), rho);
}

ComplexMatrix evolve_direct(const DensityMatrix& rho0, const OpenSystemModel& model, double duration,
                            std::size_t steps)
{
    if (rho0.dim() != model.dim())
        throw Error(ErrorCode::DimensionMismatch, "initial state and model differ in dimension");
    if (steps == 0)
        throw Error(ErrorCode::InvalidArgument, "steps must be positive");
    const double h = duration / static_cast<double>(steps);
    ComplexMatrix rho = rho0.matrix();
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = h * static_cast<double>(s);
        const ComplexMatrix k1 = master_rhs(model, rho, t);
        const ComplexMatrix k2 = master_rhs(model, rho + 0.5 * h * k1, t + 0.5 * h);
        const ComplexMatrix k3 = master_rhs(model, rho + 0.5 * h * k2, t + 0.5 * h);
        const ComplexMatrix k4 = master_rhs(model, rho + h * k3, t + h);
        rho = checked_overflow(rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t + h);
    }
    return rho;
}

ComplexMatrix evolve_vectorized(const DensityMatrix& rho0, const OpenSystemModel& model, double duration,
                                std::size_t steps)
{
    if (rho0.dim() != model.dim())
        throw Error(ErrorCode::DimensionMismatch, "initial state and model differ in dimension");
    const auto generator = generator_function(model);
    const ComplexVector out = linalg::propagate_steps(generator, flatten(rho0.matrix()), 0.0, duration, steps);
    return unflatten(out);
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::DimensionMismatch, "trace_distance operands differ in shape");
    const ComplexMatrix diff = a - b;
    const ComplexMatrix hermitian = 0.5 * (diff + diff.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

} // namespace openbo::liouville
