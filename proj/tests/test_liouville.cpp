#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "openbo/liouville.hpp"
#include "openbo/pauli.hpp"
#include "support.hpp"

using namespace openbo;
using namespace openbo::liouville;
using namespace testing;

namespace {

// Lindblad right-hand side written out directly, independent of the library.
ComplexMatrix reference_rhs(const ComplexMatrix& h, double rate, const ComplexMatrix& j, const ComplexMatrix& rho)
{
    const ComplexMatrix jj = j.adjoint() * j;
    return -I_UNIT * (h * rho - rho * h) + rate * (j * rho * j.adjoint() - 0.5 * (jj * rho + rho * jj));
}

OpenSystemModel random_model(Eigen::Index n)
{
    LindbladSet set{{{uniform(0.1, 1.0), random_matrix(n, n)}, {uniform(0.1, 1.0), random_matrix(n, n)}}};
    return OpenSystemModel(random_hermitian(n), set);
}

} // namespace

TEST_CASE("flatten is row-major and round-trips")
{
    const ComplexMatrix m = random_matrix(3, 3);
    const ComplexVector v = flatten(m);
    CHECK(v(1) == m(0, 1));
    CHECK(v(3) == m(1, 0));
    CHECK(unflatten(v) == m);
}

TEST_CASE("vectorize in a rotated basis stores <E_m|rho|E_n>")
{
    const ComplexMatrix rho = random_density(3);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(random_hermitian(3));
    const ComplexMatrix basis = solver.eigenvectors();
    const auto ket = vectorize(DensityMatrix(rho), basis);
    CHECK(std::abs(ket.amplitudes(1) - basis.col(0).dot(rho * basis.col(1))) < 1e-12);
    CHECK(max_abs(devectorize(ket, basis) - rho) < 1e-12);
    CHECK(std::abs(trace_functional(ket) - 1.0) < 1e-12);
    CHECK_THROWS_AS(vectorize(DensityMatrix(rho), random_matrix(3, 3)), Error);
}

TEST_CASE("density matrices are validated")
{
    CHECK_THROWS_AS(DensityMatrix(random_matrix(2, 2)), Error);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::Identity(2, 2)), Error);
    ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
    negative(0, 0) = 1.5;
    negative(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{negative}, Error);
}

TEST_CASE("model validation")
{
    CHECK_THROWS_AS(OpenSystemModel(random_matrix(2, 2), std::monostate{}), Error);
    try {
        OpenSystemModel(pauli::z(), LindbladSet{{{-1.0, pauli::lowering()}}});
        FAIL("expected InvalidRates");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidRates);
    }
    try {
        dissipative_generator(std::monostate{}, 2);
        FAIL("expected UnsupportedDissipator");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedDissipator);
    }
}

TEST_CASE("effective generator reproduces the master equation")
{
    for (Eigen::Index n = 2; n <= 4; ++n) {
        const ComplexMatrix h = random_hermitian(n), j = random_matrix(n, n);
        const double rate = 0.7;
        const OpenSystemModel model(h, LindbladSet{{{rate, j}}});
        const ComplexMatrix rho = random_density(n);
        const auto generator = build_effective_generator(model);
        const ComplexVector lhs = -I_UNIT * generator.matrix * flatten(rho);
        CHECK((lhs - flatten(reference_rhs(h, rate, j, rho))).norm() < 1e-12);
        CHECK(max_abs(master_rhs(model, rho) - reference_rhs(h, rate, j, rho)) < 1e-12);
        CHECK(max_abs(generator.matrix - generator.system_part + generator.ancilla_part -
                      generator.dissipative_part) < 1e-12);
        // Trace preservation: <<I| H_T = 0.
        const ComplexVector identity = flatten(ComplexMatrix::Identity(n, n));
        CHECK((identity.transpose() * generator.matrix).norm() < 1e-12);
    }
}

TEST_CASE("build_LS for the lowering operator")
{
    const ComplexMatrix ls = build_LS(1.0, pauli::lowering());
    // Decay of the upper population into the lower one.
    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected(0, 0) = -I_UNIT;
    expected(1, 1) = -0.5 * I_UNIT;
    expected(2, 2) = -0.5 * I_UNIT;
    expected(3, 0) = I_UNIT;
    CHECK(max_abs(ls - expected) < 1e-15);
}

TEST_CASE("a symmetric quadratic pair is a Lindblad dephasing term")
{
    const double rate = 0.4;
    const ComplexMatrix c = std::sqrt(rate / 2.0) * pauli::z();
    const ComplexMatrix rho = random_density(2);
    const ComplexMatrix via_pair = apply_dissipator(QuadraticPair{c, c}, rho);
    const ComplexMatrix via_lindblad = apply_dissipator(LindbladSet{{{rate, pauli::z()}}}, rho);
    CHECK(max_abs(via_pair - via_lindblad) < 1e-14);
    CHECK(max_abs(dissipative_generator(QuadraticPair{c, c}, 2) -
                  dissipative_generator(LindbladSet{{{rate, pauli::z()}}}, 2)) < 1e-14);
}

TEST_CASE("direct and vectorized evolution agree and stay physical")
{
    for (Eigen::Index n : {2, 3}) {
        const auto model = random_model(n);
        const DensityMatrix rho0(random_density(n));
        const ComplexMatrix direct = evolve_direct(rho0, model, 1.0, 1000);
        const ComplexMatrix vectorized = evolve_vectorized(rho0, model, 1.0, 1000);
        CHECK(max_abs(direct - vectorized) < 1e-10);
        CHECK(std::abs(direct.trace() - 1.0) < 1e-10);
        CHECK(max_abs(direct - direct.adjoint()) < 1e-10);
        // Constant generator: compare with the exact exponential.
        const auto gen = build_effective_generator(model).matrix;
        const ComplexVector exact = ComplexMatrix(-I_UNIT * gen).exp() * flatten(rho0.matrix());
        CHECK((flatten(vectorized) - exact).norm() < 1e-9);
    }
}

TEST_CASE("time-dependent generator")
{
    const OpenSystemModel model(
        2, [](double t) { return ComplexMatrix(std::cos(t) * pauli::x() + std::sin(t) * pauli::y()); },
        LindbladSet{{{0.3, pauli::lowering()}}});
    const auto generator = generator_function(model);
    const ComplexMatrix expected = build_effective_generator(model, 0.8).matrix;
    CHECK(max_abs(generator(0.8) - expected) < 1e-14);
    const DensityMatrix rho0(random_density(2));
    CHECK(max_abs(evolve_direct(rho0, model, 2.0, 2000) - evolve_vectorized(rho0, model, 2.0, 2000)) < 1e-10);
}

TEST_CASE("trace distance")
{
    ComplexMatrix up = ComplexMatrix::Zero(2, 2), down = ComplexMatrix::Zero(2, 2);
    up(0, 0) = 1.0;
    down(1, 1) = 1.0;
    CHECK(std::abs(trace_distance(up, down) - 1.0) < 1e-14);
    CHECK(trace_distance(up, up) < 1e-14);
    CHECK(ancilla_conjugate(pauli::y()) == ComplexMatrix(pauli::y().conjugate()));
}
