#include <doctest.h>

#include <numbers>

#include "openbo/disscom.hpp"
#include "openbo/helical.hpp"
#include "support.hpp"

using namespace openbo;
using namespace openbo::disscom;
using namespace testing;

namespace {

// Direct transcription of the quadratic generator, written without the library.
ComplexMatrix reference(const ComplexMatrix& rho, double g1, double g2, const ComplexMatrix& x, const ComplexMatrix& p)
{
    return g1 * (2.0 * x * rho * x - rho * x * x - x * x * rho) +
           g2 * (x * p * rho + rho * p * x - x * rho * p - p * rho * x);
}

} // namespace

TEST_CASE("oscillator matrices")
{
    const auto basis = xp_matrices(6);
    CHECK(basis.x.rows() == 6);
    CHECK(linalg::is_hermitian(basis.x, 1e-15));
    CHECK(linalg::is_hermitian(basis.p, 1e-15));
    const ComplexMatrix commutator = basis.x * basis.p - basis.p * basis.x;
    // [x, p] = i except in the last truncated row and column.
    CHECK(max_abs(commutator.topLeftCorner(5, 5) - I_UNIT * ComplexMatrix::Identity(5, 5)) < 1e-14);
    CHECK_THROWS_AS(xp_matrices(1), Error);
    const auto states = oscillator_states(basis, 2);
    CHECK(states.size() == 2);
    CHECK(states[1](1) == cplx{1.0, 0.0});
    CHECK_THROWS_AS(oscillator_states(basis, 7), Error);
}

TEST_CASE("three forms of the generator agree on the interior")
{
    const auto basis = xp_matrices(10);
    const DissCOMRates rates{0.7, 0.3};
    for (int trial = 0; trial < 5; ++trial) {
        const ComplexMatrix rho = random_density(10);
        const ComplexMatrix direct = disscom_rhs(rho, rates, basis);
        CHECK(max_abs(direct - reference(rho, 0.7, 0.3, basis.x, basis.p)) < 1e-12);
        const ComplexMatrix via_cd = liouville::apply_dissipator(build_CD(rates, basis), rho);
        CHECK(max_abs((via_cd - direct).topLeftCorner(8, 8)) < 1e-10);
        const ComplexMatrix via_lc =
            liouville::unflatten(-I_UNIT * (build_LC(basis, rates) * liouville::flatten(rho)));
        CHECK(max_abs((via_lc - direct).topLeftCorner(8, 8)) < 1e-10);
    }
}

TEST_CASE("C and D need a positive diffusion rate")
{
    const auto basis = xp_matrices(4);
    try {
        build_CD({0.0, 0.1}, basis);
        FAIL("expected InvalidRates");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidRates);
    }
    CHECK_THROWS_AS(disscom_rhs(random_density(3), {0.1, 0.1}, basis), Error);
}

TEST_CASE("the generator is traceless even when truncated")
{
    const auto basis = xp_matrices(8);
    const ComplexMatrix out = disscom_rhs(random_density(8), {0.2, 0.5}, basis);
    CHECK(std::abs(out.trace()) < 1e-12);
}

TEST_CASE("level table elements")
{
    const auto basis = xp_matrices(6);
    const ComplexMatrix lc = build_LC(basis, {0.4, 0.1});
    const auto chis = oscillator_states(basis, 2);
    const ComplexMatrix table = lc_level_table(lc, chis);
    REQUIRE(table.rows() == 4);
    CHECK(table(1 * 2 + 0, 0 * 2 + 1) == lc_matrix_element(lc, chis[1], chis[0], chis[0], chis[1]));
    // With basis vectors the element is a plain entry of L_C.
    CHECK(table(0, 3) == lc(0, 1 * 6 + 1));
}

TEST_CASE("zero rates reduce to the spin-only measure")
{
    helical::HelicalModel model;
    model.g = 0.4;
    const helical::GammaParams params;
    const auto bundle = helical::helical_loop_bundle(model, params);
    const auto spec = helical::helical_channels(model, params);
    const auto basis = xp_matrices(6);
    const ComplexMatrix table = lc_level_table(build_LC(basis, {0.0, 0.0}), oscillator_states(basis, 2));
    const auto spin = bo::gamma_measure(bundle, spec);
    const auto full = disscom_validity(bundle, table, spec);
    CHECK(full.gamma == spin.gamma);
    REQUIRE(full.channels.size() == spin.channels.size());
    for (std::size_t i = 0; i < spin.channels.size(); ++i)
        CHECK(full.channels[i].ratio == spin.channels[i].ratio);
    CHECK_THROWS_AS(disscom_validity(bundle, ComplexMatrix::Zero(3, 3), spec), Error);
}
