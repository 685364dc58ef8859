#include <doctest.h>

#include <numbers>

#include "openbo/bo_core.hpp"
#include "openbo/helical.hpp"
#include "support.hpp"

using namespace openbo;
using namespace openbo::bo;
using namespace testing;

namespace {

constexpr double kPi = std::numbers::pi;

// Delegates everything except analytic derivatives, forcing finite differences.
class WithoutDerivatives final : public EigenSource {
public:
    explicit WithoutDerivatives(std::shared_ptr<const EigenSource> inner) : inner_(std::move(inner)) {}
    Eigen::Index dimension() const override { return inner_->dimension(); }
    ComplexMatrix block(const SlowPoint& p) const override { return inner_->block(p); }
    std::vector<Level> levels(const SlowPoint& p) const override { return inner_->levels(p); }
    bool fixes_gauge() const override { return inner_->fixes_gauge(); }

private:
    std::shared_ptr<const EigenSource> inner_;
};

std::vector<SlowPoint> diagonal_loop(std::size_t count)
{
    std::vector<SlowPoint> grid;
    for (std::size_t l = 0; l < count; ++l) {
        const double angle = 2.0 * kPi * static_cast<double>(l) / static_cast<double>(count);
        grid.push_back(helical::slow_point(angle, angle));
    }
    return grid;
}

std::shared_ptr<NumericSource> homogeneous_source(double g)
{
    const ComplexMatrix fixed = helical::hst_matrix(0.3, 0.3, 1.1, g);
    return std::make_shared<NumericSource>(4, [fixed](const SlowPoint&) { return fixed; });
}

} // namespace

TEST_CASE("slow points")
{
    const SlowPoint p{{0.5}, {7.0}, true, true};
    CHECK(p.size() == 2);
    CHECK(p.coordinate(1) == 7.0);
    CHECK(std::abs(p.reduced().coordinate(1) - (7.0 - 2.0 * kPi)) < 1e-15);
    CHECK(p.shifted(0, 0.25).coordinate(0) == 0.75);
    CHECK(p.weight(0) == cplx{1.0, 0.0});
    CHECK(p.weight(1) == cplx{0.0, -1.0});
    const SlowPoint real{{0.5}, {7.0}, false, false};
    CHECK(real.weight(1) == cplx{1.0, 0.0});
    CHECK(real.reduced().coordinate(1) == 7.0);
}

TEST_CASE("level matching follows overlaps")
{
    const ComplexMatrix basis = random_matrix(3, 3);
    std::vector<Level> reference, shuffled;
    for (Eigen::Index i = 0; i < 3; ++i)
        reference.push_back({cplx(static_cast<double>(i)), basis.col(i), basis.col(i)});
    for (Eigen::Index i : {2, 0, 1})
        shuffled.push_back({cplx(static_cast<double>(i)), basis.col(i) * cplx{0.0, 2.0}, basis.col(i)});
    double worst = 0.0;
    const auto map = match_levels(reference, shuffled, worst);
    CHECK(map == std::vector<std::size_t>{1, 2, 0});
    CHECK(std::abs(worst - 1.0) < 1e-12);
}

TEST_CASE("tracking ambiguity is reported")
{
    // Five levels whose eigenbasis jumps by a discrete Fourier transform.
    ComplexMatrix dft(5, 5);
    for (Eigen::Index a = 0; a < 5; ++a)
        for (Eigen::Index b = 0; b < 5; ++b)
            dft(a, b) = std::polar(1.0 / std::sqrt(5.0), 2.0 * kPi * static_cast<double>(a * b) / 5.0);
    ComplexMatrix diag = ComplexMatrix::Zero(5, 5);
    diag.diagonal() << 1.0, 2.0, 3.0, 4.0, 5.0;
    auto source = std::make_shared<NumericSource>(5, [=](const SlowPoint& p) {
        return p.coordinate(0) < 0.5 ? diag : ComplexMatrix(dft * diag * dft.adjoint());
    });
    std::vector<SlowPoint> grid{{{0.0}, {}, false, false}, {{1.0}, {}, false, false}};
    try {
        build_bundle(source, grid);
        FAIL("expected TrackingAmbiguity");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TrackingAmbiguity);
    }
}

TEST_CASE("homogeneous field separates spin and motion")
{
    BundleOptions options;
    options.loop = true;
    const auto bundle = build_bundle(homogeneous_source(0.4), diagonal_loop(8), options);
    for (std::size_t k = 0; k < bundle.point_count(); ++k)
        for (std::size_t n = 0; n < 4; ++n) {
            for (auto a : connection(bundle, n, k))
                CHECK(std::abs(a) < 1e-12);
            CHECK(std::abs(geometric_F(bundle, n, k)) < 1e-12);
            for (std::size_t m = 0; m < 4; ++m) {
                if (m == n)
                    continue;
                const auto o = coupling_O(bundle, n, m, k);
                CHECK(std::abs(o.scalar) < 1e-12);
                for (auto c : o.first_derivative)
                    CHECK(std::abs(c) < 1e-12);
            }
        }
    ChannelSpec spec{{cplx{0.3, 0.0}, cplx{0.0, 0.3}}, {cplx{1.0, 0.0}, cplx{0.0, 0.0}}, 2, {}, {}};
    for (std::size_t n = 0; n < 4; ++n)
        for (const auto& channel : first_order_correction(bundle, n, spec))
            CHECK(channel.numerator == cplx{0.0, 0.0});
}

TEST_CASE("numeric gauge anchors a real positive component")
{
    const auto bundle = build_bundle(helical::numeric_source(1.2, 0.3), diagonal_loop(12));
    REQUIRE(bundle.level_count() == 4);
    CHECK(bundle.gauge_continuous);
    for (std::size_t k = 0; k < bundle.point_count(); ++k)
        for (std::size_t n = 0; n < 4; ++n) {
            const auto& level = bundle.levels[k][n];
            const cplx anchor = level.right(bundle.reference_component[n]);
            CHECK(std::abs(anchor.imag()) < 1e-12);
            CHECK(anchor.real() > 0.0);
            CHECK(std::abs(level.left.dot(level.right) - 1.0) < 1e-10);
            CHECK(std::abs(level.right.norm() - level.left.norm()) < 1e-10);
        }
}

TEST_CASE("F is gauge invariant across analytic and numeric eigenvectors")
{
    const double g = 0.35;
    const auto analytic = build_bundle(std::make_shared<helical::HelicalAnalyticSource>(g), diagonal_loop(24));
    const auto numeric = build_bundle(helical::numeric_source(kPi / 2.0, g), diagonal_loop(24));
    for (std::size_t k = 0; k < 24; k += 5)
        for (std::size_t n = 0; n < 4; ++n) {
            // Level order differs between the sources, so pair them by energy.
            std::size_t m = 0;
            for (std::size_t j = 1; j < 4; ++j)
                if (std::abs(numeric.levels[k][j].energy - analytic.levels[k][n].energy) <
                    std::abs(numeric.levels[k][m].energy - analytic.levels[k][n].energy))
                    m = j;
            CHECK(std::abs(analytic.levels[k][n].energy - numeric.levels[k][m].energy) < 1e-10);
            const cplx fa = geometric_F(analytic, n, k), fn = geometric_F(numeric, m, k);
            CHECK(std::abs(fa - fn) < 1e-6 * std::max(1.0, std::abs(fa)));
        }
}

TEST_CASE("analytic derivatives agree with finite differences")
{
    const auto source = std::make_shared<helical::HelicalAnalyticSource>(0.6);
    const auto grid = std::vector<SlowPoint>{helical::slow_point(0.4, 1.1), helical::slow_point(2.0, -0.7)};
    const auto exact = build_bundle(source, grid);
    BundleOptions options;
    options.derivative.richardson = true;
    const auto fd = build_bundle(std::make_shared<WithoutDerivatives>(source), grid, options);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto a = derivative_tables(exact, k), b = derivative_tables(fd, k);
        for (std::size_t j = 0; j < 2; ++j) {
            CHECK(max_abs(a.first[j] - b.first[j]) < 1e-8);
            CHECK(max_abs(a.second[j] - b.second[j]) < 1e-5);
        }
        const auto parts = geometric_F_components(exact, 1, k);
        CHECK(std::abs(parts[0] + parts[1] - geometric_F(exact, 1, k)) < 1e-14);
    }
}

TEST_CASE("connection scales with the coordinate scale and ancilla weight")
{
    const auto source = std::make_shared<helical::HelicalAnalyticSource>(0.2);
    const auto grid = std::vector<SlowPoint>{helical::slow_point(0.4, 0.4)};
    BundleOptions unit, scaled;
    scaled.coordinate_scale = 3.0;
    const auto a = build_bundle(source, grid, unit), b = build_bundle(source, grid, scaled);
    const auto tables = derivative_tables(a, 0);
    for (std::size_t n = 0; n < 4; ++n) {
        const auto ca = connection(a, n, 0), cb = connection(b, n, 0);
        CHECK(std::abs(cb[0] - 3.0 * ca[0]) < 1e-12);
        CHECK(std::abs(cb[1] - 3.0 * ca[1]) < 1e-12);
        const auto idx = static_cast<Eigen::Index>(n);
        CHECK(std::abs(ca[0] - I_UNIT * tables.first[0](idx, idx)) < 1e-12);
        CHECK(std::abs(ca[1] - I_UNIT * cplx{0.0, -1.0} * tables.first[1](idx, idx)) < 1e-12);
    }
}

TEST_CASE("coupling and channel errors")
{
    const auto bundle = build_bundle(std::make_shared<helical::HelicalAnalyticSource>(0.0), diagonal_loop(4),
                                     BundleOptions{false, 1e-8, 1.0, 2.0 * kPi, true, {}});
    try {
        coupling_O(bundle, 1, 1, 0);
        FAIL("expected DiagonalRequest");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DiagonalRequest);
    }
    // Two zero-energy levels at g = 0 give vanishing denominators at s = 0.
    ChannelSpec spec{{cplx{0.1, 0.0}, cplx{0.0, 0.1}}, {cplx{2.0 * kPi, 0.0}, cplx{0.0, 0.0}}, 2, {}, {}};
    bool small = false;
    for (std::size_t n = 0; n < 4; ++n) {
        try {
            first_order_correction(bundle, n, spec);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SmallDenominator);
            small = true;
        }
    }
    CHECK(small);
    const auto report = gamma_measure(bundle, spec);
    CHECK(report.excluded > 0);
    CHECK(report.gamma > 0.0);
    CHECK(report.normalized == 1.0);
    const auto normalized = gamma_measure(bundle, spec, 2.0 * report.gamma);
    CHECK(std::abs(normalized.normalized - 0.5) < 1e-15);
}

TEST_CASE("zeroth-order Hamiltonian")
{
    BundleOptions options;
    options.mass = 2.0;
    options.loop = true;
    const auto bundle = build_bundle(homogeneous_source(0.4), diagonal_loop(4), options);
    const auto h = zeroth_hamiltonian(bundle, 2);
    const std::vector<cplx> kappa{cplx{0.5, 0.0}, cplx{0.0, 0.2}};
    const cplx expected = (0.25 - 0.04) / 4.0 + bundle.levels[0][2].energy;
    CHECK(std::abs(h.energy(kappa, 1) - expected) < 1e-12);
    CHECK(std::abs(h.mean_energy(kappa) - expected) < 1e-12);
    const std::vector<cplx> wrong{cplx{1.0, 0.0}};
    CHECK_THROWS_AS(h.energy(wrong, 0), Error);
}

TEST_CASE("spectral gap in strict mode")
{
    BundleOptions options;
    options.strict = true;
    CHECK_THROWS_AS(build_bundle(std::make_shared<helical::HelicalAnalyticSource>(0.0), diagonal_loop(4), options),
                    Error);
    const auto bundle = build_bundle(std::make_shared<helical::HelicalAnalyticSource>(0.5), diagonal_loop(4), options);
    CHECK(bundle.min_gap > 0.1);
}
