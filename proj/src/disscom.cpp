#include "openbo/disscom.hpp"

#include <cmath>

namespace openbo::disscom {
namespace {

void check_basis(const MotionBasis& basis)
{
    const auto n = static_cast<Eigen::Index>(basis.n_max);
    if (basis.n_max < 2 || basis.x.rows() != n || basis.x.cols() != n || basis.p.rows() != n || basis.p.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "motion basis matrices do not match n_max");
}

void check_rates(const DissCOMRates& rates)
{
    if (!std::isfinite(rates.gamma1) || !std::isfinite(rates.gamma2))
        throw Error(ErrorCode::InvalidRates, "rates must be finite");
}

} // namespace

MotionBasis xp_matrices(std::size_t n_max)
{
    if (n_max < 2)
        throw Error(ErrorCode::InvalidArgument, "n_max must be at least 2");
    const auto n = static_cast<Eigen::Index>(n_max);
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k)
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    const double r = 1.0 / std::sqrt(2.0);
    MotionBasis basis;
    basis.n_max = n_max;
    basis.x = r * (a + a.adjoint());
    basis.p = I_UNIT * r * (a.adjoint() - a);
    return basis;
}

liouville::QuadraticPair build_CD(const DissCOMRates& rates, const MotionBasis& basis)
{
    check_basis(basis);
    check_rates(rates);
    if (!(rates.gamma1 > 0.0))
        throw Error(ErrorCode::InvalidRates, "gamma1 must be positive to split into C and D");
    const double root = std::sqrt(rates.gamma1);
    return {root * basis.x, root * basis.x - (rates.gamma2 / root) * basis.p};
}

ComplexMatrix disscom_rhs(const ComplexMatrix& rho, const DissCOMRates& rates, const MotionBasis& basis)
{
    check_basis(basis);
    check_rates(rates);
    const auto n = static_cast<Eigen::Index>(basis.n_max);
    if (rho.rows() != n || rho.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "state does not match the motion basis");
    const ComplexMatrix& x = basis.x;
    const ComplexMatrix& p = basis.p;
    const ComplexMatrix x2 = x * x;
    return rates.gamma1 * (2.0 * x * rho * x - rho * x2 - x2 * rho) +
           rates.gamma2 * (x * p * rho + rho * p * x - x * rho * p - p * rho * x);
}

ComplexMatrix build_LC(const MotionBasis& basis, const DissCOMRates& rates)
{
    check_basis(basis);
    check_rates(rates);
    const auto n = static_cast<Eigen::Index>(basis.n_max);
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix& x = basis.x;
    const ComplexMatrix& p = basis.p;
    const ComplexMatrix xa = liouville::ancilla_conjugate(x);
    const ComplexMatrix pa = liouville::ancilla_conjugate(p);
    const double g1 = rates.gamma1;
    const double g2 = rates.gamma2;

    const ComplexMatrix system = 2.0 * g1 * x * x - g2 * (x * p + p * x);
    const ComplexMatrix ancilla = 2.0 * g1 * xa * xa - g2 * (xa * pa + pa * xa);
    const ComplexMatrix coupling =
        2.0 * g1 * linalg::kron(x, xa) - g2 * (linalg::kron(x, pa) + linalg::kron(p, xa));
    return -0.5 * I_UNIT * linalg::kron(system, id) - 0.5 * I_UNIT * linalg::kron(id, ancilla) +
           I_UNIT * coupling;
}

cplx lc_matrix_element(const ComplexMatrix& lc, const ComplexVector& chi_m, const ComplexVector& chi_n,
                       const ComplexVector& chi_p, const ComplexVector& chi_q)
{
    const auto n = chi_m.size();
    if (chi_n.size() != n || chi_p.size() != n || chi_q.size() != n || lc.rows() != n * n || lc.cols() != n * n)
        throw Error(ErrorCode::DimensionMismatch, "motion states do not match the doubled generator");
    const ComplexMatrix bra = linalg::kron(chi_m, chi_n.conjugate());
    const ComplexMatrix ket = linalg::kron(chi_p, chi_q.conjugate());
    return (bra.adjoint() * lc * ket)(0, 0);
}

ComplexMatrix lc_level_table(const ComplexMatrix& lc, std::span<const ComplexVector> chis)
{
    const auto k = static_cast<Eigen::Index>(chis.size());
    ComplexMatrix table(k * k, k * k);
    for (Eigen::Index m = 0; m < k; ++m)
        for (Eigen::Index n = 0; n < k; ++n)
            for (Eigen::Index p = 0; p < k; ++p)
                for (Eigen::Index q = 0; q < k; ++q)
                    table(m * k + n, p * k + q) = lc_matrix_element(
                        lc, chis[static_cast<std::size_t>(m)], chis[static_cast<std::size_t>(n)],
                        chis[static_cast<std::size_t>(p)], chis[static_cast<std::size_t>(q)]);
    return table;
}

bo::ValidityReport disscom_validity(const bo::EigenBundle& bundle, const ComplexMatrix& lc_table,
                                    const bo::ChannelSpec& spec, std::optional<double> gamma0)
{
    const auto levels = static_cast<Eigen::Index>(bundle.level_count());
    if (lc_table.rows() != levels || lc_table.cols() != levels)
        throw Error(ErrorCode::DimensionMismatch, "L_C table must be level x level");
    bo::ChannelSpec extended = spec;
    ComplexMatrix coupling = lc_table;
    coupling.diagonal().setZero();
    extended.extra_coupling = coupling;
    std::vector<cplx> shift(static_cast<std::size_t>(levels));
    for (Eigen::Index n = 0; n < levels; ++n)
        shift[static_cast<std::size_t>(n)] = lc_table(n, n);
    extended.extra_energy = shift;
    return bo::gamma_measure(bundle, extended, gamma0);
}

std::vector<ComplexVector> oscillator_states(const MotionBasis& basis, std::size_t count)
{
    check_basis(basis);
    if (count > basis.n_max)
        throw Error(ErrorCode::InvalidArgument, "more states requested than the basis holds");
    std::vector<ComplexVector> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(ComplexVector::Unit(static_cast<Eigen::Index>(basis.n_max), static_cast<Eigen::Index>(i)));
    return out;
}

} // namespace openbo::disscom
