#include "openbo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace openbo {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NearDegenerate: return "NearDegenerate";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SingularPairing: return "SingularPairing";
    case ErrorCode::StepOverflow: return "StepOverflow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnsupportedDissipator: return "UnsupportedDissipator";
    case ErrorCode::TrackingAmbiguity: return "TrackingAmbiguity";
    case ErrorCode::DiagonalRequest: return "DiagonalRequest";
    case ErrorCode::SmallDenominator: return "SmallDenominator";
    case ErrorCode::InvalidRates: return "InvalidRates";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::NoZeroMode: return "NoZeroMode";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

namespace linalg {
namespace {

template <std::size_t N>
cplx horner(const std::array<cplx, N>& monic_coeffs, cplx x)
{
    // monic_coeffs holds c_{N-1} ... c_0 of x^N + c_{N-1} x^{N-1} + ... + c_0
    cplx acc{1.0, 0.0};
    for (const cplx& c : monic_coeffs)
        acc = acc * x + c;
    return acc;
}

template <std::size_t N>
cplx horner_derivative(const std::array<cplx, N>& monic_coeffs, cplx x)
{
    cplx acc = static_cast<double>(N);
    for (std::size_t i = 0; i + 1 < N; ++i)
        acc = acc * x + static_cast<double>(N - 1 - i) * monic_coeffs[i];
    return acc;
}

// Newton steps that are only accepted when they reduce |P|.
template <std::size_t N>
cplx newton_polish(const std::array<cplx, N>& coeffs, cplx root, int max_steps)
{
    cplx value = horner(coeffs, root);
    for (int step = 0; step < max_steps; ++step) {
        if (value == cplx{0.0, 0.0})
            break;
        const cplx slope = horner_derivative(coeffs, root);
        if (std::abs(slope) < 1e-300)
            break;
        const cplx candidate = root - value / slope;
        const cplx candidate_value = horner(coeffs, candidate);
        if (!(std::abs(candidate_value) < std::abs(value)))
            break;
        root = candidate;
        value = candidate_value;
    }
    return root;
}

std::array<cplx, 2> solve_quadratic(cplx b, cplx c)
{
    // x^2 + b x + c, cancellation-free branch choice
    cplx disc = std::sqrt(b * b - 4.0 * c);
    if (std::real(std::conj(b) * disc) < 0.0)
        disc = -disc;
    const cplx q = -0.5 * (b + disc);
    if (q == cplx{0.0, 0.0})
        return {cplx{0.0, 0.0}, cplx{0.0, 0.0}};
    return {q, c / q};
}

cplx complex_cbrt(cplx z)
{
    if (z == cplx{0.0, 0.0})
        return z;
    return std::polar(std::cbrt(std::abs(z)), std::arg(z) / 3.0);
}

} // namespace

std::array<cplx, 3> solve_cubic(cplx c2, cplx c1, cplx c0)
{
    const cplx shift = c2 / 3.0;
    const cplx p = c1 - c2 * c2 / 3.0;
    const cplx q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;

    std::array<cplx, 3> roots;
    const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    cplx u3 = -q / 2.0 + disc;
    const cplx alt = -q / 2.0 - disc;
    if (std::abs(alt) > std::abs(u3))
        u3 = alt;

    if (std::abs(u3) == 0.0) {
        roots = {-shift, -shift, -shift};
    } else {
        const cplx u = complex_cbrt(u3);
        const cplx omega = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
        cplx w{1.0, 0.0};
        for (auto& r : roots) {
            const cplx uk = u * w;
            r = uk - p / (3.0 * uk) - shift;
            w *= omega;
        }
    }

    const std::array<cplx, 3> coeffs{c2, c1, c0};
    for (auto& r : roots)
        r = newton_polish(coeffs, r, 1);
    return roots;
}

std::array<cplx, 4> solve_quartic(cplx c3, cplx c2, cplx c1, cplx c0)
{
    const cplx a = c3;
    const cplx shift = a / 4.0;
    const cplx p = c2 - 3.0 * a * a / 8.0;
    const cplx q = c1 - a * c2 / 2.0 + a * a * a / 8.0;
    const cplx r = c0 - a * c1 / 4.0 + a * a * c2 / 16.0 - 3.0 * a * a * a * a / 256.0;

    std::array<cplx, 4> roots;
    const auto resolvent = solve_cubic(p, p * p / 4.0 - r, -q * q / 8.0);
    cplx m = resolvent[0];
    for (const cplx& candidate : resolvent)
        if (std::abs(candidate) > std::abs(m))
            m = candidate;

    const double scale = std::max({1.0, std::abs(p), std::sqrt(std::abs(r))});
    if (std::abs(m) <= 1e-300 * scale || std::abs(q) <= 1e-15 * scale * std::sqrt(scale)) {
        // biquadratic: y^4 + p y^2 + r
        const auto z = solve_quadratic(p, r);
        const cplx y0 = std::sqrt(z[0]);
        const cplx y1 = std::sqrt(z[1]);
        roots = {y0, -y0, y1, -y1};
    } else {
        const cplx s = std::sqrt(2.0 * m);
        const auto first = solve_quadratic(-s, p / 2.0 + m + q / (2.0 * s));
        const auto second = solve_quadratic(s, p / 2.0 + m - q / (2.0 * s));
        roots = {first[0], first[1], second[0], second[1]};
    }

    const std::array<cplx, 4> coeffs{c3, c2, c1, c0};
    for (auto& root : roots)
        root = newton_polish(coeffs, root - shift, 3);
    return roots;
}

std::vector<cplx> characteristic_polynomial(const ComplexMatrix& a)
{
    const auto n = a.rows();
    std::vector<cplx> coeffs(static_cast<std::size_t>(n));
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    cplx previous{1.0, 0.0};
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m;
        m.diagonal().array() += previous;
        const cplx ck = -(a * m).trace() / static_cast<double>(k);
        coeffs[static_cast<std::size_t>(n - k)] = ck;
        previous = ck;
    }
    return coeffs;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

bool is_hermitian(const ComplexMatrix& a, double tol)
{
    if (a.rows() != a.cols())
        return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

std::vector<cplx> polynomial_roots(const ComplexMatrix& scaled)
{
    const auto c = characteristic_polynomial(scaled);
    switch (scaled.rows()) {
    case 1: return {-c[0]};
    case 2: {
        auto r = solve_quadratic(c[1], c[0]);
        return {r[0], r[1]};
    }
    case 3: {
        auto r = solve_cubic(c[2], c[1], c[0]);
        return {r.begin(), r.end()};
    }
    case 4: {
        auto r = solve_quartic(c[3], c[2], c[1], c[0]);
        return {r.begin(), r.end()};
    }
    default: break;
    }
    throw Error(ErrorCode::InvalidArgument, "closed-form route limited to dimension <= 4");
}

ComplexVector seed_vector(Eigen::Index n, int salt)
{
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = cplx(1.0 + 0.37 * static_cast<double>((i * 7 + salt) % 5),
                    0.21 * static_cast<double>((i * 3 + 2 * salt) % 7) - 0.4);
    return v.normalized();
}

// A few inverse-iteration sweeps; `adjoint` iterates on A^H for the left ket.
ComplexVector inverse_iteration(const ComplexMatrix& a, cplx shift, ComplexVector x, int sweeps,
                                bool adjoint, double scale)
{
    const auto n = a.rows();
    const cplx nudge = cplx(0.7, 0.3) * (1e-13 * scale);
    ComplexMatrix shifted = adjoint ? ComplexMatrix(a.adjoint()) : a;
    shifted.diagonal().array() -= (adjoint ? std::conj(shift) : shift) + nudge;
    Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
    for (int i = 0; i < sweeps; ++i) {
        ComplexVector y = lu.solve(x);
        const double norm = y.norm();
        if (!std::isfinite(norm) || norm == 0.0)
            break;
        x = y / norm;
    }
    (void)n;
    return x;
}

double right_residual(const ComplexMatrix& a, cplx value, const ComplexVector& r)
{
    return (a * r - value * r).norm() / r.norm();
}

double left_residual(const ComplexMatrix& a, cplx value, const ComplexVector& l)
{
    return (a.adjoint() * l - std::conj(value) * l).norm() / l.norm();
}

struct Triple {
    cplx value;
    ComplexVector right;
    ComplexVector left;
    bool degenerate = false;
};

std::vector<Triple> small_dimension_pairs(const ComplexMatrix& a, double scale)
{
    const auto n = a.rows();
    std::vector<cplx> roots = polynomial_roots(a / scale);
    for (auto& r : roots)
        r *= scale;

    // single-linkage clusters; multiple roots from closed forms are only
    // accurate to ~eps^(1/k), hence the loose radius.
    const double cluster_radius = 1e-3 * scale;
    std::vector<int> label(roots.size());
    std::iota(label.begin(), label.end(), 0);
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < cluster_radius) {
                const int from = label[j], to = label[i];
                for (auto& l : label)
                    if (l == from)
                        l = to;
            }

    std::vector<Triple> out;
    std::vector<bool> done(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (done[i])
            continue;
        std::vector<std::size_t> members;
        for (std::size_t j = i; j < roots.size(); ++j)
            if (label[j] == label[i]) {
                members.push_back(j);
                done[j] = true;
            }

        if (members.size() == 1) {
            const cplx mu = roots[i];
            Triple t;
            t.right = inverse_iteration(a, mu, seed_vector(n, 1), 3, false, scale);
            t.left = inverse_iteration(a, mu, seed_vector(n, 2), 3, true, scale);
            t.value = mu;
            out.push_back(std::move(t));
            continue;
        }

        // Cluster: SVD null space of (A - mean) then Rayleigh-Ritz inside it.
        cplx mean{0.0, 0.0};
        for (auto j : members)
            mean += roots[j];
        mean /= static_cast<double>(members.size());
        ComplexMatrix shifted = a;
        shifted.diagonal().array() -= mean;
        Eigen::JacobiSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto k = static_cast<Eigen::Index>(members.size());
        const ComplexMatrix rc = svd.matrixV().rightCols(k);
        const ComplexMatrix lc = svd.matrixU().rightCols(k);
        const ComplexMatrix overlap = lc.adjoint() * rc;
        const ComplexMatrix projected = lc.adjoint() * a * rc;
        Eigen::FullPivLU<ComplexMatrix> overlap_lu(overlap);
        if (!overlap_lu.isInvertible())
            throw Error(ErrorCode::SingularPairing, "cluster subspaces are not paired (defective eigenvalue?)");
        const ComplexMatrix reduced = overlap_lu.solve(projected);
        const cplx centre = reduced.trace() / static_cast<double>(k);
        ComplexMatrix y;
        ComplexVector values;
        const ComplexMatrix spread = reduced - centre * ComplexMatrix::Identity(k, k);
        if (spread.norm() <= 1e-12 * scale) {
            // A multiple of the identity: every basis of the subspace is an eigenbasis.
            y = ComplexMatrix::Identity(k, k);
            values = reduced.diagonal();
        } else {
            Eigen::ComplexEigenSolver<ComplexMatrix> ces(reduced);
            y = ces.eigenvectors();
            values = ces.eigenvalues();
        }
        Eigen::FullPivLU<ComplexMatrix> y_lu(y);
        if (!y_lu.isInvertible())
            throw Error(ErrorCode::ConvergenceFailure, "cluster block is not diagonalizable");
        const ComplexMatrix w = y_lu.inverse();
        const ComplexMatrix rights = rc * y;
        const ComplexMatrix lefts = lc * overlap.inverse().adjoint() * w.adjoint();
        for (Eigen::Index c = 0; c < k; ++c) {
            Triple t;
            t.value = values(c);
            t.right = rights.col(c);
            t.left = lefts.col(c);
            out.push_back(std::move(t));
        }
    }

    // Polish isolated eigenvalues; exactly degenerate ones keep their subspace vectors.
    const double isolation = 1e-9 * scale;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < out.size(); ++j)
            if (j != i)
                nearest = std::min(nearest, std::abs(out[i].value - out[j].value));
        auto& t = out[i];
        if (nearest <= isolation) {
            t.degenerate = true;
            continue;
        }
        for (int round = 0; round < 3; ++round) {
            t.right = inverse_iteration(a, t.value, t.right.normalized(), 2, false, scale);
            t.left = inverse_iteration(a, t.value, t.left.normalized(), 2, true, scale);
            const cplx denom = t.left.dot(t.right);
            if (std::abs(denom) > 0.0)
                t.value = t.left.dot(a * t.right) / denom;
        }
    }
    return out;
}

std::vector<Triple> large_dimension_pairs(const ComplexMatrix& a)
{
    Eigen::ComplexEigenSolver<ComplexMatrix> ces(a);
    if (ces.info() != Eigen::Success)
        throw Error(ErrorCode::ConvergenceFailure, "complex Schur reduction did not converge");
    const ComplexMatrix v = ces.eigenvectors();
    Eigen::FullPivLU<ComplexMatrix> lu(v);
    if (!lu.isInvertible())
        throw Error(ErrorCode::SingularPairing, "eigenvector matrix is singular (defective matrix)");
    const ComplexMatrix lefts = lu.inverse().adjoint();
    std::vector<Triple> out;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        out.push_back({ces.eigenvalues()(i), v.col(i), lefts.col(i), false});
    return out;
}

} // namespace

Spectrum eig_general(const ComplexMatrix& a, const EigOptions& options)
{
    if (a.rows() != a.cols() || a.rows() == 0)
        throw Error(ErrorCode::DimensionMismatch, "eig_general needs a non-empty square matrix");
    if (!a.allFinite())
        throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");
    const auto n = a.rows();
    const double norm = a.norm();

    std::vector<Triple> triples;
    if (norm == 0.0) {
        for (Eigen::Index i = 0; i < n; ++i)
            triples.push_back({cplx{0.0, 0.0}, ComplexVector::Unit(n, i), ComplexVector::Unit(n, i), true});
    } else if (n <= 4) {
        triples = small_dimension_pairs(a, norm);
    } else {
        triples = large_dimension_pairs(a);
    }

    const double scale = std::max(norm, std::numeric_limits<double>::min());
    for (auto& t : triples) {
        const double rr = right_residual(a, t.value, t.right);
        const double lr = left_residual(a, t.value, t.left);
        if (!(rr <= options.tol * scale) || !(lr <= options.tol * scale))
            throw Error(ErrorCode::ConvergenceFailure,
                        "eigen-residual " + std::to_string(std::max(rr, lr) / scale) +
                            " exceeds tolerance");
        t.right.normalize();
    }

    std::sort(triples.begin(), triples.end(), [](const Triple& x, const Triple& y) {
        if (x.value.real() != y.value.real())
            return x.value.real() > y.value.real();
        return x.value.imag() > y.value.imag();
    });

    std::vector<ComplexVector> rights, lefts;
    for (auto& t : triples) {
        rights.push_back(t.right);
        lefts.push_back(t.left);
    }
    biorthonormalize(rights, lefts);

    Spectrum spectrum;
    spectrum.gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < triples.size(); ++i) {
        for (std::size_t j = i + 1; j < triples.size(); ++j)
            spectrum.gap = std::min(spectrum.gap, std::abs(triples[i].value - triples[j].value));
        spectrum.pairs.push_back({triples[i].value, rights[i], lefts[i]});
    }

    if (options.strict && spectrum.gap < options.degeneracy_threshold * scale)
        throw Error(ErrorCode::NearDegenerate,
                    "eigenvalue gap " + std::to_string(spectrum.gap) + " below degeneracy threshold");
    return spectrum;
}

void biorthonormalize(std::vector<ComplexVector>& rights, std::vector<ComplexVector>& lefts)
{
    if (rights.size() != lefts.size())
        throw Error(ErrorCode::DimensionMismatch, "rights and lefts differ in count");
    const auto k = static_cast<Eigen::Index>(rights.size());
    if (k == 0)
        return;
    const auto n = rights.front().size();
    ComplexMatrix r(n, k), l(n, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        if (rights[i].size() != n || lefts[i].size() != n)
            throw Error(ErrorCode::DimensionMismatch, "vector lengths differ");
        r.col(i) = rights[i];
        l.col(i) = lefts[i];
    }
    const ComplexMatrix overlap = l.adjoint() * r;
    Eigen::JacobiSVD<ComplexMatrix> svd(overlap);
    const auto& sv = svd.singularValues();
    if (sv(0) == 0.0 || sv(sv.size() - 1) < 1e-12 * sv(0))
        throw Error(ErrorCode::SingularPairing, "left/right overlap matrix is rank deficient");
    const ComplexMatrix fixed = l * overlap.inverse().adjoint();
    for (Eigen::Index i = 0; i < k; ++i)
        lefts[i] = fixed.col(i);
}

double biorthonormality_defect(const std::vector<ComplexVector>& rights,
                               const std::vector<ComplexVector>& lefts)
{
    double worst = 0.0;
    for (std::size_t m = 0; m < lefts.size(); ++m)
        for (std::size_t n = 0; n < rights.size(); ++n) {
            const cplx expected = (m == n) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            worst = std::max(worst, std::abs(lefts[m].dot(rights[n]) - expected));
        }
    return worst;
}

ComplexVector propagate_steps(const TimeGenerator& generator, const ComplexVector& psi0,
                              double t0, double t1, std::size_t steps)
{
    if (steps == 0)
        throw Error(ErrorCode::InvalidArgument, "propagate needs at least one step");
    const double h = (t1 - t0) / static_cast<double>(steps);
    auto rhs = [&](double t, const ComplexVector& psi) -> ComplexVector {
        return -I_UNIT * (generator(t) * psi);
    };
    ComplexVector psi = psi0;
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = t0 + h * static_cast<double>(s);
        const ComplexVector k1 = rhs(t, psi);
        const ComplexVector k2 = rhs(t + 0.5 * h, psi + 0.5 * h * k1);
        const ComplexVector k3 = rhs(t + 0.5 * h, psi + 0.5 * h * k2);
        const ComplexVector k4 = rhs(t + h, psi + h * k3);
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double largest = psi.cwiseAbs().maxCoeff();
        if (!std::isfinite(largest) || largest > 1e12)
            throw Error(ErrorCode::StepOverflow, "state component exceeded 1e12 at t=" + std::to_string(t + h));
    }
    return psi;
}

ComplexVector propagate(const TimeGenerator& generator, const ComplexVector& psi0,
                        double t0, double t1, double dt)
{
    if (!(dt > 0.0))
        throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    const double span = std::abs(t1 - t0);
    const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-12)));
    return propagate_steps(generator, psi0, t0, t1, steps);
}

std::size_t default_steps(double duration, double energy_scale)
{
    const double units = std::abs(duration * energy_scale);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2000.0 * units)));
}

} // namespace linalg
} // namespace openbo
