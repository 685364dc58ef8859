#pragma once

#include <random>

#include "openbo/linalg.hpp"

namespace testing {

using openbo::ComplexMatrix;
using openbo::ComplexVector;
using openbo::cplx;

inline std::mt19937_64& rng()
{
    static std::mt19937_64 engine(12345);
    return engine;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> normal;
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = cplx{normal(rng()), normal(rng())};
    return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n)
{
    const ComplexMatrix a = random_matrix(n, n);
    return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_density(Eigen::Index n)
{
    const ComplexMatrix a = random_matrix(n, n);
    ComplexMatrix rho = a * a.adjoint();
    return rho / rho.trace();
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace testing
