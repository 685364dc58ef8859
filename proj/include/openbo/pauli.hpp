#pragma once

#include "openbo/linalg.hpp"

namespace openbo::pauli {

// Basis convention: |up> = (1, 0), |down> = (0, 1).

inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix x()
{
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline ComplexMatrix y()
{
    ComplexMatrix m(2, 2);
    m << 0.0, -I_UNIT, I_UNIT, 0.0;
    return m;
}

inline ComplexMatrix z()
{
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

// Lowering operator |down><up|.
inline ComplexMatrix lowering()
{
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline ComplexMatrix raising() { return lowering().adjoint(); }

} // namespace openbo::pauli
