#pragma once

#include <Eigen/Dense>

namespace ohit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Mirror the lower triangle into the upper one so that mirrored entries
// compare exactly equal.
inline void symmetrize_from_lower(Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = j + 1; i < m.rows(); ++i)
            m(j, i) = m(i, j);
}

inline bool is_exactly_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = j + 1; i < m.rows(); ++i)
            if (m(i, j) != m(j, i)) return false;
    return true;
}

}  // namespace ohit
