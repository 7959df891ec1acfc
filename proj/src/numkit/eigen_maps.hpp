#pragma once

#include <Eigen/Core>

namespace earlywarn::numkit::detail {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatrixMap = Eigen::Map<Matrix<T>>;
template <class T>
using ConstMatrixMap = Eigen::Map<const Matrix<T>>;
template <class T>
using RowVectorMap = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <class T>
using ConstRowVectorMap = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;

// Rows of a (b, t, c) tensor at a fixed time step: b rows of c, stride t * c.
template <class T>
using StridedRows =
    Eigen::Map<const Matrix<T>, Eigen::Unaligned, Eigen::OuterStride<Eigen::Dynamic>>;
template <class T>
using MutableStridedRows =
    Eigen::Map<Matrix<T>, Eigen::Unaligned, Eigen::OuterStride<Eigen::Dynamic>>;

// out[j] += sum_i m(i, j), rows accumulated in order. Eigen's colwise().sum()
// picks its reduction order from the buffer address, which breaks run-to-run
// reproducibility.
template <class T, class Derived>
void add_column_sums(const Eigen::MatrixBase<Derived>& m, T* out) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[j] += m(i, j);
}

}  // namespace earlywarn::numkit::detail
