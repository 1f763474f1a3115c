#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace movdom {

using Index = std::int64_t;
using Complex = std::complex<double>;

/// Points and vectors in dimension one or two.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using CVec = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, 2, 1>;

using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using SparseC = Eigen::SparseMatrix<Complex>;
using SparseR = Eigen::SparseMatrix<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline const Complex kI{0.0, 1.0};

}  // namespace movdom
