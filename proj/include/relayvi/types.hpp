#ifndef RELAYVI_TYPES_HPP
#define RELAYVI_TYPES_HPP

#include <complex>
#include <Eigen/Dense>

namespace relayvi {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

} // namespace relayvi

#endif
