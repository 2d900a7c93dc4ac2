#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

namespace nonharm {

using cplx = std::complex<double>;
using Vec  = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat  = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using BoolGrid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

// Worker threads for fill loops: hardware concurrency capped by the
// NONHARM_THREADS environment variable.
unsigned worker_count();

// Chunked loop over [0, n). body(begin, end) runs on disjoint ranges, so
// results are identical for any thread count as long as writes are disjoint.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// Compensated summation. The coefficient sums feeding masked divisions have
// to stay near machine precision even at large node counts.
cplx kahan_sum(const cplx* data, std::size_t n);
double kahan_sum(const double* data, std::size_t n);

// Split real*complex products (cheaper than promoting the real factor).
Mat dmul(const RMat& d, const Mat& m);
Mat muld(const Mat& m, const RMat& d);

// Fixed-format float for reports; identical input bits give identical text.
std::string fmt_double(double v);

} // namespace nonharm
