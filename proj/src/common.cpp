#include "nonharm/common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>
#include <vector>

namespace nonharm {

unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("NONHARM_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t b = t * chunk;
    const std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& th : pool) th.join();
}

namespace {
template <class T>
T kahan_impl(const T* data, std::size_t n) {
  T sum{};
  T carry{};
  for (std::size_t i = 0; i < n; ++i) {
    const T y = data[i] - carry;
    const T t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}
} // namespace

cplx kahan_sum(const cplx* data, std::size_t n) { return kahan_impl(data, n); }
double kahan_sum(const double* data, std::size_t n) { return kahan_impl(data, n); }

Mat dmul(const RMat& d, const Mat& m) {
  Mat out(d.rows(), m.cols());
  out.real() = d * m.real();
  out.imag() = d * m.imag();
  return out;
}

Mat muld(const Mat& m, const RMat& d) {
  Mat out(m.rows(), d.cols());
  out.real() = m.real() * d;
  out.imag() = m.imag() * d;
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

} // namespace nonharm
