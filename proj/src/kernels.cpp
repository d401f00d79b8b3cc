#include "mothergraph/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace mg {

void set_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

int max_threads() { return omp_get_max_threads(); }

void spmv(const SymmetricMatrix& a, std::span<const double> x, std::span<double> y, Exec exec) {
  const std::int64_t n = a.size();
  auto row = [&](std::int64_t i) {
    double s = a.diag[i] * x[i];
    for (std::int64_t k = a.offsets[i]; k < a.offsets[i + 1]; ++k) s += a.vals[k] * x[a.cols[k]];
    y[i] = s;
  };
  if (exec == Exec::Serial) {
    for (std::int64_t i = 0; i < n; ++i) row(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) row(i);
}

double dot(std::span<const double> a, std::span<const double> b, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  const std::int64_t blocks = (n + kReductionBlock - 1) / static_cast<std::int64_t>(kReductionBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  auto block = [&](std::int64_t k) {
    const std::int64_t lo = k * kReductionBlock;
    const std::int64_t hi = std::min<std::int64_t>(n, lo + kReductionBlock);
    double s = 0;
    for (std::int64_t i = lo; i < hi; ++i) s += a[i] * b[i];
    partial[k] = s;
  };
  if (exec == Exec::Serial || blocks < 2) {
    for (std::int64_t k = 0; k < blocks; ++k) block(k);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < blocks; ++k) block(k);
  }
  double s = 0;
  for (double p : partial) s += p;
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  if (exec == Exec::Serial) {
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  if (exec == Exec::Serial) {
    for (std::int64_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  if (exec == Exec::Serial) {
    for (std::int64_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

}  // namespace mg
