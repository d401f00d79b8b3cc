#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mg {

// Every hot loop has a serial reference and an OpenMP version. Both produce
// bit-identical results: reductions use fixed-size blocks whose partial sums
// are combined in block order, independent of the thread count.
enum class Exec { Serial, Parallel };

inline constexpr std::size_t kReductionBlock = 4096;

// Sets the OpenMP worker count (<= 0 keeps the runtime default).
void set_threads(int threads);
int max_threads();

// Symmetric matrix stored as diagonal + off-diagonal CSR entries
// (y_i = diag_i x_i + sum_j offdiag_ij x_j).
struct SymmetricMatrix {
  std::vector<double> diag;
  std::vector<std::int64_t> offsets{0};
  std::vector<std::int32_t> cols;
  std::vector<double> vals;

  std::int32_t size() const noexcept { return static_cast<std::int32_t>(diag.size()); }
};

void spmv(const SymmetricMatrix& a, std::span<const double> x, std::span<double> y, Exec exec);
double dot(std::span<const double> a, std::span<const double> b, Exec exec);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y, Exec exec);
// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y, Exec exec);
// z = x .* y
void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> z, Exec exec);

// Runs body(i) for i in [0, count); the parallel version uses dynamic
// scheduling, so the body must write only to per-index outputs.
template <class Body>
void parallel_for(std::int64_t count, Exec exec, Body&& body) {
  if (exec == Exec::Serial) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < count; ++i) body(i);
}

}  // namespace mg
