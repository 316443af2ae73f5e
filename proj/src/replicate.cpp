#include "polartail/replicate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polartail {

void Moments::add(double v) {
  const double y = v - compensation;
  const double t = sum + y;
  compensation = (t - sum) - y;
  sum = t;
  ++count;
  const double delta = v - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (v - mean);
}

void Moments::merge(const Moments& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  // Kahan-add the other partition's compensated total.
  for (double part : {other.sum, -other.compensation}) {
    const double y = part - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  const double n_a = static_cast<double>(count);
  const double n_b = static_cast<double>(other.count);
  const double n = n_a + n_b;
  const double delta = other.mean - mean;
  mean += delta * n_b / n;
  m2 += other.m2 + delta * delta * n_a * n_b / n;
  count += other.count;
}

double Moments::sample_mean() const {
  if (count == 0) return std::nan("");
  return total() / static_cast<double>(count);
}

double Moments::sample_variance() const {
  if (count < 2) return 0.0;
  return std::max(m2, 0.0) / static_cast<double>(count - 1);
}

std::size_t partition_size(std::size_t R, int workers, int w) {
  const auto W = static_cast<std::size_t>(workers);
  return R / W + (static_cast<std::size_t>(w) < R % W ? 1 : 0);
}

std::size_t partition_begin(std::size_t R, int workers, int w) {
  const auto W = static_cast<std::size_t>(workers);
  const auto k = static_cast<std::size_t>(w);
  return k * (R / W) + std::min(k, R % W);
}

namespace {

Moments run_partition(std::size_t R, std::uint64_t seed, int workers, int w,
                      const ReplicateFactory& factory) {
  Rng rng = make_rng(seed, static_cast<std::uint64_t>(w), kReplicateStreamTag);
  const std::size_t begin = partition_begin(R, workers, w);
  const std::size_t n = partition_size(R, workers, w);
  ReplicateFn fn = factory();
  Moments m;
  for (std::size_t k = 0; k < n; ++k) {
    double v;
    try {
      v = fn(rng);
    } catch (const std::exception& e) {
      throw ReplicateError(begin + k, e.what());
    }
    if (!std::isfinite(v)) throw ReplicateError(begin + k, "non-finite replicate value");
    m.add(v);
  }
  return m;
}

void check_workers(int workers) {
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
}

}  // namespace

Moments run_replicates_serial(std::size_t R, std::uint64_t seed, int workers,
                              const ReplicateFactory& factory) {
  check_workers(workers);
  Moments total;
  for (int w = 0; w < workers; ++w) total.merge(run_partition(R, seed, workers, w, factory));
  return total;
}

Moments run_replicates_parallel(std::size_t R, std::uint64_t seed, int workers,
                                const ReplicateFactory& factory) {
  check_workers(workers);
  std::vector<Moments> parts(static_cast<std::size_t>(workers));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
#pragma omp parallel for schedule(dynamic, 1)
  for (int w = 0; w < workers; ++w) {
    try {
      parts[w] = run_partition(R, seed, workers, w, factory);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  Moments total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

Moments run_replicates(std::size_t R, std::uint64_t seed, const Execution& exec,
                       const ReplicateFactory& factory) {
  return exec.parallel ? run_replicates_parallel(R, seed, exec.workers, factory)
                       : run_replicates_serial(R, seed, exec.workers, factory);
}

int configure_threads(int requested) {
  int n = requested;
  if (n < 1) {
    if (const char* env = std::getenv("POLARTAIL_THREADS")) n = std::atoi(env);
  }
#ifdef _OPENMP
  if (n >= 1) omp_set_num_threads(n);
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace polartail
