#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polartail/rng.hpp"

namespace polartail {

// Running first and second moments of a stream of replicate values. The sum
// is Kahan-compensated; the spread is kept as Welford's M2 so that a
// near-constant stream reports a near-zero variance.
struct Moments {
  std::size_t count = 0;
  double sum = 0.0;
  double compensation = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v);
  // Chan's pairwise update; merging is order-sensitive only in rounding.
  void merge(const Moments& other);

  double total() const { return sum - compensation; }
  double sample_mean() const;
  double sample_variance() const;
};

// How replicates are executed. The replicate index range [0, R) is cut into
// `workers` contiguous partitions, partition w drawing from the substream
// make_rng(seed, w, kReplicateStreamTag). Results depend on (seed, workers)
// only: the parallel and serial paths are bit-identical for equal inputs.
inline constexpr int kDefaultWorkers = 64;

struct Execution {
  int workers = kDefaultWorkers;
  bool parallel = true;
};

inline constexpr std::uint64_t kReplicateStreamTag = 0x7265706c;

// Per-worker replicate function; constructed once per partition so it may
// own scratch buffers.
using ReplicateFn = std::function<double(Rng&)>;
using ReplicateFactory = std::function<ReplicateFn()>;

// Error raised by a replicate, tagged with its position.
class ReplicateError : public std::runtime_error {
 public:
  ReplicateError(std::size_t index, const std::string& what)
      : std::runtime_error("replicate " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Size of partition w when R replicates are split across `workers`.
std::size_t partition_size(std::size_t R, int workers, int w);
std::size_t partition_begin(std::size_t R, int workers, int w);

Moments run_replicates(std::size_t R, std::uint64_t seed, const Execution& exec,
                       const ReplicateFactory& factory);
Moments run_replicates_serial(std::size_t R, std::uint64_t seed, int workers,
                              const ReplicateFactory& factory);
Moments run_replicates_parallel(std::size_t R, std::uint64_t seed, int workers,
                                const ReplicateFactory& factory);

// Sets the OpenMP thread count: `requested` if positive, else
// POLARTAIL_THREADS if set, else the runtime default. Returns the count in
// effect. Thread count never changes results, only wall time.
int configure_threads(int requested = 0);

}  // namespace polartail
