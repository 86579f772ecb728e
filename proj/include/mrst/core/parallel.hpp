#pragma once

#include <algorithm>
#include <cstddef>

namespace mrst::parallel {

/// Caps the OpenMP worker count for all kernels. n <= 0 restores the runtime default.
void set_threads(int n);
int threads();

/// Reads MRST_THREADS; returns 0 when unset or unparsable.
int threads_from_env();

// Reductions are split into blocks whose boundaries depend only on the problem
// size, never on the worker count, and partial results are merged in block
// order. That makes every kernel bit-identical for any number of threads.
inline constexpr std::ptrdiff_t kColumnBlock = 512;

struct BlockRange {
    std::ptrdiff_t begin;
    std::ptrdiff_t end;
};

inline std::ptrdiff_t block_count(std::ptrdiff_t n, std::ptrdiff_t block = kColumnBlock) {
    return n <= 0 ? 0 : (n + block - 1) / block;
}

inline BlockRange block_range(std::ptrdiff_t b, std::ptrdiff_t n, std::ptrdiff_t block = kColumnBlock) {
    return {b * block, std::min(n, (b + 1) * block)};
}

}  // namespace mrst::parallel
