#pragma once

// Deterministic worker-thread helpers.  Work is always split into fixed-size
// chunks that depend only on the loop extent, never on the thread count, and
// reductions combine per-chunk partials serially in chunk order.  This makes
// every diagnostic bit-identical whether the run uses 1 or 8 threads.

#include "clg/types.hpp"

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace clg {

// Global worker count (1 = serial).  Not part of the simulation config so that
// identical configs always describe identical runs.
void set_num_threads(int n);
int num_threads();

namespace detail {

inline constexpr Index kChunk = 8192; // fixed chunk; independent of threads

// Runs body(chunk_index) for chunk indices [0, n_chunks), distributing chunks
// over the worker pool.  Chunk claim order is nondeterministic but each chunk
// is processed exactly once and writes only to its own slots.
void run_chunked(Index n_chunks, const std::function<void(Index)>& body);

} // namespace detail

// Parallel loop over [0, n); f(i) must only write to index-i state.
template <class F>
void parallel_for(Index n, F&& f) {
  if (n <= 0) return;
  const Index n_chunks = (n + detail::kChunk - 1) / detail::kChunk;
  detail::run_chunked(n_chunks, [&](Index c) {
    const Index lo = c * detail::kChunk;
    const Index hi = std::min(n, lo + detail::kChunk);
    for (Index i = lo; i < hi; ++i) f(i);
  });
}

// Deterministic sum reduction: per-chunk partials are accumulated serially in
// chunk order, so the floating-point result does not depend on thread count.
template <class F>
Real parallel_sum(Index n, F&& term) {
  if (n <= 0) return Real(0);
  const Index n_chunks = (n + detail::kChunk - 1) / detail::kChunk;
  std::vector<Real> partial(static_cast<size_t>(n_chunks), Real(0));
  detail::run_chunked(n_chunks, [&](Index c) {
    const Index lo = c * detail::kChunk;
    const Index hi = std::min(n, lo + detail::kChunk);
    Real acc = 0;
    for (Index i = lo; i < hi; ++i) acc += term(i);
    partial[static_cast<size_t>(c)] = acc;
  });
  Real total = 0;
  for (Real p : partial) total += p;
  return total;
}

// Deterministic max reduction (same chunking scheme as parallel_sum).
template <class F>
Real parallel_max(Index n, F&& term) {
  if (n <= 0) return Real(0);
  const Index n_chunks = (n + detail::kChunk - 1) / detail::kChunk;
  std::vector<Real> partial(static_cast<size_t>(n_chunks), Real(0));
  detail::run_chunked(n_chunks, [&](Index c) {
    const Index lo = c * detail::kChunk;
    const Index hi = std::min(n, lo + detail::kChunk);
    Real acc = 0;
    for (Index i = lo; i < hi; ++i) acc = std::max(acc, term(i));
    partial[static_cast<size_t>(c)] = acc;
  });
  Real total = 0;
  for (Real p : partial) total = std::max(total, p);
  return total;
}

} // namespace clg
