#include "clg/parallel.hpp"

namespace clg {

namespace {
int g_num_threads = 1;
}

void set_num_threads(int n) { g_num_threads = n < 1 ? 1 : n; }
int num_threads() { return g_num_threads; }

namespace detail {

void run_chunked(Index n_chunks, const std::function<void(Index)>& body) {
  const int nt = g_num_threads;
  if (nt <= 1 || n_chunks <= 1) {
    for (Index c = 0; c < n_chunks; ++c) body(c);
    return;
  }
  std::atomic<Index> next{0};
  auto worker = [&]() {
    for (;;) {
      const Index c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      body(c);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<Index>(nt, n_chunks)) - 1;
  pool.reserve(static_cast<size_t>(spawn));
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

} // namespace detail
} // namespace clg
