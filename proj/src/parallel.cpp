#include "holodepth/parallel.hpp"

#include "holodepth/error.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace holodepth {

namespace {

std::atomic<bool> g_sequential{false};
std::atomic<unsigned> g_thread_count{0};
thread_local bool t_inside_region = false;

unsigned env_thread_cap() {
  const char* value = std::getenv("HOLODEPTH_THREADS");
  if (value == nullptr) return 0;
  char* end = nullptr;
  const long parsed = std::strtol(value, &end, 10);
  if (end == value || parsed <= 0) return 0;
  return static_cast<unsigned>(parsed);
}

}  // namespace

void warn(const std::string& message) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::cerr << "warning: " << message << '\n';
}

void set_sequential(bool enabled) { g_sequential = enabled; }

bool sequential_mode() { return g_sequential; }

void set_thread_count(unsigned count) { g_thread_count = count; }

unsigned worker_count() {
  if (g_sequential) return 1;
  if (const unsigned fixed = g_thread_count; fixed != 0) return fixed;
  unsigned count = std::max(1u, std::thread::hardware_concurrency());
  if (const unsigned cap = env_thread_cap(); cap != 0) count = std::min(count, cap);
  return count;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  const std::size_t workers = std::min<std::size_t>(worker_count(), total);
  if (workers <= 1 || t_inside_region) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_chunk = [&](std::size_t first, std::size_t last) {
    t_inside_region = true;
    try {
      for (std::size_t i = first; i < last; ++i) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
    t_inside_region = false;
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  const std::size_t chunk = (total + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t first = begin + w * chunk;
    const std::size_t last = std::min(end, first + chunk);
    if (first >= last) break;
    threads.emplace_back(run_chunk, first, last);
  }
  run_chunk(begin, std::min(end, begin + chunk));
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace holodepth
