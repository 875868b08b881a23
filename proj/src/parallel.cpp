#include "dcmicro/parallel.hpp"

#include <atomic>

#include <omp.h>

namespace dcmicro {

namespace {
std::atomic<bool> g_parallel{true};
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

SerialScope::SerialScope() : saved_(parallel_enabled()) { set_parallel(false); }
SerialScope::~SerialScope() { set_parallel(saved_); }

}  // namespace dcmicro
