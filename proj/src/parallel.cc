#include "linklouvain/parallel.h"

#include <atomic>

namespace linklouvain {

namespace {

unsigned hardware_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::atomic<unsigned> g_threads{hardware_threads()};

}  // namespace

void set_thread_count(unsigned threads) {
  g_threads = threads == 0 ? hardware_threads() : threads;
}

unsigned thread_count() { return g_threads; }

}  // namespace linklouvain
