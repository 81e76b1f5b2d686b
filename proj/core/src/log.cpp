#include "gatsim/log.hpp"

#include <atomic>

#include <spdlog/spdlog.h>

namespace gatsim {

namespace {
std::atomic<bool> g_enabled{true};
std::atomic<std::size_t> g_count{0};
}  // namespace

void log_warning(const std::string& message) {
  g_count.fetch_add(1, std::memory_order_relaxed);
  if (g_enabled.load(std::memory_order_relaxed)) spdlog::warn("{}", message);
}

void set_warnings_enabled(bool enabled) { g_enabled.store(enabled, std::memory_order_relaxed); }

std::size_t warning_count() { return g_count.load(std::memory_order_relaxed); }

}  // namespace gatsim
