#include "lidc/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace lidc::log {

namespace {

std::atomic<Level> g_level{Level::kInfo};
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warning";
    case Level::kError: return "error";
    case Level::kOff: break;
  }
  return "";
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void write(Level lvl, std::string_view message) {
  if (lvl < g_level.load() || lvl == Level::kOff) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "[lidc " << tag(lvl) << "] " << message << '\n';
}

}  // namespace lidc::log
