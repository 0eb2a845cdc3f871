#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace eigenparity::warnings {

// Thread-local collector for non-fatal conditions (floored dispersions,
// provenance mismatches, per-date fallbacks). Library code emits; the CLI
// echoes to stderr, tests drain and assert.

inline std::vector<std::string>& sink() {
  thread_local std::vector<std::string> messages;
  return messages;
}

inline bool& echo_to_stderr() {
  thread_local bool echo = false;
  return echo;
}

inline void emit(std::string message) {
  if (echo_to_stderr()) std::fprintf(stderr, "warning: %s\n", message.c_str());
  sink().push_back(std::move(message));
}

inline std::vector<std::string> drain() {
  std::vector<std::string> out;
  out.swap(sink());
  return out;
}

}  // namespace eigenparity::warnings
