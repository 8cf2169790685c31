// FFTW planning is not thread-safe; plan creation and destruction go through
// this lock. Executing an existing plan on fresh arrays is safe.
#pragma once

#include <mutex>

namespace spdelab::detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace spdelab::detail
