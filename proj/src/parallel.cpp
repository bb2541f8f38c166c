#include "shiftlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace shiftlab {

unsigned default_thread_count() {
  if (const char* env = std::getenv("SHIFTLAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace shiftlab
