#include "fracfield/parallel.hpp"

#include <cstdlib>
#include <string>

#include "fracfield/errors.hpp"

namespace fracfield {

int worker_count() {
  const char* env = std::getenv("FRACFIELD_THREADS");
  int n = 0;
  if (env != nullptr && *env != '\0') {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("FRACFIELD_THREADS is not an integer: ") + env);
    }
    if (n < 0) throw ConfigError("FRACFIELD_THREADS must be >= 0");
  }
  if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return n < 1 ? 1 : n;
}

}  // namespace fracfield
