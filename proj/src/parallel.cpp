#include "crmimo/parallel.hpp"

namespace crmimo::par {

namespace {
int g_max_threads = static_cast<int>(std::thread::hardware_concurrency());
}

int max_threads() { return g_max_threads > 0 ? g_max_threads : 1; }

void set_max_threads(int n) { g_max_threads = n > 0 ? n : 1; }

}  // namespace crmimo::par
