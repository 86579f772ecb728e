#include "mrst/core/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <string_view>

namespace mrst::parallel {

namespace {
int default_threads = omp_get_max_threads();
}

void set_threads(int n) { omp_set_num_threads(n > 0 ? n : default_threads); }

int threads() { return omp_get_max_threads(); }

int threads_from_env() {
    const char* env = std::getenv("MRST_THREADS");
    if (env == nullptr) return 0;
    std::string_view s(env);
    int n = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || ptr != s.data() + s.size() || n < 1) return 0;
    return n;
}

}  // namespace mrst::parallel
