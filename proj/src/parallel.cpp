#include "fraudward/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fraudward {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n >= 1) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

ThreadLimit::ThreadLimit(int n) : previous_(max_threads()) { set_threads(n); }

ThreadLimit::~ThreadLimit() { set_threads(previous_); }

}  // namespace fraudward
