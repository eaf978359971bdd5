#include "horolab/parallel.hpp"

#include <omp.h>

namespace horolab {

namespace {
const int kDefaultThreads = omp_get_max_threads();
}

void set_thread_limit(int n) { omp_set_num_threads(n > 0 ? n : kDefaultThreads); }

int thread_limit() { return omp_get_max_threads(); }

}  // namespace horolab
