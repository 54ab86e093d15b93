#include "specflow/core/parallel.hpp"

#include <omp.h>

namespace specflow {

void set_worker_count(int n) { omp_set_num_threads(n > 0 ? n : omp_get_num_procs()); }

int worker_count() { return omp_get_max_threads(); }

}  // namespace specflow
