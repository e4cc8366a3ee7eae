#include "sps/parallel.hpp"

#include <omp.h>

namespace sps {

int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace sps
