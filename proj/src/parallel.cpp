#include "curveflow/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace curveflow {

namespace {
int g_threads = 1;
}

void set_thread_count(int n) {
  g_threads = n < 1 ? 1 : n;
  omp_set_num_threads(g_threads);
}

int thread_count() { return g_threads; }

int thread_count_from_env() {
  const char* env = std::getenv("CURVEFLOW_THREADS");
  if (env == nullptr) return 0;
  try {
    int n = std::stoi(env);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace curveflow
