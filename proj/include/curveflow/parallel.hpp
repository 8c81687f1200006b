#pragma once

#include <cstddef>

namespace curveflow {

// Worker count used by the node loops. Work is split into static contiguous
// chunks and every node is computed independently, so results never depend
// on the thread count.
void set_thread_count(int n);
int thread_count();

// Reads CURVEFLOW_THREADS; returns 0 when unset or invalid.
int thread_count_from_env();

}  // namespace curveflow
