#pragma once

// Execution selection for the data-parallel kernels. Every kernel that takes an
// Execution has a serial reference path; both paths write results by index so
// the output does not depend on thread count or scheduling.

namespace dftrap {

enum class Execution { serial, parallel };

/// Sets the OpenMP team size used by Execution::parallel kernels (0 = runtime default).
void set_worker_count(int workers);
int worker_count();

}  // namespace dftrap
