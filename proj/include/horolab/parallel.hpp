#pragma once

namespace horolab {

/// Caps the worker count used by parallel loops; n <= 0 restores the default.
void set_thread_limit(int n);
int thread_limit();

}  // namespace horolab
