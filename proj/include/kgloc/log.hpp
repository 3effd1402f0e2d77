#pragma once

#include <string>

namespace kgloc {

// KGLOC_VERBOSE: 0 quiet, 1 warnings (default), 2 progress
int verbosity();
void set_verbosity(int v);
void warn(const std::string& msg);
void info(const std::string& msg);

// KGLOC_THREADS, default 1
int thread_count();

}  // namespace kgloc
