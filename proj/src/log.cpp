#include "kgloc/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <set>

namespace kgloc {

namespace {
int env_int(const char* name, int def) {
    const char* s = std::getenv(name);
    if (!s || !*s) return def;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s) return def;
    return static_cast<int>(v);
}

std::atomic<int>& level() {
    static std::atomic<int> v{env_int("KGLOC_VERBOSE", 1)};
    return v;
}

std::mutex& out_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

int verbosity() { return level().load(); }
void set_verbosity(int v) { level().store(v); }

void warn(const std::string& msg) {
    if (verbosity() < 1) return;
    static std::set<std::string> seen;  // each distinct message once per process
    std::lock_guard<std::mutex> lock(out_mutex());
    if (!seen.insert(msg).second && verbosity() < 2) return;
    std::cerr << "kgloc warning: " << msg << "\n";
}

void info(const std::string& msg) {
    if (verbosity() < 2) return;
    std::lock_guard<std::mutex> lock(out_mutex());
    std::cerr << "kgloc: " << msg << "\n";
}

int thread_count() {
    int n = env_int("KGLOC_THREADS", 1);
    return n < 1 ? 1 : n;
}

}  // namespace kgloc
