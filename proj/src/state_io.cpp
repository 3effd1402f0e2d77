#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "kgloc/states.hpp"

namespace kgloc::mom {

namespace {
constexpr char kMagic[4] = {'K', 'G', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& o, const T& v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("truncated state file");
    return v;
}
}  // namespace

void save_state(const MassShellState& psi, const std::string& path) {
    std::ofstream o(path, std::ios::binary);
    if (!o) throw std::runtime_error("cannot open " + path + " for writing");
    o.write(kMagic, 4);
    put(o, kVersion);
    put<std::int32_t>(o, psi.grid.dim());
    put<std::int32_t>(o, psi.grid.n());
    put(o, psi.grid.p_max());
    put(o, psi.grid.mass());
    for (double c : psi.native.n) put(o, c);
    for (const auto& z : psi.psi) {
        put(o, z.real());
        put(o, z.imag());
    }
    if (!o) throw std::runtime_error("write failed for " + path);
}

MassShellState load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path + " is not a state file");
    if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported state file version");
    int dim = get<std::int32_t>(in);
    int n = get<std::int32_t>(in);
    double p_max = get<double>(in);
    double mass = get<double>(in);
    MassShellState s{MomentumGrid(dim, n, p_max, mass)};
    for (double& c : s.native.n) c = get<double>(in);
    s.native.validate();
    for (auto& z : s.psi) {
        double re = get<double>(in);
        double im = get<double>(in);
        z = {re, im};
    }
    return s;
}

}  // namespace kgloc::mom
