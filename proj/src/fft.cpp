#include "kgloc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace kgloc::fft {

void* aligned_alloc_bytes(std::size_t bytes) { return fftw_malloc(bytes == 0 ? 16 : bytes); }
void aligned_free(void* p) { fftw_free(p); }

namespace {

struct PlanKey {
    int rank;
    Shape shape;
    int sign;
    bool operator<(const PlanKey& o) const {
        return std::tie(rank, shape, sign) < std::tie(o.rank, o.shape, o.sign);
    }
};

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan get_plan(int rank, const Shape& shape, int sign) {
    static std::map<PlanKey, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex());
    PlanKey key{rank, shape, sign};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::size_t n = 1;
    for (int k = 0; k < rank; ++k) n *= static_cast<std::size_t>(shape[k]);
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    fftw_plan p = fftw_plan_dft(rank, shape.data(), buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    cache.emplace(key, p);
    return p;
}

}  // namespace

void dft(int rank, const Shape& shape, cplx* data, int sign) {
    if (rank < 1 || rank > 3) throw std::invalid_argument("dft rank must be 1..3");
    fftw_plan p = get_plan(rank, shape, sign);
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

void checkerboard(int rank, const Shape& shape, cplx* data) {
    int n0 = shape[0], n1 = rank > 1 ? shape[1] : 1, n2 = rank > 2 ? shape[2] : 1;
    std::size_t idx = 0;
    for (int a = 0; a < n0; ++a)
        for (int b = 0; b < n1; ++b) {
            int par = (a + b) & 1;
            for (int c = 0; c < n2; ++c, ++idx)
                if (((par + c) & 1) != 0) data[idx] = -data[idx];
        }
}

void centered_dft(int rank, const Shape& shape, cplx* data, int sign) {
    for (int k = 0; k < rank; ++k)
        if (shape[k] % 4 != 0) throw std::invalid_argument("centered_dft needs extents divisible by 4");
    checkerboard(rank, shape, data);
    dft(rank, shape, data, sign);
    checkerboard(rank, shape, data);
}

}  // namespace kgloc::fft
