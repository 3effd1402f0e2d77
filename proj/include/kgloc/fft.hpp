#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace kgloc::fft {

using cplx = std::complex<double>;

void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p);

template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) {}
    T* allocate(std::size_t n) {
        void* p = aligned_alloc_bytes(n * sizeof(T));
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { aligned_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const { return true; }
    template <class U>
    bool operator!=(const FftwAllocator<U>&) const { return false; }
};

using CVec = std::vector<cplx, FftwAllocator<cplx>>;

using Shape = std::array<int, 3>;  // unused trailing axes have extent 1

inline std::size_t volume(const Shape& s) {
    return static_cast<std::size_t>(s[0]) * static_cast<std::size_t>(s[1]) * static_cast<std::size_t>(s[2]);
}

// In-place DFT over the first `rank` axes; sign -1 forward, +1 backward (unnormalized).
void dft(int rank, const Shape& shape, cplx* data, int sign);

// Multiply by (-1)^(j0+j1+j2). On a centered grid with every extent divisible by 4 this turns
// the sum over (i - M/2)(j - M/2) into a plain DFT.
void checkerboard(int rank, const Shape& shape, cplx* data);

// Centered transform pair: out_j = sum_i in_i exp(sign * 2 pi i (i-M/2)(j-M/2)/M), per axis.
void centered_dft(int rank, const Shape& shape, cplx* data, int sign);

}  // namespace kgloc::fft
