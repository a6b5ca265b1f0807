#ifndef WAVESEQ_MEMORY_HPP
#define WAVESEQ_MEMORY_HPP

#include <cstddef>
#include <memory>
#include <vector>

namespace waveseq {

/// Per-thread byte accounting for the auxiliary buffers of the engine and
/// the traceback code (boundary columns, captured rows, predecessor bits).
struct AuxMemoryStats {
    std::size_t current = 0;
    std::size_t peak = 0;
};

AuxMemoryStats& aux_memory() noexcept;

/// Resets the calling thread's peak to its current usage.
void reset_aux_peak() noexcept;

template <class T>
struct CountingAllocator {
    using value_type = T;

    CountingAllocator() noexcept = default;
    template <class U>
    CountingAllocator(const CountingAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        auto& stats = aux_memory();
        stats.current += n * sizeof(T);
        if (stats.current > stats.peak) stats.peak = stats.current;
        return std::allocator<T>{}.allocate(n);
    }

    void deallocate(T* p, std::size_t n) noexcept {
        aux_memory().current -= n * sizeof(T);
        std::allocator<T>{}.deallocate(p, n);
    }

    template <class U>
    bool operator==(const CountingAllocator<U>&) const noexcept { return true; }
};

template <class T>
using tracked_vector = std::vector<T, CountingAllocator<T>>;

}  // namespace waveseq

#endif
