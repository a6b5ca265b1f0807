#include "waveseq/memory.hpp"

namespace waveseq {

AuxMemoryStats& aux_memory() noexcept {
    thread_local AuxMemoryStats stats;
    return stats;
}

void reset_aux_peak() noexcept {
    auto& s = aux_memory();
    s.peak = s.current;
}

}  // namespace waveseq
