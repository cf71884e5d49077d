#include "hawkes_impact/random.hpp"

namespace hawkes_impact {

Rng make_rng(std::uint64_t seed, std::uint64_t replication, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replication), static_cast<std::uint32_t>(replication >> 32),
                      static_cast<std::uint32_t>(stream), 0x68617778u};
    return Rng(seq);
}

}  // namespace hawkes_impact
