#include "numkit/rng.hpp"

#include "numkit/hash.hpp"

namespace numkit {

std::uint64_t derive_seed(std::uint64_t root, const std::string& purpose, std::uint64_t index) {
    Fnv1a64 h;
    h.update(root);
    h.update(purpose);
    h.update(index);
    std::uint64_t s = h.digest();
    // mt19937_64 handles any seed, but avoid handing out 0 as a matter of hygiene.
    return s == 0 ? 0x9e3779b97f4a7c15ULL : s;
}

} // namespace numkit
