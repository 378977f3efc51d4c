#pragma once

#include <cstdint>
#include <cstring>
#include <string>

namespace numkit {

/// Incremental FNV-1a (64-bit). Used for dataset and artifact fingerprints;
/// not cryptographic.
class Fnv1a64 {
  public:
    Fnv1a64& update(const void* bytes, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(bytes);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= static_cast<std::uint64_t>(p[i]);
            h_ *= 0x100000001b3ULL;
        }
        return *this;
    }

    Fnv1a64& update(const std::string& s) { return update(s.data(), s.size()); }

    Fnv1a64& update(std::uint64_t v) {
        unsigned char b[8];
        std::memcpy(b, &v, 8);
        return update(b, 8);
    }

    Fnv1a64& update(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        return update(bits);
    }

    std::uint64_t digest() const { return h_; }

    std::string hex() const;

  private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

} // namespace numkit
