#include "numkit/hash.hpp"

#include <cstdio>

namespace numkit {

std::string Fnv1a64::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h_));
    return std::string(buf);
}

} // namespace numkit
