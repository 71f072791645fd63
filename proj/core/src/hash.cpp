#include "cvaudit/hash.hpp"

#include <algorithm>
#include <cstdio>

namespace cvaudit {

std::string to_hex(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string digest_string(std::string_view data) { return to_hex(fnv1a64(data)); }

std::string digest_unordered(const std::vector<std::string>& records) {
    std::vector<uint64_t> hashes;
    hashes.reserve(records.size());
    for (const auto& r : records) hashes.push_back(fnv1a64(r));
    std::sort(hashes.begin(), hashes.end());
    uint64_t h = 0xcbf29ce484222325ull;
    for (uint64_t x : hashes) h = fnv1a64(to_hex(x), h);
    return to_hex(h);
}

}  // namespace cvaudit
