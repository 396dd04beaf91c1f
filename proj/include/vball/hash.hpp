#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vball {

// FNV-1a 64-bit; used for content manifests and provenance stamps.
class Fnv1a64 {
public:
    Fnv1a64& update(const void* bytes, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(bytes);
        for (std::size_t i = 0; i < n; ++i) {
            state_ ^= p[i];
            state_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Fnv1a64& update(const std::string& s) { return update(s.data(), s.size()); }
    template <typename T>
    Fnv1a64& update_value(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        return update(&v, sizeof(v));
    }
    std::uint64_t value() const { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string hash_file_hex(const std::string& path);
std::string hash_string_hex(const std::string& s);

}  // namespace vball
