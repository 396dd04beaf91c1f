#include "vball/hash.hpp"

#include <cstdio>
#include <fstream>

#include "vball/errors.hpp"

namespace vball {

std::string Fnv1a64::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state_));
    return std::string(buf);
}

std::string hash_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    Fnv1a64 h;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

std::string hash_string_hex(const std::string& s) {
    return Fnv1a64().update(s).hex();
}

}  // namespace vball
