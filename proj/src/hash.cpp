#include "oam/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace oam {

std::string sha256_hex(std::span<const unsigned char> data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[md[i] >> 4]);
        out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    return sha256_hex(std::span(reinterpret_cast<const unsigned char*>(data.data()), data.size()));
}

}  // namespace oam
