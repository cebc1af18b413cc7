// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mlcc/u256.hpp"

namespace mlcc {

// FNV-1a; stable across platforms and runs. Used for both function
// selectors and exception/event tags.
inline uint32_t stable_hash32(std::string_view s) {
    uint32_t h = 2166136261u;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 16777619u;
    }
    return h;
}

inline U256 selector_of(std::string_view fn_name) { return U256(stable_hash32(fn_name)); }
inline U256 tag_of(std::string_view exc_name) { return U256(stable_hash32(exc_name)); }

// Transactions select a function by a 4-byte selector followed by one
// 32-byte word per argument.
std::vector<uint8_t> encode_calldata(std::string_view fn_name, const std::vector<U256>& args);

// 4-byte revert payloads carry the exception tag.
bool decode_revert_tag(const std::vector<uint8_t>& data, uint32_t* tag_out);

std::string hex_of_bytes(const std::vector<uint8_t>& data);
std::vector<uint8_t> bytes_of_hex(const std::string& hex);  // throws on odd/garbled input

}  // namespace mlcc
