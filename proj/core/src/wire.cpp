#include "objedit/wire.hpp"

#include <array>

#include "objedit/error.hpp"

namespace objedit::wire {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<int, 256> decode_table() {
    std::array<int, 256> t{};
    t.fill(-1);
    for (int i = 0; i < 64; ++i) t[size_t(kAlphabet[i])] = i;
    return t;
}

}  // namespace

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        std::uint32_t n = (std::uint32_t(bytes[i]) << 16) | (std::uint32_t(bytes[i + 1]) << 8) |
                          bytes[i + 2];
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += kAlphabet[n & 63];
    }
    size_t rest = bytes.size() - i;
    if (rest == 1) {
        std::uint32_t n = std::uint32_t(bytes[i]) << 16;
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += "==";
    } else if (rest == 2) {
        std::uint32_t n = (std::uint32_t(bytes[i]) << 16) | (std::uint32_t(bytes[i + 1]) << 8);
        out += kAlphabet[(n >> 18) & 63];
        out += kAlphabet[(n >> 12) & 63];
        out += kAlphabet[(n >> 6) & 63];
        out += '=';
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    static const std::array<int, 256> table = decode_table();
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t acc = 0;
    int have = 0;
    int padding = 0;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
        if (c == '=') {
            ++padding;
            continue;
        }
        if (padding > 0 || table[c] < 0)
            throw Error(ErrorCode::MalformedReply, "invalid base64 payload");
        acc = (acc << 6) | std::uint32_t(table[c]);
        if (++have == 4) {
            out.push_back(std::uint8_t(acc >> 16));
            out.push_back(std::uint8_t(acc >> 8));
            out.push_back(std::uint8_t(acc));
            acc = 0;
            have = 0;
        }
    }
    if (have == 2) {
        out.push_back(std::uint8_t(acc >> 4));
    } else if (have == 3) {
        out.push_back(std::uint8_t(acc >> 10));
        out.push_back(std::uint8_t(acc >> 2));
    } else if (have != 0) {
        throw Error(ErrorCode::MalformedReply, "truncated base64 payload");
    }
    return out;
}

}  // namespace objedit::wire
