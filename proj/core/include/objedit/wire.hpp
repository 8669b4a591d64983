#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace objedit::wire {

// Standard alphabet with '=' padding; rejects whitespace-free garbage with
// MalformedReply so wire errors surface as such.
std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace objedit::wire
