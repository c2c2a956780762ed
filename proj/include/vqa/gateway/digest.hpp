#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace vqa::gateway {

std::array<std::uint8_t, 32> sha256(std::string_view data);
std::string to_hex(std::span<const std::uint8_t> bytes);

}  // namespace vqa::gateway
