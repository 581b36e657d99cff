#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conspigraph/common.hpp"

namespace conspigraph::crypto {

using Digest256 = std::array<std::uint8_t, 32>;

/// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
 public:
  Sha256();
  void update(std::span<const std::uint8_t> data);
  void update(std::string_view data);
  Digest256 finish();

 private:
  void compress(const std::uint8_t* block);

  std::array<std::uint32_t, 8> state_;
  std::array<std::uint8_t, 64> buffer_{};
  std::size_t buffered_ = 0;
  std::uint64_t total_ = 0;
};

Digest256 sha256(std::span<const std::uint8_t> data);
Digest256 sha256(std::string_view data);
Digest256 sha256d(std::span<const std::uint8_t> data);

/// SHA-256 of a file's content, streamed.
Digest256 sha256_file(const fs::path& path);

/// Keccak-256 as used by Ethereum (original 0x01 padding, not SHA3-256).
Digest256 keccak256(std::span<const std::uint8_t> data);
Digest256 keccak256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);

namespace base58 {

inline constexpr std::string_view kAlphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

bool is_base58_char(char c);
std::optional<std::vector<std::uint8_t>> decode(std::string_view text);
std::string encode(std::span<const std::uint8_t> bytes);

/// Decodes and verifies the trailing 4-byte double-SHA-256 checksum.
/// Returns the payload without checksum.
std::optional<std::vector<std::uint8_t>> decode_check(std::string_view text);
std::string encode_check(std::span<const std::uint8_t> payload);

}  // namespace base58

namespace bech32 {

enum class Encoding { bech32, bech32m };

struct Decoded {
  Encoding encoding;
  std::string hrp;
  std::vector<std::uint8_t> data;  // 5-bit groups, checksum stripped
};

/// BIP-173 decode; accepts either checksum constant and reports which.
/// Rejects mixed case, bad characters, and lengths over 90.
std::optional<Decoded> decode(std::string_view text);
std::string encode(std::string_view hrp, std::span<const std::uint8_t> data5, Encoding enc);

std::optional<std::vector<std::uint8_t>> convert_bits(std::span<const std::uint8_t> in, int from, int to, bool pad);

}  // namespace bech32

}  // namespace conspigraph::crypto
