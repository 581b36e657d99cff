#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conspigraph::addresses {

enum class Chain { bitcoin, ethereum, monero, zcash };
enum class Validation { checksum_valid, format_valid, invalid };

std::string_view to_string(Chain c);
std::string_view to_string(Validation v);

struct BlockchainAddress {
  Chain chain;
  std::string address;
  Validation validation;

  bool operator==(const BlockchainAddress&) const = default;
};

/// Classifies one token. Bitcoin: base58check with version 0x00/0x05, or a
/// `bc1` segwit address (bech32 for v0, bech32m for v1+). Ethereum: 0x + 40
/// hex, EIP-55 verified when mixed case. Monero: 95 base58 chars starting
/// with 4 or 8 (format only). Zcash: t1/t3 base58check.
std::optional<BlockchainAddress> classify(std::string_view token);

/// EIP-55 mixed-case checksum of a 40-hex-digit address body.
std::string eip55(std::string_view hex40);

/// Every valid address in free text, left to right. Candidates are maximal
/// ASCII alphanumeric runs; invalid candidates are dropped.
std::vector<BlockchainAddress> extract_blockchain_addresses(std::string_view text);

}  // namespace conspigraph::addresses
