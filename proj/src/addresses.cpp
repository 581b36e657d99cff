#include "conspigraph/addresses.hpp"

#include <algorithm>
#include <cctype>

#include "conspigraph/crypto.hpp"

namespace conspigraph::addresses {

std::string_view to_string(Chain c) {
  switch (c) {
    case Chain::bitcoin: return "bitcoin";
    case Chain::ethereum: return "ethereum";
    case Chain::monero: return "monero";
    case Chain::zcash: return "zcash";
  }
  return "unknown";
}

std::string_view to_string(Validation v) {
  switch (v) {
    case Validation::checksum_valid: return "checksum_valid";
    case Validation::format_valid: return "format_valid";
    case Validation::invalid: return "invalid";
  }
  return "unknown";
}

namespace {

bool all_base58(std::string_view s) { return std::all_of(s.begin(), s.end(), crypto::base58::is_base58_char); }

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

std::optional<BlockchainAddress> bitcoin_base58(std::string_view t) {
  if (t.size() < 26 || t.size() > 35 || !all_base58(t)) return std::nullopt;
  auto payload = crypto::base58::decode_check(t);
  if (!payload || payload->size() != 21) return std::nullopt;
  std::uint8_t version = (*payload)[0];
  if ((t[0] == '1' && version != 0x00) || (t[0] == '3' && version != 0x05)) return std::nullopt;
  return BlockchainAddress{Chain::bitcoin, std::string(t), Validation::checksum_valid};
}

std::optional<BlockchainAddress> bitcoin_segwit(std::string_view t) {
  auto d = crypto::bech32::decode(t);
  if (!d || d->hrp != "bc" || d->data.empty()) return std::nullopt;
  std::uint8_t version = d->data[0];
  if (version > 16) return std::nullopt;
  std::span<const std::uint8_t> rest(d->data.data() + 1, d->data.size() - 1);
  auto program = crypto::bech32::convert_bits(rest, 5, 8, false);
  if (!program || program->size() < 2 || program->size() > 40) return std::nullopt;
  if (version == 0 && program->size() != 20 && program->size() != 32) return std::nullopt;
  auto expected = version == 0 ? crypto::bech32::Encoding::bech32 : crypto::bech32::Encoding::bech32m;
  if (d->encoding != expected) return std::nullopt;
  return BlockchainAddress{Chain::bitcoin, std::string(t), Validation::checksum_valid};
}

std::optional<BlockchainAddress> ethereum(std::string_view t) {
  if (t.size() != 42 || t[0] != '0' || t[1] != 'x') return std::nullopt;
  auto body = t.substr(2);
  if (!std::all_of(body.begin(), body.end(), is_hex)) return std::nullopt;
  bool lower = false, upper = false;
  for (char c : body) {
    if (std::islower(static_cast<unsigned char>(c))) lower = true;
    if (std::isupper(static_cast<unsigned char>(c))) upper = true;
  }
  if (lower && upper) {
    if (eip55(body) != body) return std::nullopt;
    return BlockchainAddress{Chain::ethereum, std::string(t), Validation::checksum_valid};
  }
  return BlockchainAddress{Chain::ethereum, std::string(t), Validation::format_valid};
}

std::optional<BlockchainAddress> monero(std::string_view t) {
  if (t.size() != 95 || (t[0] != '4' && t[0] != '8') || !all_base58(t)) return std::nullopt;
  return BlockchainAddress{Chain::monero, std::string(t), Validation::format_valid};
}

std::optional<BlockchainAddress> zcash(std::string_view t) {
  if (t.size() != 35 || t[0] != 't' || (t[1] != '1' && t[1] != '3') || !all_base58(t)) return std::nullopt;
  auto payload = crypto::base58::decode_check(t);
  if (!payload || payload->size() != 22 || (*payload)[0] != 0x1C) return std::nullopt;
  std::uint8_t second = (*payload)[1];
  if ((t[1] == '1' && second != 0xB8) || (t[1] == '3' && second != 0xBD)) return std::nullopt;
  return BlockchainAddress{Chain::zcash, std::string(t), Validation::checksum_valid};
}

}  // namespace

std::string eip55(std::string_view hex40) {
  std::string lower(hex40);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  auto hash = crypto::keccak256(lower);
  std::string out = lower;
  for (std::size_t i = 0; i < out.size(); ++i) {
    int nibble = (i % 2 == 0) ? hash[i / 2] >> 4 : hash[i / 2] & 0x0F;
    if (std::isalpha(static_cast<unsigned char>(out[i])) && nibble >= 8)
      out[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i])));
  }
  return out;
}

std::optional<BlockchainAddress> classify(std::string_view t) {
  if (t.size() < 26) return std::nullopt;
  if (t.starts_with("0x")) return ethereum(t);
  if (t.size() >= 3 && (t.starts_with("bc1") || t.starts_with("BC1"))) return bitcoin_segwit(t);
  if (t[0] == '1' || t[0] == '3') return bitcoin_base58(t);
  if (t[0] == 't') return zcash(t);
  if (t[0] == '4' || t[0] == '8') return monero(t);
  return std::nullopt;
}

std::vector<BlockchainAddress> extract_blockchain_addresses(std::string_view text) {
  std::vector<BlockchainAddress> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && std::isalnum(static_cast<unsigned char>(text[end]))) ++end;
    if (auto a = classify(text.substr(i, end - i))) out.push_back(std::move(*a));
    i = end;
  }
  return out;
}

}  // namespace conspigraph::addresses
