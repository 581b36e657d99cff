#include "conspigraph/crypto.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>

namespace conspigraph::crypto {

namespace {

constexpr std::array<std::uint32_t, 64> kSha256K = {
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};

constexpr std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

}  // namespace

Sha256::Sha256()
    : state_{0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19} {}

void Sha256::compress(const std::uint8_t* block) {
  std::uint32_t w[64];
  for (int i = 0; i < 16; ++i) {
    w[i] = (std::uint32_t(block[4 * i]) << 24) | (std::uint32_t(block[4 * i + 1]) << 16) |
           (std::uint32_t(block[4 * i + 2]) << 8) | std::uint32_t(block[4 * i + 3]);
  }
  for (int i = 16; i < 64; ++i) {
    std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
    std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
    w[i] = w[i - 16] + s0 + w[i - 7] + s1;
  }
  auto [a, b, c, d, e, f, g, h] = state_;
  for (int i = 0; i < 64; ++i) {
    std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
    std::uint32_t ch = (e & f) ^ (~e & g);
    std::uint32_t t1 = h + s1 + ch + kSha256K[i] + w[i];
    std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
    std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
    std::uint32_t t2 = s0 + maj;
    h = g;
    g = f;
    f = e;
    e = d + t1;
    d = c;
    c = b;
    b = a;
    a = t1 + t2;
  }
  state_[0] += a;
  state_[1] += b;
  state_[2] += c;
  state_[3] += d;
  state_[4] += e;
  state_[5] += f;
  state_[6] += g;
  state_[7] += h;
}

void Sha256::update(std::span<const std::uint8_t> data) {
  total_ += data.size();
  std::size_t i = 0;
  if (buffered_ > 0) {
    std::size_t take = std::min(data.size(), 64 - buffered_);
    std::memcpy(buffer_.data() + buffered_, data.data(), take);
    buffered_ += take;
    i = take;
    if (buffered_ < 64) return;
    compress(buffer_.data());
    buffered_ = 0;
  }
  for (; i + 64 <= data.size(); i += 64) compress(data.data() + i);
  if (i < data.size()) {
    buffered_ = data.size() - i;
    std::memcpy(buffer_.data(), data.data() + i, buffered_);
  }
}

void Sha256::update(std::string_view data) {
  update(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

Digest256 Sha256::finish() {
  std::uint64_t bits = total_ * 8;
  std::uint8_t pad[72] = {0x80};
  std::size_t pad_len = (buffered_ < 56) ? 56 - buffered_ : 120 - buffered_;
  for (int i = 0; i < 8; ++i) pad[pad_len + i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
  update(std::span<const std::uint8_t>(pad, pad_len + 8));
  Digest256 out;
  for (int i = 0; i < 8; ++i) {
    out[4 * i] = static_cast<std::uint8_t>(state_[i] >> 24);
    out[4 * i + 1] = static_cast<std::uint8_t>(state_[i] >> 16);
    out[4 * i + 2] = static_cast<std::uint8_t>(state_[i] >> 8);
    out[4 * i + 3] = static_cast<std::uint8_t>(state_[i]);
  }
  return out;
}

Digest256 sha256(std::span<const std::uint8_t> data) {
  Sha256 h;
  h.update(data);
  return h.finish();
}

Digest256 sha256(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.finish();
}

Digest256 sha256d(std::span<const std::uint8_t> data) {
  auto first = sha256(data);
  return sha256(std::span<const std::uint8_t>(first));
}

Digest256 sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 20);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    auto n = static_cast<std::size_t>(in.gcount());
    if (n == 0) break;
    h.update(std::string_view(buf.data(), n));
  }
  return h.finish();
}

// ---------------------------------------------------------------- Keccak

namespace {

constexpr std::array<std::uint64_t, 24> kRoundConstants = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL};

constexpr int kRotation[25] = {0, 1, 62, 28, 27, 36, 44, 6, 55, 20, 3, 10, 43, 25, 39, 41, 45, 15, 21, 8, 18, 2, 61, 56, 14};

constexpr std::uint64_t rotl64(std::uint64_t x, int n) { return n == 0 ? x : (x << n) | (x >> (64 - n)); }

void keccak_f(std::array<std::uint64_t, 25>& a) {
  for (int round = 0; round < 24; ++round) {
    std::uint64_t c[5], d[5];
    for (int x = 0; x < 5; ++x) c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
    for (int x = 0; x < 5; ++x) d[x] = c[(x + 4) % 5] ^ rotl64(c[(x + 1) % 5], 1);
    for (int i = 0; i < 25; ++i) a[i] ^= d[i % 5];

    std::uint64_t b[25];
    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y) b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl64(a[x + 5 * y], kRotation[x + 5 * y]);

    for (int x = 0; x < 5; ++x)
      for (int y = 0; y < 5; ++y) a[x + 5 * y] = b[x + 5 * y] ^ (~b[(x + 1) % 5 + 5 * y] & b[(x + 2) % 5 + 5 * y]);

    a[0] ^= kRoundConstants[round];
  }
}

}  // namespace

Digest256 keccak256(std::span<const std::uint8_t> data) {
  constexpr std::size_t rate = 136;
  std::array<std::uint64_t, 25> state{};
  auto absorb = [&](const std::uint8_t* block) {
    for (std::size_t i = 0; i < rate / 8; ++i) {
      std::uint64_t lane = 0;
      for (int b = 0; b < 8; ++b) lane |= std::uint64_t(block[8 * i + b]) << (8 * b);
      state[i] ^= lane;
    }
    keccak_f(state);
  };
  std::size_t off = 0;
  for (; off + rate <= data.size(); off += rate) absorb(data.data() + off);
  std::uint8_t last[rate] = {};
  std::memcpy(last, data.data() + off, data.size() - off);
  last[data.size() - off] ^= 0x01;
  last[rate - 1] ^= 0x80;
  absorb(last);

  Digest256 out;
  for (int i = 0; i < 32; ++i) out[i] = static_cast<std::uint8_t>(state[i / 8] >> (8 * (i % 8)));
  return out;
}

Digest256 keccak256(std::string_view data) {
  return keccak256(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 15]);
  }
  return out;
}

// ---------------------------------------------------------------- base58

namespace base58 {

namespace {

constexpr std::array<std::int8_t, 128> make_index() {
  std::array<std::int8_t, 128> idx{};
  for (auto& v : idx) v = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) idx[static_cast<std::size_t>(kAlphabet[i])] = static_cast<std::int8_t>(i);
  return idx;
}

constexpr auto kIndex = make_index();

}  // namespace

bool is_base58_char(char c) {
  auto u = static_cast<unsigned char>(c);
  return u < 128 && kIndex[u] >= 0;
}

std::optional<std::vector<std::uint8_t>> decode(std::string_view text) {
  std::size_t zeros = 0;
  while (zeros < text.size() && text[zeros] == '1') ++zeros;
  // Big-endian base-256 accumulator; log(58)/log(256) < 0.733.
  std::vector<std::uint8_t> b256((text.size() - zeros) * 733 / 1000 + 1, 0);
  std::size_t length = 0;
  for (std::size_t p = zeros; p < text.size(); ++p) {
    if (!is_base58_char(text[p])) return std::nullopt;
    int carry = kIndex[static_cast<unsigned char>(text[p])];
    std::size_t i = 0;
    for (auto it = b256.rbegin(); (carry != 0 || i < length) && it != b256.rend(); ++it, ++i) {
      carry += 58 * (*it);
      *it = static_cast<std::uint8_t>(carry % 256);
      carry /= 256;
    }
    length = i;
  }
  auto it = b256.begin() + static_cast<std::ptrdiff_t>(b256.size() - length);
  std::vector<std::uint8_t> out(zeros, 0);
  out.insert(out.end(), it, b256.end());
  return out;
}

std::string encode(std::span<const std::uint8_t> bytes) {
  std::size_t zeros = 0;
  while (zeros < bytes.size() && bytes[zeros] == 0) ++zeros;
  std::vector<std::uint8_t> b58((bytes.size() - zeros) * 138 / 100 + 1, 0);
  std::size_t length = 0;
  for (std::size_t p = zeros; p < bytes.size(); ++p) {
    int carry = bytes[p];
    std::size_t i = 0;
    for (auto it = b58.rbegin(); (carry != 0 || i < length) && it != b58.rend(); ++it, ++i) {
      carry += 256 * (*it);
      *it = static_cast<std::uint8_t>(carry % 58);
      carry /= 58;
    }
    length = i;
  }
  std::string out(zeros, '1');
  for (auto it = b58.begin() + static_cast<std::ptrdiff_t>(b58.size() - length); it != b58.end(); ++it)
    out.push_back(kAlphabet[*it]);
  return out;
}

std::optional<std::vector<std::uint8_t>> decode_check(std::string_view text) {
  auto raw = decode(text);
  if (!raw || raw->size() < 4) return std::nullopt;
  std::span<const std::uint8_t> payload(raw->data(), raw->size() - 4);
  auto digest = sha256d(payload);
  if (!std::equal(digest.begin(), digest.begin() + 4, raw->end() - 4)) return std::nullopt;
  raw->resize(raw->size() - 4);
  return raw;
}

std::string encode_check(std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> buf(payload.begin(), payload.end());
  auto digest = sha256d(payload);
  buf.insert(buf.end(), digest.begin(), digest.begin() + 4);
  return encode(buf);
}

}  // namespace base58

// ---------------------------------------------------------------- bech32

namespace bech32 {

namespace {

constexpr std::string_view kCharset = "qpzry9x8gf2tvdw0s3jn54khce6mua7l";
constexpr std::uint32_t kBech32Const = 1;
constexpr std::uint32_t kBech32mConst = 0x2bc830a3;

std::uint32_t polymod(std::span<const std::uint8_t> values) {
  constexpr std::uint32_t gen[5] = {0x3b6a57b2, 0x26508e6d, 0x1ea119fa, 0x3d4233dd, 0x2a1462b3};
  std::uint32_t chk = 1;
  for (auto v : values) {
    std::uint32_t top = chk >> 25;
    chk = ((chk & 0x1ffffff) << 5) ^ v;
    for (int i = 0; i < 5; ++i)
      if ((top >> i) & 1) chk ^= gen[i];
  }
  return chk;
}

std::vector<std::uint8_t> hrp_expand(std::string_view hrp) {
  std::vector<std::uint8_t> out;
  for (char c : hrp) out.push_back(static_cast<std::uint8_t>(static_cast<unsigned char>(c) >> 5));
  out.push_back(0);
  for (char c : hrp) out.push_back(static_cast<std::uint8_t>(static_cast<unsigned char>(c) & 31));
  return out;
}

}  // namespace

std::optional<Decoded> decode(std::string_view text) {
  if (text.size() > 90) return std::nullopt;
  bool lower = false, upper = false;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (u < 33 || u > 126) return std::nullopt;
    if (std::islower(u)) lower = true;
    if (std::isupper(u)) upper = true;
  }
  if (lower && upper) return std::nullopt;
  auto sep = text.rfind('1');
  if (sep == std::string_view::npos || sep == 0 || sep + 7 > text.size()) return std::nullopt;

  std::string hrp = strings::to_lower(text.substr(0, sep));
  std::vector<std::uint8_t> values = hrp_expand(hrp);
  std::vector<std::uint8_t> data;
  for (char c : text.substr(sep + 1)) {
    auto pos = kCharset.find(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (pos == std::string_view::npos) return std::nullopt;
    data.push_back(static_cast<std::uint8_t>(pos));
  }
  values.insert(values.end(), data.begin(), data.end());
  std::uint32_t check = polymod(values);
  Encoding enc;
  if (check == kBech32Const) {
    enc = Encoding::bech32;
  } else if (check == kBech32mConst) {
    enc = Encoding::bech32m;
  } else {
    return std::nullopt;
  }
  data.resize(data.size() - 6);
  return Decoded{enc, hrp, std::move(data)};
}

std::string encode(std::string_view hrp, std::span<const std::uint8_t> data5, Encoding enc) {
  std::vector<std::uint8_t> values = hrp_expand(hrp);
  values.insert(values.end(), data5.begin(), data5.end());
  values.insert(values.end(), 6, 0);
  std::uint32_t mod = polymod(values) ^ (enc == Encoding::bech32 ? kBech32Const : kBech32mConst);
  std::string out(hrp);
  out.push_back('1');
  for (auto v : data5) out.push_back(kCharset[v]);
  for (int i = 0; i < 6; ++i) out.push_back(kCharset[(mod >> (5 * (5 - i))) & 31]);
  return out;
}

std::optional<std::vector<std::uint8_t>> convert_bits(std::span<const std::uint8_t> in, int from, int to, bool pad) {
  std::uint32_t acc = 0;
  int bits = 0;
  const std::uint32_t maxv = (1u << to) - 1;
  std::vector<std::uint8_t> out;
  for (auto v : in) {
    if ((v >> from) != 0) return std::nullopt;
    acc = (acc << from) | v;
    bits += from;
    while (bits >= to) {
      bits -= to;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & maxv));
    }
  }
  if (pad) {
    if (bits > 0) out.push_back(static_cast<std::uint8_t>((acc << (to - bits)) & maxv));
  } else if (bits >= from || ((acc << (to - bits)) & maxv) != 0) {
    return std::nullopt;
  }
  return out;
}

}  // namespace bech32

}  // namespace conspigraph::crypto
