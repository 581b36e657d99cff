#include "conspigraph/domain.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

namespace conspigraph::domain {

PublicSuffixList PublicSuffixList::parse(std::string_view content) {
  PublicSuffixList psl;
  for (auto line : strings::split(content, '\n')) {
    line = strings::trim(line);
    if (line.empty() || line.starts_with("//")) continue;
    auto end = line.find_first_of(" \t");
    std::string rule = strings::to_lower(line.substr(0, end));
    if (rule.starts_with("!")) {
      psl.exception_.insert(rule.substr(1));
    } else if (rule.starts_with("*.")) {
      psl.wildcard_.insert(rule.substr(2));
    } else {
      psl.normal_.insert(rule);
    }
  }
  return psl;
}

PublicSuffixList PublicSuffixList::load(const fs::path& path) { return parse(read_file(path)); }

const PublicSuffixList& PublicSuffixList::bundled() {
  static const PublicSuffixList psl = load(data_dir() / "public_suffix_list.dat");
  return psl;
}

std::string_view PublicSuffixList::public_suffix(std::string_view host) const {
  if (host.empty()) return host;
  // Label start offsets, left to right.
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < host.size(); ++i)
    if (host[i] == '.') starts.push_back(i + 1);

  std::string key;
  auto contains = [&key](const std::unordered_set<std::string>& set, std::string_view s) {
    key.assign(s);
    return set.contains(key);
  };

  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (contains(exception_, host.substr(starts[i])) && i + 1 < starts.size()) return host.substr(starts[i + 1]);
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    auto candidate = host.substr(starts[i]);
    if (contains(normal_, candidate)) return candidate;
    if (i + 1 < starts.size() && contains(wildcard_, host.substr(starts[i + 1]))) return candidate;
  }
  return host.substr(starts.back());
}

std::string_view PublicSuffixList::registrable_domain(std::string_view host) const {
  if (host.empty() || is_ip_literal(host) || host.find('.') == std::string_view::npos) return {};
  auto suffix = public_suffix(host);
  if (suffix.size() >= host.size()) return {};
  std::size_t suffix_start = host.size() - suffix.size();  // points past the '.'
  if (suffix_start < 2) return {};
  auto dot = host.rfind('.', suffix_start - 2);
  return dot == std::string_view::npos ? host : host.substr(dot + 1);
}

bool is_ip_literal(std::string_view host) {
  if (host.starts_with('[')) return true;
  if (host.empty()) return false;
  int dots = 0;
  for (char c : host) {
    if (c == '.') {
      ++dots;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return dots == 3;
}

bool host_within(std::string_view host, std::string_view domain) {
  if (domain.empty() || host.size() < domain.size()) return false;
  if (host == domain) return true;
  return host.ends_with(domain) && host[host.size() - domain.size() - 1] == '.';
}

std::string_view third_level_label(std::string_view host, const PublicSuffixList& psl) {
  auto reg = psl.registrable_domain(host);
  if (reg.empty() || reg.size() >= host.size()) return {};
  auto head = host.substr(0, host.size() - reg.size() - 1);
  auto dot = head.rfind('.');
  return dot == std::string_view::npos ? head : head.substr(dot + 1);
}

// ---------------------------------------------------------------- punycode

namespace {

constexpr std::uint32_t kBase = 36, kTMin = 1, kTMax = 26, kSkew = 38, kDamp = 700, kInitialBias = 72,
                        kInitialN = 128;

std::uint32_t adapt(std::uint32_t delta, std::uint32_t numpoints, bool first) {
  delta = first ? delta / kDamp : delta / 2;
  delta += delta / numpoints;
  std::uint32_t k = 0;
  while (delta > ((kBase - kTMin) * kTMax) / 2) {
    delta /= kBase - kTMin;
    k += kBase;
  }
  return k + (kBase - kTMin + 1) * delta / (delta + kSkew);
}

int decode_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0' + 26;
  if (c >= 'a' && c <= 'z') return c - 'a';
  if (c >= 'A' && c <= 'Z') return c - 'A';
  return -1;
}

char encode_digit(std::uint32_t d) { return static_cast<char>(d < 26 ? 'a' + d : '0' + (d - 26)); }

std::uint32_t threshold(std::uint32_t k, std::uint32_t bias) {
  if (k <= bias) return kTMin;
  if (k >= bias + kTMax) return kTMax;
  return k - bias;
}

}  // namespace

std::optional<std::u32string> punycode_decode(std::string_view input) {
  std::u32string out;
  std::size_t b = input.rfind('-');
  std::size_t in = 0;
  if (b != std::string_view::npos) {
    for (std::size_t j = 0; j < b; ++j) {
      auto c = static_cast<unsigned char>(input[j]);
      if (c >= 0x80) return std::nullopt;
      out.push_back(c);
    }
    in = b + 1;
  }
  std::uint32_t n = kInitialN, i = 0, bias = kInitialBias;
  while (in < input.size()) {
    std::uint32_t oldi = i, w = 1;
    for (std::uint32_t k = kBase;; k += kBase) {
      if (in >= input.size()) return std::nullopt;
      int digit = decode_digit(input[in++]);
      if (digit < 0) return std::nullopt;
      auto d = static_cast<std::uint32_t>(digit);
      if (d > (UINT32_MAX - i) / w) return std::nullopt;
      i += d * w;
      std::uint32_t t = threshold(k, bias);
      if (d < t) break;
      if (w > UINT32_MAX / (kBase - t)) return std::nullopt;
      w *= kBase - t;
    }
    auto len = static_cast<std::uint32_t>(out.size() + 1);
    bias = adapt(i - oldi, len, oldi == 0);
    if (i / len > UINT32_MAX - n) return std::nullopt;
    n += i / len;
    i %= len;
    if (n > 0x10FFFF || (n >= 0xD800 && n <= 0xDFFF)) return std::nullopt;
    out.insert(out.begin() + i, static_cast<char32_t>(n));
    ++i;
  }
  return out;
}

std::optional<std::string> punycode_encode(std::u32string_view input) {
  std::string out;
  for (char32_t c : input)
    if (c < 0x80) out.push_back(static_cast<char>(c));
  auto b = static_cast<std::uint32_t>(out.size());
  std::uint32_t h = b;
  if (b > 0) out.push_back('-');
  std::uint32_t n = kInitialN, delta = 0, bias = kInitialBias;
  while (h < input.size()) {
    std::uint32_t m = UINT32_MAX;
    for (char32_t c : input)
      if (c >= n && c < m) m = c;
    if ((m - n) > (UINT32_MAX - delta) / (h + 1)) return std::nullopt;
    delta += (m - n) * (h + 1);
    n = m;
    for (char32_t c : input) {
      if (c < n && ++delta == 0) return std::nullopt;
      if (c == n) {
        std::uint32_t q = delta;
        for (std::uint32_t k = kBase;; k += kBase) {
          std::uint32_t t = threshold(k, bias);
          if (q < t) break;
          out.push_back(encode_digit(t + (q - t) % (kBase - t)));
          q = (q - t) / (kBase - t);
        }
        out.push_back(encode_digit(q));
        bias = adapt(delta, h + 1, h == b);
        delta = 0;
        ++h;
      }
    }
    ++delta;
    ++n;
  }
  return out;
}

std::string punycode_decode_host(std::string_view host) {
  std::string out;
  bool first = true;
  for (auto label : strings::split(host, '.')) {
    if (!first) out.push_back('.');
    first = false;
    if (strings::starts_with_icase(label, "xn--")) {
      if (auto decoded = punycode_decode(strings::to_lower(label.substr(4)))) {
        out += utf8_encode(*decoded);
        continue;
      }
    }
    out += label;
  }
  return out;
}

std::optional<std::string> punycode_encode_host(std::string_view host) {
  std::string out;
  bool first = true;
  for (auto label : strings::split(host, '.')) {
    if (!first) out.push_back('.');
    first = false;
    bool ascii = std::all_of(label.begin(), label.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (ascii) {
      out += label;
      continue;
    }
    auto encoded = punycode_encode(utf8_decode(label));
    if (!encoded) return std::nullopt;
    out += "xn--" + *encoded;
  }
  return out;
}

// ---------------------------------------------------------------- UTF-8

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    char32_t cp;
    std::size_t len;
    if (c < 0x80) {
      cp = c;
      len = 1;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c >> 4) == 0xE) {
      cp = c & 0x0F;
      len = 3;
    } else if ((c >> 3) == 0x1E) {
      cp = c & 0x07;
      len = 4;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void utf8_append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) utf8_append(out, cp);
  return out;
}

}  // namespace conspigraph::domain
