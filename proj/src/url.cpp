#include "conspigraph/url.hpp"

#include <cctype>

#include "conspigraph/domain.hpp"

namespace conspigraph::url {

namespace {

bool is_url_byte(unsigned char c) {
  if (c <= 0x20 || c >= 0x7F) return false;
  return c != '<' && c != '>' && c != '"';
}

bool is_trailing_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case ')': case ']': case '}': case '"': case '\'':
      return true;
    default:
      return false;
  }
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c == '.' || c == '-' || c == '_' || c == '@' || c == '/' || c == ':';
}

bool is_unreserved(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string canonical_escapes(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex_value(s[i + 1]), lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        auto decoded = static_cast<unsigned char>(hi * 16 + lo);
        if (is_unreserved(decoded)) {
          out.push_back(static_cast<char>(decoded));
        } else {
          out.push_back('%');
          out.push_back(kHex[hi]);
          out.push_back(kHex[lo]);
        }
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> stack;
  auto parts = strings::split(path, '/');
  for (std::size_t i = 1; i < parts.size(); ++i) {
    auto seg = parts[i];
    if (seg == ".") {
      if (i + 1 == parts.size()) stack.push_back({});
    } else if (seg == "..") {
      if (!stack.empty()) stack.pop_back();
      if (i + 1 == parts.size()) stack.push_back({});
    } else {
      stack.push_back(seg);
    }
  }
  std::string out;
  for (auto seg : stack) {
    out.push_back('/');
    out += seg;
  }
  return out.empty() ? "/" : out;
}

}  // namespace

std::vector<RawUrl> extract_urls(std::string_view text, ChannelId channel_id, MessageId message_id) {
  std::vector<RawUrl> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    std::size_t authority_at = std::string_view::npos;
    bool www_form = false;
    if (c == 'h' || c == 'H') {
      auto rest = text.substr(i);
      if (strings::starts_with_icase(rest, "https://")) {
        authority_at = i + 8;
      } else if (strings::starts_with_icase(rest, "http://")) {
        authority_at = i + 7;
      }
    } else if ((c == 'w' || c == 'W') && strings::starts_with_icase(text.substr(i), "www.") &&
               (i == 0 || !is_word_byte(static_cast<unsigned char>(text[i - 1])))) {
      authority_at = i + 4;
      www_form = true;
    }
    if (authority_at == std::string_view::npos) {
      ++i;
      continue;
    }

    std::size_t end = authority_at;
    while (end < n && is_url_byte(static_cast<unsigned char>(text[end]))) ++end;
    while (end > authority_at && is_trailing_punct(text[end - 1])) --end;

    bool valid = end > authority_at;
    if (valid) {
      auto first = static_cast<unsigned char>(text[authority_at]);
      valid = std::isalnum(first) || first == '[';
    }
    if (valid && www_form) {
      // www.<label>.<label>: the host needs one more dot.
      auto host = text.substr(authority_at, end - authority_at);
      host = host.substr(0, host.find_first_of("/?#:"));
      valid = host.find('.') != std::string_view::npos && host.back() != '.';
    }
    if (!valid) {
      i = authority_at;
      continue;
    }
    out.push_back(RawUrl{std::string(text.substr(i, end - i)), channel_id, message_id, i});
    i = end;
  }
  return out;
}

std::optional<NormalizedUrl> normalize(std::string_view text) {
  text = strings::trim(text);
  NormalizedUrl u;
  std::string_view rest;
  if (auto p = text.find("://"); p != std::string_view::npos) {
    u.scheme = strings::to_lower(text.substr(0, p));
    rest = text.substr(p + 3);
  } else if (strings::starts_with_icase(text, "www.")) {
    u.scheme = "https";
    rest = text;
  } else {
    return std::nullopt;
  }
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;

  auto authority_end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, authority_end);
  std::string_view tail = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);

  std::string_view host_part, port_part;
  if (authority.starts_with('[')) {
    auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host_part = authority.substr(0, close + 1);
    auto after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') return std::nullopt;
      port_part = after.substr(1);
    }
  } else {
    auto colon = authority.rfind(':');
    host_part = authority.substr(0, colon);
    if (colon != std::string_view::npos) port_part = authority.substr(colon + 1);
  }

  if (!port_part.empty()) {
    if (port_part.size() > 5) return std::nullopt;
    unsigned value = 0;
    for (char ch : port_part) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
      value = value * 10 + static_cast<unsigned>(ch - '0');
    }
    if (value == 0 || value > 65535) return std::nullopt;
    bool is_default = (u.scheme == "http" && value == 80) || (u.scheme == "https" && value == 443);
    if (!is_default) u.port = static_cast<std::uint16_t>(value);
  }

  std::string host = strings::to_lower(host_part);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty()) return std::nullopt;
  for (char ch : host) {
    auto uc = static_cast<unsigned char>(ch);
    if (uc <= 0x20 || ch == '%' || ch == '\\' || ch == '<' || ch == '>' || ch == '"') return std::nullopt;
  }
  if (host.find("..") != std::string::npos || host.front() == '.') return std::nullopt;
  u.host = domain::punycode_decode_host(host);

  auto fragment = tail.find('#');
  if (fragment != std::string_view::npos) tail = tail.substr(0, fragment);
  auto qmark = tail.find('?');
  auto path = tail.substr(0, qmark);
  u.path = path.empty() ? "/" : remove_dot_segments(canonical_escapes(path));
  if (qmark != std::string_view::npos) {
    for (auto pair : strings::split(tail.substr(qmark + 1), '&')) {
      if (pair.empty()) continue;
      auto eq = pair.find('=');
      if (eq == std::string_view::npos) {
        u.query.push_back({canonical_escapes(pair), std::nullopt});
      } else {
        u.query.push_back({canonical_escapes(pair.substr(0, eq)), canonical_escapes(pair.substr(eq + 1))});
      }
    }
  }
  return u;
}

std::string NormalizedUrl::request_target() const {
  std::string out = path;
  for (std::size_t i = 0; i < query.size(); ++i) {
    out.push_back(i == 0 ? '?' : '&');
    out += query[i].key;
    if (query[i].value) {
      out.push_back('=');
      out += *query[i].value;
    }
  }
  return out;
}

std::string NormalizedUrl::to_string() const {
  std::string out = scheme + "://" + host;
  if (port) out += ":" + std::to_string(*port);
  out += request_target();
  return out;
}

std::string NormalizedUrl::ascii_host() const {
  auto encoded = domain::punycode_encode_host(host);
  return encoded ? *encoded : host;
}

std::optional<std::string_view> NormalizedUrl::query_value(std::string_view key) const {
  for (const auto& q : query)
    if (q.key == key) return q.value ? std::string_view(*q.value) : std::string_view{};
  return std::nullopt;
}

std::vector<std::string_view> NormalizedUrl::path_segments() const {
  std::vector<std::string_view> out;
  for (auto seg : strings::split(path, '/'))
    if (!seg.empty()) out.push_back(seg);
  return out;
}

std::optional<NormalizedUrl> resolve_reference(const NormalizedUrl& base, std::string_view ref) {
  ref = strings::trim(ref);
  if (ref.find("://") != std::string_view::npos) {
    auto scheme_end = ref.find("://");
    bool plain_scheme = true;
    for (char ch : ref.substr(0, scheme_end))
      if (!std::isalpha(static_cast<unsigned char>(ch))) plain_scheme = false;
    if (plain_scheme) return normalize(ref);
  }
  if (ref.starts_with("//")) return normalize(base.scheme + ":" + std::string(ref));

  std::string origin = base.scheme + "://" + base.host;
  if (base.port) origin += ":" + std::to_string(*base.port);
  if (ref.empty()) return base;

  std::string combined;
  if (ref.starts_with('/')) {
    combined = std::string(ref);
  } else if (ref.starts_with('?')) {
    combined = base.path + std::string(ref);
  } else {
    auto dir = base.path.substr(0, base.path.rfind('/') + 1);
    combined = dir + std::string(ref);
  }
  auto qpos = combined.find_first_of("?#");
  std::string path = remove_dot_segments(combined.substr(0, qpos));
  std::string suffix = qpos == std::string::npos ? "" : combined.substr(qpos);
  return normalize(origin + path + suffix);
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex_value(s[i + 1]), lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

}  // namespace conspigraph::url
