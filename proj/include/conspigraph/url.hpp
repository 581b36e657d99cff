#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conspigraph/common.hpp"

namespace conspigraph::url {

/// One URL as it appeared in a message.
struct RawUrl {
  std::string text;
  ChannelId channel_id = 0;
  MessageId message_id = 0;
  std::size_t byte_offset = 0;

  bool operator==(const RawUrl&) const = default;
};

/// Finds `http://` / `https://` URLs (scheme case-insensitive) and
/// `www.`-prefixed hosts. A match runs until whitespace, a control or
/// non-ASCII byte, or one of `<>"`, then loses any trailing `.,;:!?)]}"'`.
/// Matches are non-overlapping, left to right. Bare domains are ignored.
std::vector<RawUrl> extract_urls(std::string_view text, ChannelId channel_id = 0, MessageId message_id = 0);

struct QueryParam {
  std::string key;
  std::optional<std::string> value;  // nullopt for a bare `key`

  bool operator==(const QueryParam&) const = default;
};

struct NormalizedUrl {
  std::string scheme;  // lowercase
  std::string host;    // lowercase, punycode-decoded, no trailing dot
  std::optional<std::uint16_t> port;  // absent when default for scheme
  std::string path;    // starts with '/'
  std::vector<QueryParam> query;  // source order

  std::string to_string() const;
  /// Host in ASCII form (punycode-encoded), for network use.
  std::string ascii_host() const;
  /// Path plus query, as sent in an HTTP request line.
  std::string request_target() const;

  /// Value of the first parameter named `key` (exact match).
  std::optional<std::string_view> query_value(std::string_view key) const;
  /// Non-empty path segments, still percent-encoded.
  std::vector<std::string_view> path_segments() const;

  bool operator==(const NormalizedUrl&) const = default;
};

/// Canonical form: lowercase scheme and host, fragment and userinfo dropped,
/// default port elided, `%XX` decoded for unreserved characters and
/// uppercased otherwise, empty path becomes "/", query order kept.
/// `www.` inputs get `https`. Returns nullopt when the authority cannot be
/// parsed (empty host, bad port, unsupported scheme).
std::optional<NormalizedUrl> normalize(std::string_view text);
inline std::optional<NormalizedUrl> normalize(const RawUrl& raw) { return normalize(raw.text); }

/// Resolves a Location header value against a base URL.
std::optional<NormalizedUrl> resolve_reference(const NormalizedUrl& base, std::string_view reference);

/// Percent-decodes every escape (for identifier extraction, not for keys).
std::string percent_decode(std::string_view s);

}  // namespace conspigraph::url
