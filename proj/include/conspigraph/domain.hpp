#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

#include "conspigraph/common.hpp"

namespace conspigraph::domain {

/// Public suffix list (publicsuffix.org format): normal, wildcard, and
/// exception rules, ICANN and private sections alike.
class PublicSuffixList {
 public:
  static PublicSuffixList load(const fs::path& path);
  static PublicSuffixList parse(std::string_view content);
  /// Snapshot shipped in data/public_suffix_list.dat, loaded once.
  static const PublicSuffixList& bundled();

  /// Longest matching public suffix of a lowercase host ("co.uk" for
  /// "a.b.co.uk"). Unlisted TLDs fall back to the implicit "*" rule.
  std::string_view public_suffix(std::string_view host) const;

  /// eTLD+1 ("b.co.uk" for "a.b.co.uk"). Empty when the host is itself a
  /// public suffix, an IP literal, or has no dot.
  std::string_view registrable_domain(std::string_view host) const;

  std::size_t rule_count() const { return normal_.size() + wildcard_.size() + exception_.size(); }

 private:
  std::unordered_set<std::string> normal_;
  std::unordered_set<std::string> wildcard_;   // stored without the "*."
  std::unordered_set<std::string> exception_;  // stored without the "!"
};

bool is_ip_literal(std::string_view host);

/// True when `host` equals `domain` or is a subdomain of it.
bool host_within(std::string_view host, std::string_view domain);

/// Label immediately left of the registrable domain ("shop" for
/// "shop.example.com"); empty when there is none.
std::string_view third_level_label(std::string_view host, const PublicSuffixList& psl);

/// RFC 3492 punycode on whole hostnames: `xn--` labels are decoded to
/// UTF-8; invalid labels are returned unchanged.
std::string punycode_decode_host(std::string_view host);
/// Inverse: non-ASCII labels are encoded with the `xn--` prefix.
std::optional<std::string> punycode_encode_host(std::string_view host);

std::optional<std::u32string> punycode_decode(std::string_view input);
std::optional<std::string> punycode_encode(std::u32string_view input);

// UTF-8 helpers shared with the language module.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
void utf8_append(std::string& out, char32_t cp);

}  // namespace conspigraph::domain
