#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "conspigraph/addresses.hpp"
#include "conspigraph/dataset.hpp"
#include "conspigraph/url.hpp"

namespace conspigraph::monetization {

enum class Category { affiliate, donation, crowdfunding, shopfront, wishlist, blockchain, custom_shop };
enum class PlatformCategory { ecommerce, donation, crowdfunding };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view s);
std::string_view to_string(PlatformCategory c);

struct PlatformEntry {
  std::string domain;  // registrable domain, or `name.*` for every TLD of a brand
  PlatformCategory category;
  std::string platform;
  std::string path;  // optional discriminator such as "/donate"
};

class PlatformCatalog {
 public:
  static PlatformCatalog load(const fs::path& path);
  static PlatformCatalog parse(std::istream& in, const std::string& source);
  static const PlatformCatalog& bundled();

  const std::vector<PlatformEntry>& entries() const { return entries_; }
  /// Entry whose domain contains the host and whose discriminator (if any)
  /// prefixes the path, optionally after a two-letter locale segment.
  /// Entries with a discriminator win over bare-domain entries.
  const PlatformEntry* match(const url::NormalizedUrl& u) const;
  /// True when the host belongs to any catalogued domain, ignoring paths.
  bool covers_host(std::string_view host) const;

 private:
  std::vector<PlatformEntry> entries_;
};

struct Hit {
  ChannelId channel_id = 0;
  MessageId message_id = 0;
  Category category = Category::donation;
  std::string platform;
  std::string extracted_id;
  std::string url;  // effective URL, empty for blockchain hits

  bool operator==(const Hit&) const = default;
};

/// Brand label of a marketplace host: "amazon" for smile.amazon.co.uk.
std::string_view brand_label(std::string_view host);

std::optional<Hit> detect_affiliate(const url::NormalizedUrl& u);
std::optional<Hit> detect_platform(const url::NormalizedUrl& u, const PlatformCatalog& catalog);
std::optional<Hit> detect_amazon_pages(const url::NormalizedUrl& u);

class ShopKeywords {
 public:
  static ShopKeywords parse(std::string_view text);
  static const ShopKeywords& bundled();
  bool contains(std::string_view word) const { return words_.contains(strings::to_lower(word)); }

 private:
  std::set<std::string, std::less<>> words_;
};

std::optional<Hit> detect_custom_shop(const url::NormalizedUrl& u, const PlatformCatalog& catalog,
                                      const ShopKeywords& keywords = ShopKeywords::bundled());

/// Runs the detectors in precedence order: affiliate, catalog platform,
/// Amazon pages, custom shop. At most one hit per URL.
std::optional<Hit> classify_url(const url::NormalizedUrl& u, const PlatformCatalog& catalog,
                                const ShopKeywords& keywords = ShopKeywords::bundled());

// ---------------------------------------------------------------- e-commerce

struct EcommerceSighting {
  ChannelId channel_id = 0;
  MessageId message_id = 0;
  std::string platform;
  std::string product;  // product key, see product_key()
  bool affiliate = false;
};

/// Platform-specific product identifier (ASIN, item id, listing id), else the
/// lowercased path.
std::string product_key(const url::NormalizedUrl& u, std::string_view platform);
std::optional<EcommerceSighting> ecommerce_sighting(const url::NormalizedUrl& u, const PlatformCatalog& catalog);

// ---------------------------------------------------------------- blockchain

/// Blockchain hits from a channel's description and, if `scan_messages`, its
/// messages. Description hits carry message_id -1. Repeats within the same
/// text are reported once.
std::vector<Hit> blockchain_hits(const dataset::ChannelRecord& channel, bool scan_messages = true);

// ---------------------------------------------------------------- review

enum class Decision { undecided, allow, deny };

struct AllowDeny {
  std::map<std::string, Decision> decisions;  // key: normalized URL

  static AllowDeny load(const fs::path& path);
  static AllowDeny parse(std::string_view text, const std::string& source);
};

struct ReviewEntry {
  std::string url;
  Category category;
  std::string platform;
  std::string extracted_id;
  std::size_t conspiracy_channels = 0;
  std::size_t other_channels = 0;
  Decision decision = Decision::undecided;
};

struct FilterResult {
  std::vector<Hit> retained;
  std::vector<Hit> discarded;
  std::vector<ReviewEntry> review_queue;
  std::set<std::string> flagged_for_review;  // retained URLs still undecided
};

/// Donation and crowdfunding URLs seen in both conspiracy and other channels
/// go to the review queue; deny-listed ones are discarded, allow-listed and
/// undecided ones are kept. `conspiracy_hits` are the candidate hits;
/// `other_urls` maps URLs seen outside conspiracy communities to the number of
/// distinct channels posting them.
FilterResult cross_community_filter(const std::vector<Hit>& conspiracy_hits,
                                    const std::map<std::string, std::size_t>& other_urls, const AllowDeny& lists);

// monetization.csv: channel_id, message_id, category, platform, extracted_id, url, review
void write_hits(const fs::path& path, const std::vector<Hit>& hits, const std::set<std::string>& review_flags = {});
std::vector<Hit> read_hits(const fs::path& path);
void write_review_queue(const fs::path& path, const std::vector<ReviewEntry>& queue);
// ecommerce.csv: channel_id, message_id, platform, product, affiliate
void write_ecommerce(const fs::path& path, const std::vector<EcommerceSighting>& sightings);
std::vector<EcommerceSighting> read_ecommerce(const fs::path& path);

}  // namespace conspigraph::monetization
