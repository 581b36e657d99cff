#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conspigraph/dataset.hpp"
#include "conspigraph/resolver.hpp"
#include "conspigraph/url.hpp"

namespace conspigraph::matcher {

using dataset::ResourceKind;
using KindCounts = std::array<std::size_t, dataset::kResourceKindCount>;

inline std::size_t kind_index(ResourceKind k) { return static_cast<std::size_t>(k); }

struct ResourceMatch {
  ResourceKind kind;
  std::string identifier;

  bool operator==(const ResourceMatch&) const = default;
};

/// Candidate identifier of a URL for one kind, before the catalog lookup.
/// Exposed so tests can probe each classifier on its own.
std::optional<std::string> candidate(const url::NormalizedUrl& u, ResourceKind kind);

/// Tries video, channel, subreddit, subverse, board, then domain; the first
/// kind whose candidate is catalogued wins.
std::optional<ResourceMatch> match_url(const url::NormalizedUrl& u, const dataset::ResourceCatalog& catalog);

struct MatchRow {
  ChannelId channel_id = 0;
  MessageId message_id = 0;
  std::string effective_url;
  ResourceKind kind = ResourceKind::website_domain;
  std::string identifier;
};

struct MatchTotals {
  KindCounts urls{};
  KindCounts catalog_entries{};

  std::size_t total_urls() const;
};

struct MatchResult {
  std::vector<MatchRow> matches;
  MatchTotals totals;
};

MatchResult match_corpus(const std::vector<resolver::UrlRow>& rows, const dataset::ResourceCatalog& catalog);

struct FlaggedChannelSet {
  std::map<ChannelId, KindCounts> per_channel;  // only channels with >= 1 match

  bool contains(ChannelId id) const { return per_channel.contains(id); }
  std::size_t size() const { return per_channel.size(); }
};

FlaggedChannelSet flag_channels(const std::vector<MatchRow>& matches);

// matches.csv: channel_id, message_id, effective_url, kind, identifier
void write_matches(const fs::path& path, const std::vector<MatchRow>& matches);
std::vector<MatchRow> read_matches(const fs::path& path);

// totals.csv: kind, catalog_entries, urls (plus a total row)
void write_totals(const fs::path& path, const MatchTotals& totals);

// flagged.csv: channel_id, one count column per kind, total
void write_flagged(const fs::path& path, const FlaggedChannelSet& flagged);
FlaggedChannelSet read_flagged(const fs::path& path);

}  // namespace conspigraph::matcher
