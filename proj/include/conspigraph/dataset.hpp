#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conspigraph/common.hpp"

namespace conspigraph::dataset {

struct MessageRecord {
  MessageId message_id = 0;
  UtcTime timestamp{};
  std::string text;
  std::optional<ChannelId> forwarded_from;

  bool operator==(const MessageRecord&) const = default;
};

struct ChannelRecord {
  ChannelId channel_id = 0;
  std::optional<std::string> username;
  std::string title;
  std::string description;
  UtcTime creation_date{};
  std::vector<MessageRecord> messages;  // ascending by timestamp after load

  bool operator==(const ChannelRecord&) const = default;
};

struct LoadIssue {
  std::string locator;  // file:line[#message index]
  std::string reason;
};

/// Channel lines and embedded messages are both "records": a bad message is
/// skipped on its own, a bad channel line drops the whole line.
struct LoadSummary {
  std::size_t channel_records = 0;
  std::size_t channels_parsed = 0;
  std::size_t channels_skipped = 0;
  std::size_t message_records = 0;
  std::size_t messages_parsed = 0;
  std::size_t messages_skipped = 0;
  std::vector<LoadIssue> skipped;   // one entry per skipped record
  std::vector<LoadIssue> warnings;  // repairs that kept the record

  std::size_t records_skipped() const { return channels_skipped + messages_skipped; }
};

struct LoadOptions {
  bool strict = false;  // abort on the first malformed record
};

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<ChannelRecord> channels, LoadSummary summary = {});

  const std::vector<ChannelRecord>& channels() const { return channels_; }
  const LoadSummary& summary() const { return summary_; }
  const ChannelRecord* find(ChannelId id) const;
  std::size_t message_count() const;

 private:
  std::vector<ChannelRecord> channels_;
  LoadSummary summary_;
  std::unordered_map<ChannelId, std::size_t> index_;
};

/// Loads a `.jsonl` file, or every `*.jsonl` file of a directory (shards are
/// parsed in parallel and concatenated in filename order). Throws
/// ValidationError on duplicate channel ids and ParseError in strict mode.
Corpus load_corpus(const fs::path& path, const LoadOptions& options = {});
Corpus parse_corpus(std::string_view jsonl, const std::string& source, const LoadOptions& options = {});

void write_channel(std::ostream& out, const ChannelRecord& channel);
void write_corpus(std::ostream& out, const std::vector<ChannelRecord>& channels);

// ---------------------------------------------------------------- catalog

enum class ResourceKind { youtube_channel, youtube_video, subreddit, voat_subverse, chan_board, website_domain };
inline constexpr std::size_t kResourceKindCount = 6;
inline constexpr std::array<ResourceKind, kResourceKindCount> kAllResourceKinds = {
    ResourceKind::youtube_video, ResourceKind::youtube_channel, ResourceKind::subreddit,
    ResourceKind::voat_subverse, ResourceKind::chan_board,      ResourceKind::website_domain};

std::string_view to_string(ResourceKind kind);
std::optional<ResourceKind> parse_resource_kind(std::string_view tag);

struct ResourceEntry {
  ResourceKind kind;
  std::string identifier;
  std::string source_label;
};

class ResourceCatalog {
 public:
  /// Normalizes the identifier for its kind; returns false if the
  /// (kind, identifier) pair is already present or the identifier is empty.
  bool add(ResourceEntry entry);
  bool contains(ResourceKind kind, std::string_view identifier) const;

  const std::vector<ResourceEntry>& entries() const { return entries_; }
  std::size_t count(ResourceKind kind) const;
  std::size_t size() const { return entries_.size(); }

  /// Subreddits, boards, subverses and domains are lowercased; domains are
  /// reduced to their registrable part. YouTube identifiers keep case.
  static std::string normalize_identifier(ResourceKind kind, std::string_view identifier);

 private:
  std::vector<ResourceEntry> entries_;
  std::array<std::unordered_set<std::string>, kResourceKindCount> index_;
};

struct CatalogLoad {
  ResourceCatalog catalog;
  std::vector<std::string> warnings;
};

/// CSV with header `kind,identifier,source_label`.
CatalogLoad load_catalog(const fs::path& path);
CatalogLoad parse_catalog(std::istream& in, const std::string& source);

}  // namespace conspigraph::dataset
