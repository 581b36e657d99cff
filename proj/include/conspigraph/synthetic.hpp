#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "conspigraph/dataset.hpp"
#include "conspigraph/matcher.hpp"

namespace conspigraph::synthetic {

// Planted-structure corpus for tests and scale runs. Channels are split into
// contiguous blocks that forward mostly among themselves; the first
// `conspiracy_blocks` blocks link heavily to catalogued resources.
struct Options {
  std::size_t channels = 200;
  std::size_t messages = 20'000;
  std::size_t blocks = 4;
  std::size_t conspiracy_blocks = 2;
  double forward_rate = 0.3;
  double forward_in_block = 0.95;
  double conspiracy_link_rate = 0.7;  // share of channels carrying planted links
  double background_link_rate = 0.05;
  double decoy_url_rate = 0.05;        // messages with a non-matching URL
  double monetization_rate = 0.3;      // conspiracy channels with monetization links
  double foreign_message_rate = 0.05;  // messages not in the block language
  std::string start_date = "2019-01-01";
  int span_days = 365;
  int spike_offset = 200;              // spike day, relative to start_date
  std::size_t spike_channels = 0;      // 0: channels / 10
  std::uint64_t seed = 1;
};

struct Truth {
  matcher::KindCounts planted_urls{};
  std::map<ChannelId, matcher::KindCounts> flagged;  // channels with >= 1 planted link
  std::vector<std::uint32_t> block_of;               // corpus order
  std::vector<std::string> language_of;              // corpus order
  std::vector<bool> conspiracy_block;
  std::int64_t spike_day = 0;                        // day number
};

struct Synthetic {
  std::vector<dataset::ChannelRecord> channels;
  dataset::ResourceCatalog catalog;
  Truth truth;
};

Synthetic generate(const Options& options);

/// Language of each block, cycling through this list.
const std::vector<std::string>& block_languages();

/// corpus.jsonl, catalog.csv and truth.json under `dir`.
void write(const fs::path& dir, const Synthetic& s);

}  // namespace conspigraph::synthetic
