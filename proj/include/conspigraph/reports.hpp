#pragma once

#include <map>
#include <vector>

#include "conspigraph/communities.hpp"
#include "conspigraph/matcher.hpp"
#include "conspigraph/metrics.hpp"
#include "conspigraph/monetization.hpp"

namespace conspigraph::reports {

// Every writer uses fixed column order and fixed decimals, and never embeds
// timestamps, so re-emitting from the same inputs is byte-identical.

/// totals.csv written by the match stage, read back.
matcher::MatchTotals read_totals(const fs::path& path);
// table1_totals.csv: type, resources, urls (+ total)
void write_table1(const fs::path& path, const matcher::MatchTotals& totals);

struct EcommerceRow {
  std::string platform;
  std::size_t urls = 0;
  std::size_t products = 0;
  std::optional<std::size_t> affiliated;  // only marketplaces with a partner program
};
std::vector<EcommerceRow> ecommerce_summary(const std::vector<monetization::EcommerceSighting>& sightings);
// table3_ecommerce.csv: platform, urls, products, affiliated (+ total)
void write_table3(const fs::path& path, const std::vector<EcommerceRow>& rows);

// table4_donation.csv: platform, urls, profiles, reachable, gain_usd, donors, period (+ total)
void write_table4(const fs::path& path, const std::vector<metrics::AggregateRow>& rows);
// table5_crowdfunding.csv: platform, urls, projects, reachable, funds_usd, backers, failed_excluded (+ total)
void write_table5(const fs::path& path, const std::vector<metrics::AggregateRow>& rows);
// blockchain.csv: chain, urls, addresses, summarized, amount_usd, transactions
void write_blockchain(const fs::path& path, const std::vector<metrics::AggregateRow>& rows);

// aggregate.csv: the metrics stage's persisted AggregateRows
void write_aggregate(const fs::path& path, const std::vector<metrics::AggregateRow>& rows);
std::vector<metrics::AggregateRow> read_aggregate(const fs::path& path);

struct ChannelInfo {
  ChannelId channel_id = 0;
  std::string username;
  std::string title;
  UtcTime creation_date{};
  std::size_t messages = 0;
};
// channels.csv: channel_id, username, title, creation_date, messages
void write_channels(const fs::path& path, const std::vector<ChannelInfo>& channels);
std::vector<ChannelInfo> read_channels(const fs::path& path);

// top_authorities.csv: community_id, rank, channel_id, username, title, authority
void write_top_authorities(const fs::path& path,
                           const std::map<std::uint32_t, std::vector<communities::HitsRow>>& top,
                           const std::vector<ChannelInfo>& channels);

struct LongitudinalSeries {
  std::int64_t first_day = 0;                        // day number
  std::vector<std::uint32_t> communities;            // flagged community ids, ascending
  std::vector<std::vector<std::size_t>> per_community;  // [community][day]
  std::vector<std::size_t> conspiracy;
  std::vector<std::size_t> rest;

  std::size_t days() const { return rest.size(); }
};

/// Daily creation counts over the contiguous span of creation dates.
/// Channels without a community count toward `rest`.
LongitudinalSeries longitudinal(const std::vector<ChannelInfo>& channels,
                                const std::map<ChannelId, std::uint32_t>& community_of,
                                const communities::FlagReport& report);
// longitudinal.csv: date, community_<id>..., conspiracy, rest, total
void write_longitudinal(const fs::path& path, const LongitudinalSeries& series);

}  // namespace conspigraph::reports
