#pragma once

#include <map>
#include <vector>

#include "conspigraph/graph.hpp"
#include "conspigraph/hits.hpp"
#include "conspigraph/leiden.hpp"
#include "conspigraph/matcher.hpp"

namespace conspigraph::communities {

struct CommunityRow {
  std::uint32_t community_id = 0;
  std::size_t size = 0;
  std::size_t flagged_count = 0;
  double flagged_fraction = 0;
  bool is_conspiracy = false;
};

struct FlagReport {
  std::vector<CommunityRow> rows;  // by community id
  double threshold = 0.40;
  std::size_t min_size = 10;

  bool is_conspiracy(std::uint32_t community) const {
    return community < rows.size() && rows[community].is_conspiracy;
  }
  std::vector<std::uint32_t> conspiracy_ids() const;
};

/// `flagged[v]` tells whether node v is a flagged channel.
FlagReport flag_communities(const std::vector<std::uint32_t>& assignment, const std::vector<char>& flagged,
                            double threshold = 0.40, std::size_t min_size = 10);
FlagReport flag_communities(const graph::ForwardingGraph& g, const std::vector<std::uint32_t>& assignment,
                            const matcher::FlaggedChannelSet& flagged, double threshold = 0.40,
                            std::size_t min_size = 10);

// communities.csv: channel_id, community_id
void write_communities(const fs::path& path, const graph::ForwardingGraph& g,
                       const std::vector<std::uint32_t>& assignment);
std::map<ChannelId, std::uint32_t> read_communities(const fs::path& path);
/// Assignment by node index; every graph node must be present.
std::vector<std::uint32_t> read_assignment(const fs::path& path, const graph::ForwardingGraph& g);

// scatter.csv: community_id, size, flagged_fraction
void write_scatter(const fs::path& path, const FlagReport& report);
// flag_report.csv: community_id, size, flagged_count, flagged_fraction, is_conspiracy
void write_flag_report(const fs::path& path, const FlagReport& report);
FlagReport read_flag_report(const fs::path& path);

// hits.csv: channel_id, authority, hub, community_id (ranked by authority)
struct HitsRow {
  ChannelId channel_id = 0;
  double authority = 0;
  double hub = 0;
  std::uint32_t community_id = 0;
};
void write_hits(const fs::path& path, const graph::ForwardingGraph& g, const hits::Scores& scores,
                const std::vector<std::uint32_t>& assignment);
std::vector<HitsRow> read_hits(const fs::path& path);

/// Top `k` channels by authority inside each conspiracy community, using the
/// rank order of `rows` (already sorted by authority, then channel id).
std::map<std::uint32_t, std::vector<HitsRow>> top_authorities(const std::vector<HitsRow>& rows,
                                                               const FlagReport& report, std::size_t k = 5);

}  // namespace conspigraph::communities
