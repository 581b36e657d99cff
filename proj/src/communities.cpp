#include "conspigraph/communities.hpp"

#include <fstream>

#include "conspigraph/csv.hpp"

namespace conspigraph::communities {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string locator(const csv::Table& t, std::size_t r) { return t.source + ":" + std::to_string(t.lines[r]); }

std::int64_t to_int(const std::string& s, const std::string& loc) {
  try {
    std::size_t used = 0;
    auto v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(loc + ": expected an integer, got '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& loc) {
  try {
    std::size_t used = 0;
    auto v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(loc + ": expected a number, got '" + s + "'");
  }
}

}  // namespace

std::vector<std::uint32_t> FlagReport::conspiracy_ids() const {
  std::vector<std::uint32_t> out;
  for (const auto& r : rows)
    if (r.is_conspiracy) out.push_back(r.community_id);
  return out;
}

FlagReport flag_communities(const std::vector<std::uint32_t>& assignment, const std::vector<char>& flagged,
                            double threshold, std::size_t min_size) {
  if (assignment.size() != flagged.size()) throw ValidationError("partition and flags cover different node sets");
  FlagReport report;
  report.threshold = threshold;
  report.min_size = min_size;
  std::uint32_t count = 0;
  for (auto c : assignment) count = std::max(count, c + 1);
  report.rows.resize(count);
  for (std::uint32_t c = 0; c < count; ++c) report.rows[c].community_id = c;
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    auto& row = report.rows[assignment[v]];
    ++row.size;
    if (flagged[v]) ++row.flagged_count;
  }
  for (auto& row : report.rows) {
    row.flagged_fraction = row.size == 0 ? 0.0 : static_cast<double>(row.flagged_count) / static_cast<double>(row.size);
    row.is_conspiracy = row.size >= min_size && row.flagged_fraction >= threshold;
  }
  return report;
}

FlagReport flag_communities(const graph::ForwardingGraph& g, const std::vector<std::uint32_t>& assignment,
                            const matcher::FlaggedChannelSet& flagged, double threshold, std::size_t min_size) {
  std::vector<char> marks(g.node_count(), 0);
  for (std::size_t v = 0; v < g.node_count(); ++v) marks[v] = flagged.contains(g.nodes()[v]) ? 1 : 0;
  return flag_communities(assignment, marks, threshold, min_size);
}

void write_communities(const fs::path& path, const graph::ForwardingGraph& g,
                       const std::vector<std::uint32_t>& assignment) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"channel_id", "community_id"});
  for (std::size_t v = 0; v < g.node_count(); ++v)
    w.field(g.nodes()[v]).field(static_cast<std::int64_t>(assignment[v])).end_row();
}

std::map<ChannelId, std::uint32_t> read_communities(const fs::path& path) {
  auto t = csv::read_table(path);
  auto c_ch = t.column("channel_id"), c_c = t.column("community_id");
  std::map<ChannelId, std::uint32_t> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out[to_int(t.rows[r][c_ch], locator(t, r))] = static_cast<std::uint32_t>(to_int(t.rows[r][c_c], locator(t, r)));
  return out;
}

std::vector<std::uint32_t> read_assignment(const fs::path& path, const graph::ForwardingGraph& g) {
  auto map = read_communities(path);
  std::vector<std::uint32_t> out(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    auto it = map.find(g.nodes()[v]);
    if (it == map.end())
      throw ValidationError(path.string() + ": channel " + std::to_string(g.nodes()[v]) + " has no community");
    out[v] = it->second;
  }
  return out;
}

void write_scatter(const fs::path& path, const FlagReport& report) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"community_id", "size", "flagged_fraction"});
  for (const auto& r : report.rows)
    w.field(static_cast<std::int64_t>(r.community_id))
        .field(static_cast<std::int64_t>(r.size))
        .field(r.flagged_fraction, 6)
        .end_row();
}

void write_flag_report(const fs::path& path, const FlagReport& report) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"community_id", "size", "flagged_count", "flagged_fraction", "is_conspiracy"});
  for (const auto& r : report.rows)
    w.field(static_cast<std::int64_t>(r.community_id))
        .field(static_cast<std::int64_t>(r.size))
        .field(static_cast<std::int64_t>(r.flagged_count))
        .field(r.flagged_fraction, 6)
        .field(r.is_conspiracy ? "1" : "0")
        .end_row();
}

FlagReport read_flag_report(const fs::path& path) {
  auto t = csv::read_table(path);
  auto c_id = t.column("community_id"), c_size = t.column("size"), c_fc = t.column("flagged_count"),
       c_con = t.column("is_conspiracy");
  FlagReport report;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto loc = locator(t, r);
    CommunityRow row;
    row.community_id = static_cast<std::uint32_t>(to_int(t.rows[r][c_id], loc));
    row.size = static_cast<std::size_t>(to_int(t.rows[r][c_size], loc));
    row.flagged_count = static_cast<std::size_t>(to_int(t.rows[r][c_fc], loc));
    row.flagged_fraction =
        row.size == 0 ? 0.0 : static_cast<double>(row.flagged_count) / static_cast<double>(row.size);
    row.is_conspiracy = t.rows[r][c_con] == "1";
    if (row.community_id != report.rows.size()) throw ParseError(loc + ": community ids must be dense and ordered");
    report.rows.push_back(row);
  }
  return report;
}

void write_hits(const fs::path& path, const graph::ForwardingGraph& g, const hits::Scores& scores,
                const std::vector<std::uint32_t>& assignment) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"channel_id", "authority", "hub", "community_id"});
  for (auto v : hits::rank_by_authority(g, scores))
    w.field(g.nodes()[v])
        .field(scores.authority[v], 12)
        .field(scores.hub[v], 12)
        .field(static_cast<std::int64_t>(assignment[v]))
        .end_row();
}

std::vector<HitsRow> read_hits(const fs::path& path) {
  auto t = csv::read_table(path);
  auto c_ch = t.column("channel_id"), c_a = t.column("authority"), c_h = t.column("hub"),
       c_c = t.column("community_id");
  std::vector<HitsRow> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    auto loc = locator(t, r);
    out.push_back({to_int(t.rows[r][c_ch], loc), to_double(t.rows[r][c_a], loc), to_double(t.rows[r][c_h], loc),
                   static_cast<std::uint32_t>(to_int(t.rows[r][c_c], loc))});
  }
  return out;
}

std::map<std::uint32_t, std::vector<HitsRow>> top_authorities(const std::vector<HitsRow>& rows,
                                                               const FlagReport& report, std::size_t k) {
  std::map<std::uint32_t, std::vector<HitsRow>> out;
  for (auto c : report.conspiracy_ids()) out[c];
  for (const auto& row : rows) {
    auto it = out.find(row.community_id);
    if (it != out.end() && it->second.size() < k) it->second.push_back(row);
  }
  return out;
}

}  // namespace conspigraph::communities
