#include "conspigraph/matcher.hpp"

#include <fstream>

#include "conspigraph/csv.hpp"
#include "conspigraph/domain.hpp"

namespace conspigraph::matcher {

namespace {

bool is_youtube(std::string_view host) { return domain::host_within(host, "youtube.com"); }
bool is_youtu_be(std::string_view host) { return domain::host_within(host, "youtu.be"); }

bool is_chan_host(std::string_view host) {
  return domain::host_within(host, "8kun.top") || domain::host_within(host, "8kun.net") ||
         domain::host_within(host, "8ch.net");
}

std::optional<std::string> decoded(std::string_view segment) {
  auto s = url::percent_decode(segment);
  if (s.empty()) return std::nullopt;
  return s;
}

std::optional<std::string> youtube_video(const url::NormalizedUrl& u) {
  auto segs = u.path_segments();
  if (is_youtu_be(u.host)) return segs.empty() ? std::nullopt : decoded(segs[0]);
  if (!is_youtube(u.host)) return std::nullopt;
  if (segs.size() == 1 && segs[0] == "watch") {
    auto v = u.query_value("v");
    return v ? decoded(*v) : std::nullopt;
  }
  if (segs.size() >= 2 && (segs[0] == "shorts" || segs[0] == "embed")) return decoded(segs[1]);
  return std::nullopt;
}

std::optional<std::string> youtube_channel(const url::NormalizedUrl& u) {
  if (!is_youtube(u.host)) return std::nullopt;
  auto segs = u.path_segments();
  if (segs.empty()) return std::nullopt;
  if (segs[0].starts_with('@') && segs[0].size() > 1) return decoded(segs[0]);
  if (segs.size() < 2) return std::nullopt;
  if (segs[0] == "channel") return decoded(segs[1]);
  if (segs[0] == "c" || segs[0] == "user") {
    auto name = decoded(segs[1]);
    if (!name) return std::nullopt;
    return std::string(segs[0]) + "/" + *name;
  }
  return std::nullopt;
}

std::optional<std::string> prefixed_name(const url::NormalizedUrl& u, std::string_view prefix) {
  auto segs = u.path_segments();
  if (segs.size() < 2 || segs[0] != prefix) return std::nullopt;
  auto name = decoded(segs[1]);
  if (!name) return std::nullopt;
  return strings::to_lower(*name);
}

}  // namespace

std::optional<std::string> candidate(const url::NormalizedUrl& u, ResourceKind kind) {
  switch (kind) {
    case ResourceKind::youtube_video:
      return youtube_video(u);
    case ResourceKind::youtube_channel:
      return youtube_channel(u);
    case ResourceKind::subreddit:
      if (!domain::host_within(u.host, "reddit.com")) return std::nullopt;
      return prefixed_name(u, "r");
    case ResourceKind::voat_subverse:
      if (!domain::host_within(u.host, "voat.co")) return std::nullopt;
      return prefixed_name(u, "v");
    case ResourceKind::chan_board: {
      if (!is_chan_host(u.host)) return std::nullopt;
      auto segs = u.path_segments();
      if (segs.empty()) return std::nullopt;
      auto board = decoded(segs[0]);
      if (!board) return std::nullopt;
      return strings::to_lower(*board);
    }
    case ResourceKind::website_domain: {
      auto reg = domain::PublicSuffixList::bundled().registrable_domain(u.host);
      if (reg.empty()) return std::nullopt;
      return std::string(reg);
    }
  }
  return std::nullopt;
}

std::optional<ResourceMatch> match_url(const url::NormalizedUrl& u, const dataset::ResourceCatalog& catalog) {
  for (auto kind : dataset::kAllResourceKinds) {
    if (catalog.count(kind) == 0) continue;
    auto id = candidate(u, kind);
    if (id && catalog.contains(kind, *id)) return ResourceMatch{kind, std::move(*id)};
  }
  return std::nullopt;
}

std::size_t MatchTotals::total_urls() const {
  std::size_t n = 0;
  for (auto c : urls) n += c;
  return n;
}

MatchResult match_corpus(const std::vector<resolver::UrlRow>& rows, const dataset::ResourceCatalog& catalog) {
  MatchResult out;
  for (auto kind : dataset::kAllResourceKinds) out.totals.catalog_entries[kind_index(kind)] = catalog.count(kind);
  for (const auto& row : rows) {
    auto m = match_url(row.effective, catalog);
    if (!m) continue;
    ++out.totals.urls[kind_index(m->kind)];
    out.matches.push_back({row.channel_id, row.message_id, row.effective.to_string(), m->kind, std::move(m->identifier)});
  }
  return out;
}

FlaggedChannelSet flag_channels(const std::vector<MatchRow>& matches) {
  FlaggedChannelSet out;
  for (const auto& m : matches) ++out.per_channel[m.channel_id][kind_index(m.kind)];
  return out;
}

// ---------------------------------------------------------------- files

namespace {

std::ofstream open_out(const fs::path& path) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::int64_t to_int(const std::string& s, const std::string& locator) {
  try {
    std::size_t used = 0;
    auto v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(locator + ": expected an integer, got '" + s + "'");
  }
}

}  // namespace

void write_matches(const fs::path& path, const std::vector<MatchRow>& matches) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"channel_id", "message_id", "effective_url", "kind", "identifier"});
  for (const auto& m : matches)
    w.field(m.channel_id).field(m.message_id).field(m.effective_url).field(to_string(m.kind)).field(m.identifier).end_row();
}

std::vector<MatchRow> read_matches(const fs::path& path) {
  auto table = csv::read_table(path);
  auto c_ch = table.column("channel_id"), c_msg = table.column("message_id"), c_url = table.column("effective_url"),
       c_kind = table.column("kind"), c_id = table.column("identifier");
  std::vector<MatchRow> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string loc = table.source + ":" + std::to_string(table.lines[r]);
    auto kind = dataset::parse_resource_kind(row[c_kind]);
    if (!kind) throw ParseError(loc + ": unknown kind '" + row[c_kind] + "'");
    out.push_back({to_int(row[c_ch], loc), to_int(row[c_msg], loc), row[c_url], *kind, row[c_id]});
  }
  return out;
}

void write_totals(const fs::path& path, const MatchTotals& totals) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"kind", "catalog_entries", "urls"});
  std::size_t entries = 0;
  for (auto kind : dataset::kAllResourceKinds) {
    auto i = kind_index(kind);
    entries += totals.catalog_entries[i];
    w.field(to_string(kind))
        .field(static_cast<std::int64_t>(totals.catalog_entries[i]))
        .field(static_cast<std::int64_t>(totals.urls[i]))
        .end_row();
  }
  w.field("total").field(static_cast<std::int64_t>(entries)).field(static_cast<std::int64_t>(totals.total_urls())).end_row();
}

void write_flagged(const fs::path& path, const FlaggedChannelSet& flagged) {
  auto out = open_out(path);
  csv::Writer w(out);
  std::vector<std::string> header{"channel_id"};
  for (auto kind : dataset::kAllResourceKinds) header.emplace_back(to_string(kind));
  header.emplace_back("total");
  w.row(header);
  for (const auto& [id, counts] : flagged.per_channel) {
    w.field(id);
    std::size_t total = 0;
    for (auto kind : dataset::kAllResourceKinds) {
      total += counts[kind_index(kind)];
      w.field(static_cast<std::int64_t>(counts[kind_index(kind)]));
    }
    w.field(static_cast<std::int64_t>(total)).end_row();
  }
}

FlaggedChannelSet read_flagged(const fs::path& path) {
  auto table = csv::read_table(path);
  auto c_ch = table.column("channel_id");
  std::array<std::size_t, dataset::kResourceKindCount> cols{};
  for (auto kind : dataset::kAllResourceKinds) cols[kind_index(kind)] = table.column(to_string(kind));
  FlaggedChannelSet out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string loc = table.source + ":" + std::to_string(table.lines[r]);
    KindCounts counts{};
    for (std::size_t k = 0; k < counts.size(); ++k)
      counts[k] = static_cast<std::size_t>(to_int(table.rows[r][cols[k]], loc));
    out.per_channel[to_int(table.rows[r][c_ch], loc)] = counts;
  }
  return out;
}

}  // namespace conspigraph::matcher
