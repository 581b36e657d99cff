#include "conspigraph/reports.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "conspigraph/csv.hpp"
#include "conspigraph/timeutil.hpp"

namespace conspigraph::reports {

namespace {

using monetization::Category;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

std::int64_t parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t n = 0;
    auto v = std::stoll(s, &n);
    if (n == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(where + ": bad integer '" + s + "'");
}

double parse_real(const std::string& s, const std::string& where) {
  try {
    std::size_t n = 0;
    auto v = std::stod(s, &n);
    if (n == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(where + ": bad number '" + s + "'");
}

std::string money(double usd) { return csv::format_fixed(usd, 2); }

}  // namespace

matcher::MatchTotals read_totals(const fs::path& path) {
  auto t = csv::read_table(path);
  auto ki = t.column("kind"), ci = t.column("catalog_entries"), ui = t.column("urls");
  matcher::MatchTotals out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    if (row.at(ki) == "total") continue;
    auto where = t.source + ":" + std::to_string(t.lines[r]);
    auto kind = dataset::parse_resource_kind(row.at(ki));
    if (!kind) throw ParseError(where + ": unknown kind '" + row.at(ki) + "'");
    out.catalog_entries[matcher::kind_index(*kind)] = static_cast<std::size_t>(parse_int(row.at(ci), where));
    out.urls[matcher::kind_index(*kind)] = static_cast<std::size_t>(parse_int(row.at(ui), where));
  }
  return out;
}

void write_table1(const fs::path& path, const matcher::MatchTotals& totals) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"type", "resources", "urls"});
  std::size_t resources = 0;
  for (auto k : dataset::kAllResourceKinds) {
    auto i = matcher::kind_index(k);
    resources += totals.catalog_entries[i];
    w.field(dataset::to_string(k)).field(as_int(totals.catalog_entries[i])).field(as_int(totals.urls[i])).end_row();
  }
  w.field("total").field(as_int(resources)).field(as_int(totals.total_urls())).end_row();
}

std::vector<EcommerceRow> ecommerce_summary(const std::vector<monetization::EcommerceSighting>& sightings) {
  std::map<std::string, std::pair<EcommerceRow, std::set<std::string>>> acc;
  for (const auto& s : sightings) {
    auto& [row, products] = acc[s.platform];
    row.platform = s.platform;
    ++row.urls;
    products.insert(s.product);
    if (s.platform == "Amazon" || s.platform == "eBay") row.affiliated = row.affiliated.value_or(0) + (s.affiliate ? 1 : 0);
  }
  std::vector<EcommerceRow> out;
  for (auto& [name, p] : acc) {
    p.first.products = p.second.size();
    out.push_back(p.first);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.urls > b.urls; });
  return out;
}

void write_table3(const fs::path& path, const std::vector<EcommerceRow>& rows) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"platform", "urls", "products", "affiliated"});
  std::size_t urls = 0, products = 0, affiliated = 0;
  for (const auto& r : rows) {
    urls += r.urls;
    products += r.products;
    affiliated += r.affiliated.value_or(0);
    w.field(r.platform).field(as_int(r.urls)).field(as_int(r.products));
    w.field(r.affiliated ? std::to_string(*r.affiliated) : "-").end_row();
  }
  w.field("total").field(as_int(urls)).field(as_int(products)).field(as_int(affiliated)).end_row();
}

void write_table4(const fs::path& path, const std::vector<metrics::AggregateRow>& rows) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"platform", "urls", "profiles", "reachable", "gain_usd", "donors", "period"});
  std::size_t urls = 0, profiles = 0, reachable = 0;
  double gain = 0;
  std::int64_t donors = 0;
  for (const auto& r : rows) {
    if (r.category != Category::donation) continue;
    urls += r.url_count;
    profiles += r.distinct_ids;
    reachable += r.reachable;
    w.field(r.platform).field(as_int(r.url_count)).field(as_int(r.distinct_ids)).field(as_int(r.reachable));
    if (r.amounts_published) {
      gain += r.total_funds_usd;
      donors += r.total_supporters;
      w.field(money(r.total_funds_usd)).field(r.total_supporters);
    } else {
      w.field("-").field("-");
    }
    w.field(metrics::to_string(r.period)).end_row();
  }
  w.field("total").field(as_int(urls)).field(as_int(profiles)).field(as_int(reachable));
  w.field(money(gain)).field(donors).field("").end_row();
}

void write_table5(const fs::path& path, const std::vector<metrics::AggregateRow>& rows) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"platform", "urls", "projects", "reachable", "funds_usd", "backers", "failed_excluded"});
  std::size_t urls = 0, projects = 0, reachable = 0, failed = 0;
  double funds = 0;
  std::int64_t backers = 0;
  for (const auto& r : rows) {
    if (r.category != Category::crowdfunding) continue;
    urls += r.url_count;
    projects += r.distinct_ids;
    reachable += r.reachable;
    failed += r.failed_excluded;
    w.field(r.platform).field(as_int(r.url_count)).field(as_int(r.distinct_ids)).field(as_int(r.reachable));
    if (r.amounts_published) {
      funds += r.total_funds_usd;
      backers += r.total_supporters;
      w.field(money(r.total_funds_usd)).field(r.total_supporters);
    } else {
      w.field("-").field("-");
    }
    w.field(as_int(r.failed_excluded)).end_row();
  }
  w.field("total").field(as_int(urls)).field(as_int(projects)).field(as_int(reachable));
  w.field(money(funds)).field(backers).field(as_int(failed)).end_row();
}

void write_blockchain(const fs::path& path, const std::vector<metrics::AggregateRow>& rows) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"chain", "urls", "addresses", "summarized", "amount_usd", "transactions"});
  for (const auto& r : rows) {
    if (r.category != Category::blockchain) continue;
    w.field(r.platform).field(as_int(r.url_count)).field(as_int(r.distinct_ids)).field(as_int(r.reachable));
    w.field(r.amounts_published ? money(r.total_funds_usd) : "-").field(r.total_supporters).end_row();
  }
}

void write_aggregate(const fs::path& path, const std::vector<metrics::AggregateRow>& rows) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"category", "platform", "url_count", "distinct_ids", "reachable", "failed_excluded", "amounts_published",
         "total_funds_usd", "total_supporters", "period"});
  for (const auto& r : rows)
    w.field(monetization::to_string(r.category))
        .field(r.platform)
        .field(as_int(r.url_count))
        .field(as_int(r.distinct_ids))
        .field(as_int(r.reachable))
        .field(as_int(r.failed_excluded))
        .field(r.amounts_published ? "1" : "0")
        .field(r.total_funds_usd, 2)
        .field(r.total_supporters)
        .field(metrics::to_string(r.period))
        .end_row();
}

std::vector<metrics::AggregateRow> read_aggregate(const fs::path& path) {
  auto t = csv::read_table(path);
  std::vector<std::size_t> c;
  for (auto name : {"category", "platform", "url_count", "distinct_ids", "reachable", "failed_excluded",
                    "amounts_published", "total_funds_usd", "total_supporters", "period"})
    c.push_back(t.column(name));
  std::vector<metrics::AggregateRow> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    auto where = t.source + ":" + std::to_string(t.lines[i]);
    metrics::AggregateRow r;
    auto cat = monetization::parse_category(row.at(c[0]));
    if (!cat) throw ParseError(where + ": unknown category");
    r.category = *cat;
    r.platform = row.at(c[1]);
    r.url_count = static_cast<std::size_t>(parse_int(row.at(c[2]), where));
    r.distinct_ids = static_cast<std::size_t>(parse_int(row.at(c[3]), where));
    r.reachable = static_cast<std::size_t>(parse_int(row.at(c[4]), where));
    r.failed_excluded = static_cast<std::size_t>(parse_int(row.at(c[5]), where));
    r.amounts_published = row.at(c[6]) == "1";
    r.total_funds_usd = parse_real(row.at(c[7]), where);
    r.total_supporters = parse_int(row.at(c[8]), where);
    const auto& p = row.at(c[9]);
    r.period = p == "monthly" ? metrics::Period::monthly
               : p == "lifetime" ? metrics::Period::lifetime
                                 : metrics::Period::campaign_total;
    out.push_back(std::move(r));
  }
  return out;
}

void write_channels(const fs::path& path, const std::vector<ChannelInfo>& channels) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"channel_id", "username", "title", "creation_date", "messages"});
  for (const auto& c : channels)
    w.field(c.channel_id)
        .field(c.username)
        .field(c.title)
        .field(timeutil::format_iso8601(c.creation_date))
        .field(as_int(c.messages))
        .end_row();
}

std::vector<ChannelInfo> read_channels(const fs::path& path) {
  auto t = csv::read_table(path);
  auto ci = t.column("channel_id"), ui = t.column("username"), ti = t.column("title"), di = t.column("creation_date"),
       mi = t.column("messages");
  std::vector<ChannelInfo> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    auto where = t.source + ":" + std::to_string(t.lines[i]);
    ChannelInfo c;
    c.channel_id = parse_int(row.at(ci), where);
    c.username = row.at(ui);
    c.title = row.at(ti);
    auto d = timeutil::parse_iso8601(row.at(di));
    if (!d) throw ParseError(where + ": bad creation_date");
    c.creation_date = *d;
    c.messages = static_cast<std::size_t>(parse_int(row.at(mi), where));
    out.push_back(std::move(c));
  }
  return out;
}

void write_top_authorities(const fs::path& path, const std::map<std::uint32_t, std::vector<communities::HitsRow>>& top,
                           const std::vector<ChannelInfo>& channels) {
  std::map<ChannelId, const ChannelInfo*> info;
  for (const auto& c : channels) info[c.channel_id] = &c;
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"community_id", "rank", "channel_id", "username", "title", "authority"});
  for (const auto& [community, rows] : top) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      auto it = info.find(rows[r].channel_id);
      w.field(static_cast<std::int64_t>(community)).field(as_int(r + 1)).field(rows[r].channel_id);
      w.field(it == info.end() ? "" : it->second->username).field(it == info.end() ? "" : it->second->title);
      w.field(rows[r].authority, 12).end_row();
    }
  }
}

LongitudinalSeries longitudinal(const std::vector<ChannelInfo>& channels,
                                const std::map<ChannelId, std::uint32_t>& community_of,
                                const communities::FlagReport& report) {
  LongitudinalSeries s;
  s.communities = report.conspiracy_ids();
  std::sort(s.communities.begin(), s.communities.end());
  s.per_community.resize(s.communities.size());
  if (channels.empty()) return s;
  std::int64_t lo = INT64_MAX, hi = INT64_MIN;
  for (const auto& c : channels) {
    auto d = timeutil::day_number(c.creation_date);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  auto days = static_cast<std::size_t>(hi - lo + 1);
  s.first_day = lo;
  s.conspiracy.assign(days, 0);
  s.rest.assign(days, 0);
  for (auto& v : s.per_community) v.assign(days, 0);
  for (const auto& c : channels) {
    auto d = static_cast<std::size_t>(timeutil::day_number(c.creation_date) - lo);
    auto it = community_of.find(c.channel_id);
    if (it == community_of.end() || !report.is_conspiracy(it->second)) {
      ++s.rest[d];
      continue;
    }
    ++s.conspiracy[d];
    auto pos = std::lower_bound(s.communities.begin(), s.communities.end(), it->second) - s.communities.begin();
    ++s.per_community[static_cast<std::size_t>(pos)][d];
  }
  return s;
}

void write_longitudinal(const fs::path& path, const LongitudinalSeries& s) {
  auto out = open_out(path);
  csv::Writer w(out);
  std::vector<std::string> header{"date"};
  for (auto c : s.communities) header.push_back("community_" + std::to_string(c));
  for (auto h : {"conspiracy", "rest", "total"}) header.emplace_back(h);
  w.row(header);
  for (std::size_t d = 0; d < s.days(); ++d) {
    w.field(timeutil::format_day_number(s.first_day + static_cast<std::int64_t>(d)));
    for (const auto& col : s.per_community) w.field(as_int(col[d]));
    w.field(as_int(s.conspiracy[d])).field(as_int(s.rest[d])).field(as_int(s.conspiracy[d] + s.rest[d])).end_row();
  }
}

}  // namespace conspigraph::reports
