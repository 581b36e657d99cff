#include "conspigraph/monetization.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "conspigraph/csv.hpp"
#include "conspigraph/domain.hpp"

namespace conspigraph::monetization {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::affiliate: return "affiliate";
    case Category::donation: return "donation";
    case Category::crowdfunding: return "crowdfunding";
    case Category::shopfront: return "shopfront";
    case Category::wishlist: return "wishlist";
    case Category::blockchain: return "blockchain";
    case Category::custom_shop: return "custom_shop";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view s) {
  for (auto c : {Category::affiliate, Category::donation, Category::crowdfunding, Category::shopfront,
                 Category::wishlist, Category::blockchain, Category::custom_shop})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

std::string_view to_string(PlatformCategory c) {
  switch (c) {
    case PlatformCategory::ecommerce: return "ecommerce";
    case PlatformCategory::donation: return "donation";
    case PlatformCategory::crowdfunding: return "crowdfunding";
  }
  return "unknown";
}

namespace {

std::optional<PlatformCategory> parse_platform_category(std::string_view s) {
  for (auto c : {PlatformCategory::ecommerce, PlatformCategory::donation, PlatformCategory::crowdfunding})
    if (to_string(c) == s) return c;
  return std::nullopt;
}

bool is_wildcard(std::string_view domain) { return domain.ends_with(".*"); }

// "en", "de", "en-gb", "en_US"
bool is_locale(std::string_view seg) {
  auto alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
  if (seg.size() == 2) return alpha(seg[0]) && alpha(seg[1]);
  if (seg.size() == 5 && (seg[2] == '-' || seg[2] == '_'))
    return alpha(seg[0]) && alpha(seg[1]) && alpha(seg[3]) && alpha(seg[4]);
  return false;
}

bool path_has_prefix(std::string_view path, std::string_view prefix) {
  if (!strings::starts_with_icase(path, prefix)) return false;
  return path.size() == prefix.size() || path[prefix.size()] == '/' || prefix.ends_with('/');
}

bool discriminator_matches(const url::NormalizedUrl& u, std::string_view disc) {
  if (path_has_prefix(u.path, disc)) return true;
  auto segs = u.path_segments();
  if (segs.empty() || !is_locale(segs[0])) return false;
  return path_has_prefix(std::string_view(u.path).substr(segs[0].size() + 1), disc);
}

bool domain_matches(const PlatformEntry& e, std::string_view host) {
  if (is_wildcard(e.domain)) return brand_label(host) == std::string_view(e.domain).substr(0, e.domain.size() - 2);
  return domain::host_within(host, e.domain);
}

// Segments from `keyword` on, allowing one locale segment in front of it.
std::vector<std::string_view> after_keyword(const url::NormalizedUrl& u, std::string_view keyword) {
  auto segs = u.path_segments();
  std::size_t start = 0;
  if (!segs.empty() && is_locale(segs[0]) && segs.size() > 1 && segs[1] == keyword) start = 1;
  if (start >= segs.size() || segs[start] != keyword) return {};
  return {segs.begin() + static_cast<std::ptrdiff_t>(start) + 1, segs.end()};
}

std::string slug_of(std::string_view seg) { return strings::to_lower(url::percent_decode(seg)); }

std::string first_segment(const url::NormalizedUrl& u) {
  auto segs = u.path_segments();
  return segs.empty() ? std::string() : slug_of(segs[0]);
}

std::string nth_after(const url::NormalizedUrl& u, std::string_view keyword, std::size_t n = 0) {
  auto rest = after_keyword(u, keyword);
  return rest.size() > n ? slug_of(rest[n]) : std::string();
}

std::string query_id(const url::NormalizedUrl& u, std::initializer_list<std::string_view> keys) {
  for (auto k : keys)
    if (auto v = u.query_value(k); v && !v->empty()) return url::percent_decode(*v);
  return {};
}

std::string extract_identifier(const url::NormalizedUrl& u, const PlatformEntry& e) {
  const auto& p = e.platform;
  if (p == "PayPal/donate") return query_id(u, {"hosted_button_id", "business", "campaign_id"});
  if (p == "PayPal/pools") return nth_after(u, "pools", 0) == "c" ? nth_after(u, "pools", 1) : std::string();
  if (p == "GoFundMe") return nth_after(u, "f");
  if (p == "Indiegogo") return nth_after(u, "projects");
  if (p == "Kickstarter") {
    auto user = nth_after(u, "projects", 0), slug = nth_after(u, "projects", 1);
    return user.empty() || slug.empty() ? std::string() : user + "/" + slug;
  }
  if (p == "Fundrazr") {
    if (auto s = nth_after(u, "campaigns"); !s.empty()) return s;
    return first_segment(u);
  }
  if (p == "Patreon") {
    auto segs = u.path_segments();
    if (segs.empty()) return {};
    if (segs[0] == "user") return query_id(u, {"u"});
    if ((segs[0] == "c" || segs[0] == "join") && segs.size() > 1) return slug_of(segs[1]);
    return slug_of(segs[0]);
  }
  return first_segment(u);
}

Hit make_hit(Category c, std::string platform, std::string id, const url::NormalizedUrl& u) {
  Hit h;
  h.category = c;
  h.platform = std::move(platform);
  h.extracted_id = std::move(id);
  h.url = u.to_string();
  return h;
}

}  // namespace

// ---------------------------------------------------------------- catalog

PlatformCatalog PlatformCatalog::parse(std::istream& in, const std::string& source) {
  auto table = csv::read_table(in, source);
  auto dc = table.column("domain"), cc = table.column("category"), pc = table.column("platform");
  std::optional<std::size_t> pathc;
  if (table.has_column("path")) pathc = table.column("path");
  PlatformCatalog out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    auto where = source + ":" + std::to_string(table.lines[i]);
    PlatformEntry e;
    e.domain = strings::to_lower(strings::trim(r.at(dc)));
    auto cat = parse_platform_category(strings::trim(r.at(cc)));
    if (!cat) throw ParseError(where + ": unknown category '" + r.at(cc) + "'");
    e.category = *cat;
    e.platform = std::string(strings::trim(r.at(pc)));
    if (pathc) e.path = std::string(strings::trim(r.at(*pathc)));
    if (e.domain.empty() || e.platform.empty()) throw ParseError(where + ": empty domain or platform");
    if (!e.path.empty() && e.path[0] != '/') e.path.insert(0, "/");
    if (!seen.emplace(e.domain, e.path).second)
      throw ParseError(where + ": duplicate entry " + e.domain + e.path);
    out.entries_.push_back(std::move(e));
  }
  return out;
}

PlatformCatalog PlatformCatalog::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open platform catalog " + path.string());
  return parse(in, path.string());
}

const PlatformCatalog& PlatformCatalog::bundled() {
  static const PlatformCatalog c = load(data_dir() / "platforms.csv");
  return c;
}

const PlatformEntry* PlatformCatalog::match(const url::NormalizedUrl& u) const {
  const PlatformEntry* best = nullptr;
  auto rank = [](const PlatformEntry& e) { return std::pair(e.path.empty() ? 0 : 1, e.domain.size()); };
  for (const auto& e : entries_) {
    if (!domain_matches(e, u.host)) continue;
    if (!e.path.empty() && !discriminator_matches(u, e.path)) continue;
    if (!best || rank(e) > rank(*best)) best = &e;
  }
  return best;
}

bool PlatformCatalog::covers_host(std::string_view host) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return domain_matches(e, host); });
}

// ---------------------------------------------------------------- detectors

std::string_view brand_label(std::string_view host) {
  auto reg = domain::PublicSuffixList::bundled().registrable_domain(host);
  return reg.substr(0, reg.find('.'));
}

std::optional<Hit> detect_affiliate(const url::NormalizedUrl& u) {
  auto brand = brand_label(u.host);
  if (brand == "amazon") {
    if (auto tag = u.query_value("tag"); tag && !tag->empty())
      return make_hit(Category::affiliate, "Amazon", url::percent_decode(*tag), u);
  } else if (brand == "ebay") {
    if (auto id = u.query_value("campid"); id && !id->empty())
      return make_hit(Category::affiliate, "eBay", url::percent_decode(*id), u);
  }
  return std::nullopt;
}

std::optional<Hit> detect_platform(const url::NormalizedUrl& u, const PlatformCatalog& catalog) {
  const auto* e = catalog.match(u);
  if (!e || e->category == PlatformCategory::ecommerce) return std::nullopt;
  auto id = extract_identifier(u, *e);
  while (!id.empty() && id.back() == '/') id.pop_back();
  if (id.empty()) log_warn("no " + e->platform + " identifier in " + u.to_string());
  auto c = e->category == PlatformCategory::donation ? Category::donation : Category::crowdfunding;
  return make_hit(c, e->platform, std::move(id), u);
}

std::optional<Hit> detect_amazon_pages(const url::NormalizedUrl& u) {
  if (brand_label(u.host) != "amazon") return std::nullopt;
  auto segs = u.path_segments();
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    if (segs[i] == "shop") return make_hit(Category::shopfront, "Amazon", url::percent_decode(segs.back()), u);
    if (segs[i] == "wishlist") return make_hit(Category::wishlist, "Amazon", url::percent_decode(segs.back()), u);
  }
  return std::nullopt;
}

ShopKeywords ShopKeywords::parse(std::string_view text) {
  ShopKeywords k;
  for (auto line : strings::split(text, '\n')) {
    auto w = strings::trim(line);
    if (w.empty() || w[0] == '#') continue;
    k.words_.insert(strings::to_lower(w));
  }
  return k;
}

const ShopKeywords& ShopKeywords::bundled() {
  static const ShopKeywords k = parse(read_file(data_dir() / "shop_keywords.txt"));
  return k;
}

std::optional<Hit> detect_custom_shop(const url::NormalizedUrl& u, const PlatformCatalog& catalog,
                                      const ShopKeywords& keywords) {
  if (catalog.covers_host(u.host)) return std::nullopt;
  auto brand = brand_label(u.host);
  if (brand == "amazon" || brand == "ebay") return std::nullopt;
  const auto& psl = domain::PublicSuffixList::bundled();
  auto reg = std::string(psl.registrable_domain(u.host));
  if (reg.empty()) return std::nullopt;
  bool hit = keywords.contains(domain::third_level_label(u.host, psl));
  for (auto seg : u.path_segments()) {
    if (hit) break;
    hit = keywords.contains(url::percent_decode(seg));
  }
  if (!hit) return std::nullopt;
  return make_hit(Category::custom_shop, reg, reg, u);
}

std::optional<Hit> classify_url(const url::NormalizedUrl& u, const PlatformCatalog& catalog,
                                const ShopKeywords& keywords) {
  if (auto h = detect_affiliate(u)) return h;
  if (auto h = detect_platform(u, catalog)) return h;
  if (auto h = detect_amazon_pages(u)) return h;
  return detect_custom_shop(u, catalog, keywords);
}

// ---------------------------------------------------------------- e-commerce

std::string product_key(const url::NormalizedUrl& u, std::string_view platform) {
  auto segs = u.path_segments();
  auto upper = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  };
  if (platform == "Amazon") {
    for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
      if (segs[i] == "dp" || segs[i] == "ASIN") return upper(std::string(segs[i + 1]));
      if (segs[i] == "product" && i > 0 && segs[i - 1] == "gp") return upper(std::string(segs[i + 1]));
    }
  } else if (platform == "eBay") {
    if (!segs.empty() && segs[0] == "itm") {
      for (auto it = segs.rbegin(); it != segs.rend() - 1; ++it)
        if (!it->empty() && std::all_of(it->begin(), it->end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
          return std::string(*it);
    }
  } else if (platform == "Etsy") {
    for (std::size_t i = 0; i + 1 < segs.size(); ++i)
      if (segs[i] == "listing") return std::string(segs[i + 1]);
  }
  auto path = strings::to_lower(u.path);
  while (path.size() > 1 && path.back() == '/') path.pop_back();
  return path;
}

std::optional<EcommerceSighting> ecommerce_sighting(const url::NormalizedUrl& u, const PlatformCatalog& catalog) {
  const auto* e = catalog.match(u);
  if (!e || e->category != PlatformCategory::ecommerce) return std::nullopt;
  EcommerceSighting s;
  s.platform = e->platform;
  s.product = product_key(u, e->platform);
  s.affiliate = detect_affiliate(u).has_value();
  return s;
}

// ---------------------------------------------------------------- blockchain

std::vector<Hit> blockchain_hits(const dataset::ChannelRecord& channel, bool scan_messages) {
  std::vector<Hit> out;
  auto scan = [&](std::string_view text, MessageId mid) {
    std::set<std::string> seen;
    for (auto& a : addresses::extract_blockchain_addresses(text)) {
      if (!seen.insert(a.address).second) continue;
      Hit h;
      h.channel_id = channel.channel_id;
      h.message_id = mid;
      h.category = Category::blockchain;
      h.platform = std::string(addresses::to_string(a.chain));
      h.extracted_id = std::move(a.address);
      out.push_back(std::move(h));
    }
  };
  scan(channel.description, -1);
  if (scan_messages)
    for (const auto& m : channel.messages) scan(m.text, m.message_id);
  return out;
}

// ---------------------------------------------------------------- review

AllowDeny AllowDeny::parse(std::string_view text, const std::string& source) {
  AllowDeny out;
  std::size_t lineno = 0;
  for (auto line : strings::split(text, '\n')) {
    ++lineno;
    auto t = strings::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto sp = t.find_first_of(" \t");
    auto verb = t.substr(0, std::min(sp, t.size()));
    auto where = source + ":" + std::to_string(lineno);
    if (sp == std::string_view::npos) throw ParseError(where + ": expected '<allow|deny> <url>'");
    Decision d;
    if (verb == "allow") d = Decision::allow;
    else if (verb == "deny") d = Decision::deny;
    else throw ParseError(where + ": unknown verb '" + std::string(verb) + "'");
    auto u = url::normalize(strings::trim(t.substr(sp)));
    if (!u) throw ParseError(where + ": unparseable URL");
    out.decisions[u->to_string()] = d;
  }
  return out;
}

AllowDeny AllowDeny::load(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("allow/deny list not found: " + path.string());
  return parse(read_file(path), path.string());
}

FilterResult cross_community_filter(const std::vector<Hit>& conspiracy_hits,
                                    const std::map<std::string, std::size_t>& other_urls, const AllowDeny& lists) {
  FilterResult out;
  std::map<std::string, ReviewEntry> queue;
  std::map<std::string, std::set<ChannelId>> posters;
  auto reviewable = [](const Hit& h) {
    return (h.category == Category::donation || h.category == Category::crowdfunding) && !h.url.empty();
  };
  for (const auto& h : conspiracy_hits) {
    if (!reviewable(h) || !other_urls.contains(h.url)) continue;
    posters[h.url].insert(h.channel_id);
    auto& e = queue[h.url];
    if (e.url.empty()) {
      e.url = h.url;
      e.category = h.category;
      e.platform = h.platform;
      e.extracted_id = h.extracted_id;
      e.other_channels = other_urls.at(h.url);
      if (auto it = lists.decisions.find(h.url); it != lists.decisions.end()) e.decision = it->second;
    }
  }
  for (auto& [u, e] : queue) e.conspiracy_channels = posters[u].size();
  for (const auto& [u, d] : lists.decisions)
    if (!queue.contains(u)) log_warn("allow/deny entry does not match any shared URL: " + u);

  for (const auto& h : conspiracy_hits) {
    auto it = reviewable(h) ? queue.find(h.url) : queue.end();
    if (it == queue.end()) {
      out.retained.push_back(h);
      continue;
    }
    if (it->second.decision == Decision::deny) {
      out.discarded.push_back(h);
      continue;
    }
    if (it->second.decision == Decision::undecided) out.flagged_for_review.insert(h.url);
    out.retained.push_back(h);
  }
  for (auto& [u, e] : queue) out.review_queue.push_back(std::move(e));
  return out;
}

// ---------------------------------------------------------------- files

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t n = 0;
    auto v = std::stoll(s, &n);
    if (n != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": bad integer '" + s + "'");
  }
}

std::string_view decision_name(Decision d) {
  switch (d) {
    case Decision::allow: return "allow";
    case Decision::deny: return "deny";
    case Decision::undecided: break;
  }
  return "undecided";
}

}  // namespace

void write_hits(const fs::path& path, const std::vector<Hit>& hits, const std::set<std::string>& review_flags) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"channel_id", "message_id", "category", "platform", "extracted_id", "url", "review"});
  for (const auto& h : hits)
    w.field(h.channel_id)
        .field(h.message_id)
        .field(to_string(h.category))
        .field(h.platform)
        .field(h.extracted_id)
        .field(h.url)
        .field(review_flags.contains(h.url) ? "1" : "0")
        .end_row();
}

std::vector<Hit> read_hits(const fs::path& path) {
  auto t = csv::read_table(path);
  auto ci = t.column("channel_id"), mi = t.column("message_id"), ki = t.column("category"),
       pi = t.column("platform"), ii = t.column("extracted_id");
  std::optional<std::size_t> ui;
  if (t.has_column("url")) ui = t.column("url");
  std::vector<Hit> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto where = t.source + ":" + std::to_string(t.lines[r]);
    Hit h;
    h.channel_id = parse_int(row.at(ci), where);
    h.message_id = parse_int(row.at(mi), where);
    auto c = parse_category(row.at(ki));
    if (!c) throw ParseError(where + ": unknown category '" + row.at(ki) + "'");
    h.category = *c;
    h.platform = row.at(pi);
    h.extracted_id = row.at(ii);
    if (ui) h.url = row.at(*ui);
    out.push_back(std::move(h));
  }
  return out;
}

void write_review_queue(const fs::path& path, const std::vector<ReviewEntry>& queue) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"url", "category", "platform", "extracted_id", "conspiracy_channels", "other_channels", "decision"});
  for (const auto& e : queue)
    w.field(e.url)
        .field(to_string(e.category))
        .field(e.platform)
        .field(e.extracted_id)
        .field(static_cast<std::int64_t>(e.conspiracy_channels))
        .field(static_cast<std::int64_t>(e.other_channels))
        .field(decision_name(e.decision))
        .end_row();
}

void write_ecommerce(const fs::path& path, const std::vector<EcommerceSighting>& sightings) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"channel_id", "message_id", "platform", "product", "affiliate"});
  for (const auto& s : sightings)
    w.field(s.channel_id).field(s.message_id).field(s.platform).field(s.product).field(s.affiliate ? "1" : "0").end_row();
}

std::vector<EcommerceSighting> read_ecommerce(const fs::path& path) {
  auto t = csv::read_table(path);
  auto ci = t.column("channel_id"), mi = t.column("message_id"), pi = t.column("platform"),
       di = t.column("product"), ai = t.column("affiliate");
  std::vector<EcommerceSighting> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto where = t.source + ":" + std::to_string(t.lines[r]);
    EcommerceSighting s;
    s.channel_id = parse_int(row.at(ci), where);
    s.message_id = parse_int(row.at(mi), where);
    s.platform = row.at(pi);
    s.product = row.at(di);
    s.affiliate = row.at(ai) == "1";
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace conspigraph::monetization
