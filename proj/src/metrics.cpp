#include "conspigraph/metrics.hpp"

#include <cstring>
#include <fstream>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "conspigraph/csv.hpp"
#include "conspigraph/resolver.hpp"
#include "conspigraph/timeutil.hpp"

namespace conspigraph::metrics {

using monetization::Category;
using monetization::Hit;

std::string_view to_string(Period p) {
  switch (p) {
    case Period::monthly: return "monthly";
    case Period::lifetime: return "lifetime";
    case Period::campaign_total: return "campaign_total";
  }
  return "unknown";
}

std::string_view to_string(Model m) { return m == Model::all_or_nothing ? "all_or_nothing" : "keep_it_all"; }

std::string_view to_string(Status s) {
  switch (s) {
    case Status::ongoing: return "ongoing";
    case Status::succeeded: return "succeeded";
    case Status::failed: return "failed";
    case Status::unreachable: return "unreachable";
  }
  return "unknown";
}

namespace {

template <typename E>
std::optional<E> parse_enum(std::string_view s, std::initializer_list<E> all) {
  for (auto e : all)
    if (to_string(e) == s) return e;
  return std::nullopt;
}

enum class Parser { none, reachability, monthly, lifetime, campaign };

// Pages with no public amounts are checked for reachability only.
Parser parser_for(std::string_view platform, Category category) {
  if (platform == "Patreon" || platform == "SubscribeStar") return Parser::monthly;
  if (platform == "BuyMeACoffee" || platform == "Ko-fi") return Parser::lifetime;
  if (platform == "PayPal/donate") return Parser::reachability;
  if (platform == "DonorBox") return category == Category::crowdfunding ? Parser::campaign : Parser::reachability;
  for (auto p : {"GoFundMe", "GiveSendGo", "Kickstarter", "Indiegogo", "Fundrazr", "Fundly", "PayPal/pools"})
    if (platform == p) return Parser::campaign;
  return Parser::none;
}

Period period_of(Parser p) {
  switch (p) {
    case Parser::monthly: return Period::monthly;
    case Parser::lifetime: return Period::lifetime;
    default: return Period::campaign_total;
  }
}

const std::string kMoney = R"((\$|€|£|[A-Z]{3} ?)\s?(\d[\d,]*(?:\.\d{1,2})?))";

std::string currency_of(std::string symbol) {
  while (!symbol.empty() && symbol.back() == ' ') symbol.pop_back();
  if (symbol == "$") return "USD";
  if (symbol == "€") return "EUR";
  if (symbol == "£") return "GBP";
  return symbol;
}

struct Money {
  std::int64_t cents;
  std::string currency;
};

std::optional<Money> find_money(const std::string& text, const std::string& before, const std::string& after) {
  std::regex re(before + kMoney + after);
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  auto cents = parse_cents(m[2].str());
  if (!cents) return std::nullopt;
  return Money{*cents, currency_of(m[1].str())};
}

std::optional<std::int64_t> find_count(const std::string& text, const std::string& nouns) {
  std::regex re(R"((\d[\d,]*)\s+(?:)" + nouns + R"()\b)");
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  std::string digits;
  for (char c : m[1].str())
    if (c != ',') digits += c;
  return std::stoll(digits);
}

bool contains(const std::string& text, const char* pattern) {
  return std::regex_search(text, std::regex(pattern, std::regex::icase));
}

const char* kRemoved =
    R"(page not found|page (?:has been|was) removed|campaign (?:has been|was) (?:removed|deleted|disabled)|(?:profile|page|user) (?:does not|doesn't) exist|no longer available)";
const char* kEnded =
    R"(campaign (?:has )?ended|campaign is closed|funding unsuccessful|funding canceled|successfully funded|no longer accepting donations)";

std::string page_text(std::string_view html) {
  std::string s = std::regex_replace(std::string(html), std::regex(R"(<script[\s\S]*?</script>|<style[\s\S]*?</style>)"), " ");
  s = std::regex_replace(s, std::regex("<[^>]*>"), " ");
  for (auto [from, to] : {std::pair{"&nbsp;", " "}, {"&#36;", "$"}, {"&euro;", "€"}, {"&pound;", "£"}, {"&amp;", "&"}}) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) s.replace(pos, std::strlen(from), to);
  }
  return std::regex_replace(s, std::regex(R"(\s+)"), " ");
}

std::string meta_fetched_at(std::string_view html) {
  std::smatch m;
  std::string h(html);
  if (std::regex_search(h, m, std::regex(R"re(<meta\s+name="fetched_at"\s+content="([^"]*)")re"))) return m[1].str();
  return {};
}

CampaignMetrics base_record(const Hit& hit, Parser p) {
  CampaignMetrics r;
  r.platform = hit.platform;
  r.extracted_id = hit.extracted_id;
  r.category = hit.category;
  r.period = period_of(p);
  r.model = hit.platform == "Kickstarter" ? Model::all_or_nothing : Model::keep_it_all;
  return r;
}

void settle_campaign(CampaignMetrics& r, bool ended, std::optional<bool> explicit_success) {
  if (!ended) {
    r.status = Status::ongoing;
    return;
  }
  bool ok = explicit_success ? *explicit_success
                             : (!r.goal_cents || (r.funds_cents && *r.funds_cents >= *r.goal_cents));
  r.status = ok ? Status::succeeded : Status::failed;
}

CampaignMetrics parse_html(const Hit& hit, std::string_view html, const std::string& locator) {
  auto p = parser_for(hit.platform, hit.category);
  auto text = page_text(html);
  auto r = base_record(hit, p);
  r.fetched_at = meta_fetched_at(html);
  if (contains(text, kRemoved)) return r;  // unreachable
  r.status = Status::ongoing;

  auto fail = [&](const std::string& what) { throw ParseError(locator + ": " + hit.platform + " page without " + what); };
  auto set_money = [&](std::optional<Money> m) {
    if (!m) fail("funds");
    r.funds_cents = m->cents;
    r.currency = m->currency;
  };

  if (hit.platform == "DonorBox" && hit.category == Category::donation) {
    auto raised = find_money(text, "", R"(\s+raised)");
    auto goal = find_money(text, R"((?:of|goal:?)\s+)", "");
    if (!raised || !goal) return r;
    r.category = Category::crowdfunding;
    p = Parser::campaign;
    r.period = Period::campaign_total;
  }

  switch (p) {
    case Parser::none:
    case Parser::reachability:
      return r;
    case Parser::monthly:
      set_money(find_money(text, "", R"(\s*(?:/\s*month|per month))"));
      r.supporters = find_count(text, hit.platform == "Patreon" ? "patrons|paid members|members" : "subscribers");
      if (!r.supporters) fail("supporter count");
      return r;
    case Parser::lifetime:
      set_money(find_money(text, "", R"(\s+(?:raised|earned|received))"));
      r.supporters = find_count(text, "supporters|supporter");
      if (!r.supporters) fail("supporter count");
      return r;
    case Parser::campaign:
      break;
  }
  set_money(find_money(text, "", R"(\s+(?:raised|pledged))"));
  if (auto g = find_money(text, R"((?:of|goal:?)\s+)", ""); g) r.goal_cents = g->cents;
  else if (auto g2 = find_money(text, "", R"(\s+goal)"); g2) r.goal_cents = g2->cents;
  r.supporters =
      find_count(text, "donations|donors|backers|givers|contributors|supporters|contributions|donation|backer");
  if (!r.supporters) fail("supporter count");
  if (hit.platform == "Indiegogo" && contains(text, R"(fixed goal)")) r.model = Model::all_or_nothing;
  std::optional<bool> explicit_success;
  if (contains(text, R"(funding unsuccessful|funding canceled)")) explicit_success = false;
  if (contains(text, R"(successfully funded)")) explicit_success = true;
  settle_campaign(r, contains(text, kEnded), explicit_success);
  return r;
}

std::optional<std::int64_t> json_cents(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  const auto& v = j[key];
  if (v.is_string()) return parse_cents(v.get<std::string>());
  if (v.is_number_integer()) return v.get<std::int64_t>() * 100;
  if (v.is_number()) return parse_cents(v.dump());
  return std::nullopt;
}

CampaignMetrics parse_json(const Hit& hit, std::string_view content, const std::string& locator) {
  auto j = nlohmann::json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError(locator + ": not a JSON object");
  auto p = parser_for(hit.platform, hit.category);
  auto r = base_record(hit, p);
  r.fetched_at = j.value("fetched_at", "");
  auto state = j.value("status", "ongoing");
  if (state == "removed" || state == "unreachable") return r;
  r.status = Status::ongoing;
  try {
    r.funds_cents = json_cents(j, "funds");
    r.goal_cents = json_cents(j, "goal");
    r.currency = j.value("currency", r.funds_cents ? "USD" : "");
    if (j.contains("supporters") && !j["supporters"].is_null()) r.supporters = j["supporters"].get<std::int64_t>();
    if (j.contains("model")) {
      auto m = parse_enum(j["model"].get<std::string>(), {Model::keep_it_all, Model::all_or_nothing});
      if (!m) throw ParseError(locator + ": unknown model");
      if (hit.platform != "Kickstarter") r.model = *m;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(locator + ": " + e.what());
  }
  if (hit.platform == "DonorBox" && hit.category == Category::donation) {
    if (!r.funds_cents || !r.goal_cents) {
      r.funds_cents.reset();
      r.supporters.reset();
      r.currency.clear();
      return r;
    }
    r.category = Category::crowdfunding;
    p = Parser::campaign;
    r.period = Period::campaign_total;
  }
  if (p == Parser::reachability || p == Parser::none) {
    r.funds_cents.reset();
    r.supporters.reset();
    r.currency.clear();
    return r;
  }
  if (!r.funds_cents) throw ParseError(locator + ": " + hit.platform + " snapshot without funds");
  if (!r.supporters) throw ParseError(locator + ": " + hit.platform + " snapshot without supporters");
  if (p == Parser::campaign) {
    std::optional<bool> verdict;
    if (state == "succeeded") verdict = true;
    if (state == "failed") verdict = false;
    settle_campaign(r, state == "ended" || verdict.has_value(), verdict);
  }
  return r;
}

bool eligible(const Hit& h) {
  return (h.category == Category::donation || h.category == Category::crowdfunding) && !h.extracted_id.empty();
}

std::string key_of(std::string_view platform, std::string_view id) {
  return std::string(platform) + '\x1f' + std::string(id);
}

}  // namespace

std::optional<std::int64_t> parse_cents(std::string_view text) {
  std::int64_t whole = 0, frac = 0;
  int frac_digits = -1;
  bool any = false;
  for (char c : text) {
    if (c == ',' && frac_digits < 0) continue;
    if (c == '.' && frac_digits < 0) {
      frac_digits = 0;
      continue;
    }
    if (c < '0' || c > '9') return std::nullopt;
    any = true;
    if (frac_digits < 0) {
      if (whole > (INT64_MAX / 1000)) return std::nullopt;
      whole = whole * 10 + (c - '0');
    } else {
      if (++frac_digits > 2) return std::nullopt;
      frac = frac * 10 + (c - '0');
    }
  }
  if (!any) return std::nullopt;
  if (frac_digits == 1) frac *= 10;
  return whole * 100 + frac;
}

std::string format_cents(std::int64_t cents) {
  std::string sign = cents < 0 ? "-" : "";
  if (cents < 0) cents = -cents;
  auto frac = std::to_string(cents % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return sign + std::to_string(cents / 100) + "." + frac;
}

CampaignMetrics parse_page(const Hit& hit, std::string_view content, bool json, const std::string& locator) {
  return json ? parse_json(hit, content, locator) : parse_html(hit, content, locator);
}

fs::path fixture_path(const fs::path& root, std::string_view platform, std::string_view id, bool json) {
  fs::path p = root / strings::slug(platform);
  for (auto part : strings::split(id, '/')) {
    if (part.empty() || part == "." || part == "..") throw ValidationError("unsafe identifier for fixture path: " + std::string(id));
    p /= std::string(part);
  }
  p += json ? ".json" : ".html";
  return p;
}

CampaignMetrics FixtureSource::fetch(const Hit& hit) {
  for (bool json : {true, false}) {
    auto p = fixture_path(root_, hit.platform, hit.extracted_id, json);
    if (fs::exists(p)) return parse_page(hit, read_file(p), json, p.string());
  }
  return base_record(hit, parser_for(hit.platform, hit.category));
}

struct LiveSource::Impl {
  fs::path root;
  http::Client& client;
  resolver::HostThrottle throttle;
  std::chrono::milliseconds timeout;
};

LiveSource::LiveSource(fs::path root, http::Client& client, std::chrono::milliseconds host_delay,
                       std::chrono::milliseconds timeout)
    : impl_(new Impl{std::move(root), client, resolver::HostThrottle(host_delay), timeout}) {}

LiveSource::~LiveSource() = default;

CampaignMetrics LiveSource::fetch(const Hit& hit) {
  auto target = url::normalize(hit.url);
  http::Response resp;
  for (int hop = 0; target && hop <= 5; ++hop) {
    impl_->throttle.run(target->host, [&] { resp = impl_->client.get(*target, impl_->timeout); });
    if (resp.failure != http::Failure::none || resp.status < 300 || resp.status >= 400 || !resp.location) break;
    target = url::resolve_reference(*target, *resp.location);
  }
  if (resp.failure == http::Failure::none && resp.status >= 200 && resp.status < 300) {
    auto now = timeutil::format_iso8601(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
    auto path = fixture_path(impl_->root, hit.platform, hit.extracted_id);
    fs::create_directories(path.parent_path());
    write_file(path, "<meta name=\"fetched_at\" content=\"" + now + "\">\n" + resp.body);
    return parse_page(hit, read_file(path), false, path.string());
  }
  return base_record(hit, parser_for(hit.platform, hit.category));
}

std::vector<CampaignMetrics> fetch_all(const std::vector<Hit>& hits, Source& source) {
  std::map<std::string, const Hit*> firsts;
  for (const auto& h : hits)
    if (eligible(h)) firsts.emplace(key_of(h.platform, h.extracted_id), &h);
  std::vector<CampaignMetrics> out;
  for (const auto& [k, h] : firsts) {
    if (parser_for(h->platform, h->category) == Parser::none) continue;
    out.push_back(source.fetch(*h));
  }
  return out;
}

// ---------------------------------------------------------------- rates

RateTable RateTable::parse(std::istream& in, const std::string& source) {
  auto t = csv::read_table(in, source);
  auto ci = t.column("code"), ri = t.column("rate_to_usd");
  auto ai = t.column("asof");
  RateTable out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto where = source + ":" + std::to_string(t.lines[i]);
    const auto& row = t.rows[i];
    Rate r;
    try {
      std::size_t n = 0;
      r.to_usd = std::stod(row.at(ri), &n);
      if (n != row.at(ri).size() || !(r.to_usd > 0)) throw std::invalid_argument("rate");
    } catch (const std::exception&) {
      throw ParseError(where + ": bad rate '" + row.at(ri) + "'");
    }
    r.asof = row.at(ai);
    auto code = std::string(strings::trim(row.at(ci)));
    for (auto& c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    out.rates_[code] = r;
  }
  return out;
}

RateTable RateTable::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open rates file " + path.string());
  return parse(in, path.string());
}

bool RateTable::contains(std::string_view code) const { return code == "USD" || rates_.contains(code); }

double RateTable::to_usd(std::string_view code) const {
  if (auto it = rates_.find(code); it != rates_.end()) return it->second.to_usd;
  if (code == "USD") return 1.0;
  throw ValidationError("no exchange rate for currency '" + std::string(code) + "'");
}

// ---------------------------------------------------------------- aggregate

std::vector<AggregateRow> aggregate(const std::vector<CampaignMetrics>& records, const std::vector<Hit>& hits,
                                    const RateTable& rates) {
  std::map<std::string, const CampaignMetrics*> by_key;
  for (const auto& r : records) {
    if (r.funds_cents && !r.currency.empty()) rates.to_usd(r.currency);  // fail early on a missing rate
    by_key[key_of(r.platform, r.extracted_id)] = &r;
  }

  struct Acc {
    AggregateRow row;
    std::set<std::string> ids;
    std::map<std::string, std::int64_t> cents_by_currency;
  };
  std::map<std::pair<Category, std::string>, Acc> groups;
  for (const auto& h : hits) {
    if (h.category != Category::donation && h.category != Category::crowdfunding) continue;
    auto cat = h.category;
    const CampaignMetrics* rec = nullptr;
    if (!h.extracted_id.empty())
      if (auto it = by_key.find(key_of(h.platform, h.extracted_id)); it != by_key.end()) rec = it->second;
    if (rec) cat = rec->category;
    auto& acc = groups[{cat, h.platform}];
    acc.row.platform = h.platform;
    acc.row.category = cat;
    acc.row.period = period_of(parser_for(h.platform, cat));
    ++acc.row.url_count;
    if (!h.extracted_id.empty()) acc.ids.insert(h.extracted_id);
  }
  for (auto& [k, acc] : groups) {
    acc.row.distinct_ids = acc.ids.size();
    for (const auto& id : acc.ids) {
      auto it = by_key.find(key_of(acc.row.platform, id));
      if (it == by_key.end() || it->second->category != acc.row.category) continue;
      const auto& r = *it->second;
      if (r.status != Status::unreachable) ++acc.row.reachable;
      if (r.model == Model::all_or_nothing && r.status == Status::failed) ++acc.row.failed_excluded;
      if (r.funds_cents) acc.row.amounts_published = true;
      if (!r.countable()) continue;
      if (r.funds_cents) acc.cents_by_currency[r.currency] += *r.funds_cents;
      acc.row.total_supporters += r.supporters.value_or(0);
    }
    for (const auto& [cur, cents] : acc.cents_by_currency)
      acc.row.total_funds_usd += static_cast<double>(cents) / 100.0 * rates.to_usd(cur);
  }
  std::vector<AggregateRow> out;
  for (auto& [k, acc] : groups) out.push_back(acc.row);
  std::stable_sort(out.begin(), out.end(), [](const AggregateRow& a, const AggregateRow& b) {
    if (a.category != b.category) return a.category < b.category;
    if (a.url_count != b.url_count) return a.url_count > b.url_count;
    return a.platform < b.platform;
  });
  return out;
}

// ---------------------------------------------------------------- blockchain

std::vector<TxSummary> load_tx_summaries(const fs::path& path) {
  auto t = csv::read_table(path);
  auto ci = t.column("chain"), ai = t.column("address"), ti = t.column("transactions"), mi = t.column("amount"),
       ui = t.column("unit");
  std::vector<TxSummary> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    TxSummary s;
    s.chain = strings::to_lower(row.at(ci));
    s.address = row.at(ai);
    s.unit = row.at(ui);
    try {
      s.transactions = std::stoll(row.at(ti));
      s.amount = std::stod(row.at(mi));
    } catch (const std::exception&) {
      throw ParseError(t.source + ":" + std::to_string(t.lines[i]) + ": bad number");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AggregateRow> aggregate_blockchain(const std::vector<Hit>& hits, const std::vector<TxSummary>& summaries,
                                               const RateTable& rates) {
  std::map<std::string, std::pair<AggregateRow, std::set<std::string>>> chains;
  for (const auto& h : hits) {
    if (h.category != Category::blockchain) continue;
    auto& [row, ids] = chains[h.platform];
    row.platform = h.platform;
    row.category = Category::blockchain;
    row.period = Period::lifetime;
    ++row.url_count;
    ids.insert(h.extracted_id);
  }
  for (const auto& s : summaries) {
    auto it = chains.find(s.chain);
    if (it == chains.end() || !it->second.second.contains(s.address)) {
      log_warn("transaction summary for an address not seen in any channel: " + s.address);
      continue;
    }
    auto& row = it->second.first;
    ++row.reachable;
    row.amounts_published = true;
    row.total_supporters += s.transactions;
    row.total_funds_usd += s.amount * rates.to_usd(s.unit);
  }
  std::vector<AggregateRow> out;
  for (auto& [chain, p] : chains) {
    p.first.distinct_ids = p.second.size();
    out.push_back(p.first);
  }
  return out;
}

// ---------------------------------------------------------------- files

void write_metrics(const fs::path& path, const std::vector<CampaignMetrics>& records) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  csv::Writer w(out);
  w.row({"platform", "id", "funds", "currency", "supporters", "period", "model", "status", "fetched_at", "category",
         "goal"});
  for (const auto& r : records) {
    w.field(r.platform).field(r.extracted_id);
    w.field(r.funds_cents ? format_cents(*r.funds_cents) : "").field(r.currency);
    w.field(r.supporters ? std::to_string(*r.supporters) : "");
    w.field(to_string(r.period)).field(to_string(r.model)).field(to_string(r.status)).field(r.fetched_at);
    w.field(monetization::to_string(r.category)).field(r.goal_cents ? format_cents(*r.goal_cents) : "");
    w.end_row();
  }
}

std::vector<CampaignMetrics> read_metrics(const fs::path& path) {
  auto t = csv::read_table(path);
  std::vector<std::size_t> c;
  for (auto name : {"platform", "id", "funds", "currency", "supporters", "period", "model", "status", "fetched_at",
                    "category", "goal"})
    c.push_back(t.column(name));
  std::vector<CampaignMetrics> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    auto where = t.source + ":" + std::to_string(t.lines[i]);
    auto bad = [&](const char* what) { return ParseError(where + ": bad " + std::string(what)); };
    CampaignMetrics r;
    r.platform = row.at(c[0]);
    r.extracted_id = row.at(c[1]);
    if (!row.at(c[2]).empty()) {
      r.funds_cents = parse_cents(row.at(c[2]));
      if (!r.funds_cents) throw bad("funds");
    }
    r.currency = row.at(c[3]);
    if (!row.at(c[4]).empty()) {
      try {
        r.supporters = std::stoll(row.at(c[4]));
      } catch (const std::exception&) {
        throw bad("supporters");
      }
    }
    auto period = parse_enum(row.at(c[5]), {Period::monthly, Period::lifetime, Period::campaign_total});
    auto model = parse_enum(row.at(c[6]), {Model::keep_it_all, Model::all_or_nothing});
    auto status = parse_enum(row.at(c[7]), {Status::ongoing, Status::succeeded, Status::failed, Status::unreachable});
    auto category = monetization::parse_category(row.at(c[9]));
    if (!period || !model || !status || !category) throw bad("enum value");
    r.period = *period;
    r.model = *model;
    r.status = *status;
    r.fetched_at = row.at(c[8]);
    r.category = *category;
    if (!row.at(c[10]).empty()) {
      r.goal_cents = parse_cents(row.at(c[10]));
      if (!r.goal_cents) throw bad("goal");
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace conspigraph::metrics
