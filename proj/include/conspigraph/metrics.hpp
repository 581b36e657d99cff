#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conspigraph/common.hpp"
#include "conspigraph/http.hpp"
#include "conspigraph/monetization.hpp"

namespace conspigraph::metrics {

enum class Period { monthly, lifetime, campaign_total };
enum class Model { keep_it_all, all_or_nothing };
enum class Status { ongoing, succeeded, failed, unreachable };

std::string_view to_string(Period p);
std::string_view to_string(Model m);
std::string_view to_string(Status s);

/// Amounts are integer minor units (cents) to keep sums exact.
struct CampaignMetrics {
  std::string platform;
  std::string extracted_id;
  monetization::Category category = monetization::Category::donation;
  std::optional<std::int64_t> funds_cents;  // nullopt: the page does not publish amounts
  std::string currency;
  std::optional<std::int64_t> supporters;
  Period period = Period::campaign_total;
  Model model = Model::keep_it_all;
  Status status = Status::unreachable;
  std::optional<std::int64_t> goal_cents;
  std::string fetched_at;  // ISO-8601, empty when unknown

  /// Funds and supporters that may enter totals: zero for failed
  /// all-or-nothing campaigns and unreachable pages.
  bool countable() const {
    return status != Status::unreachable && !(model == Model::all_or_nothing && status == Status::failed);
  }
  bool operator==(const CampaignMetrics&) const = default;
};

/// "1,234.56" -> 123456. Accepts thousands separators and up to two decimals.
std::optional<std::int64_t> parse_cents(std::string_view text);
std::string format_cents(std::int64_t cents);

/// Parses a saved page. `html` pages go through the platform's text rules,
/// `.json` snapshots are read field by field. Throws ParseError naming
/// `locator` when the page is reachable but the expected figures are absent.
CampaignMetrics parse_page(const monetization::Hit& hit, std::string_view content, bool json,
                           const std::string& locator);

/// Snapshot path below a fixture root: `<slug(platform)>/<extracted_id>.html`.
/// Identifiers containing '/' become nested directories.
fs::path fixture_path(const fs::path& root, std::string_view platform, std::string_view id, bool json = false);

class Source {
 public:
  virtual ~Source() = default;
  virtual CampaignMetrics fetch(const monetization::Hit& hit) = 0;
};

/// Reads snapshots only; never touches the network.
class FixtureSource : public Source {
 public:
  explicit FixtureSource(fs::path root) : root_(std::move(root)) {}
  CampaignMetrics fetch(const monetization::Hit& hit) override;

 private:
  fs::path root_;
};

/// Downloads the hit's URL (per-host throttled), stores the page under the
/// fixture root, then parses the stored copy.
class LiveSource : public Source {
 public:
  LiveSource(fs::path root, http::Client& client, std::chrono::milliseconds host_delay,
             std::chrono::milliseconds timeout = std::chrono::milliseconds(10'000));
  ~LiveSource() override;
  CampaignMetrics fetch(const monetization::Hit& hit) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One metrics record per distinct (platform, id) among donation and
/// crowdfunding hits with a non-empty identifier, sorted by platform then id.
/// DonorBox pages that publish a goal come back as crowdfunding campaigns.
std::vector<CampaignMetrics> fetch_all(const std::vector<monetization::Hit>& hits, Source& source);

// ---------------------------------------------------------------- rates

struct Rate {
  double to_usd = 1;
  std::string asof;
};

class RateTable {
 public:
  static RateTable load(const fs::path& path);
  static RateTable parse(std::istream& in, const std::string& source);
  /// Throws ValidationError naming the currency when absent. USD is implicit.
  double to_usd(std::string_view code) const;
  bool contains(std::string_view code) const;

 private:
  std::map<std::string, Rate, std::less<>> rates_;
};

// ---------------------------------------------------------------- aggregate

struct AggregateRow {
  std::string platform;
  monetization::Category category = monetization::Category::donation;
  std::size_t url_count = 0;
  std::size_t distinct_ids = 0;
  std::size_t reachable = 0;
  std::size_t failed_excluded = 0;  // all-or-nothing campaigns that missed their goal
  bool amounts_published = false;   // false when no record of the platform reports funds
  double total_funds_usd = 0;
  std::int64_t total_supporters = 0;
  Period period = Period::campaign_total;
};

/// Rows for every (category, platform) seen in the donation and crowdfunding
/// hits, sorted by category, URL count descending, then platform. URLs are
/// attributed by the category their metrics record carries, so a DonorBox
/// campaign counts as crowdfunding.
std::vector<AggregateRow> aggregate(const std::vector<CampaignMetrics>& records,
                                    const std::vector<monetization::Hit>& hits, const RateTable& rates);

// ---------------------------------------------------------------- blockchain

/// Externally supplied per-address transaction summary.
struct TxSummary {
  std::string chain;
  std::string address;
  std::int64_t transactions = 0;
  double amount = 0;
  std::string unit;  // BTC, ETH, ...
};

std::vector<TxSummary> load_tx_summaries(const fs::path& path);

/// AggregateRow per chain: URL count = hits, distinct ids = addresses,
/// supporters = transactions, funds converted through `rates` by unit.
std::vector<AggregateRow> aggregate_blockchain(const std::vector<monetization::Hit>& hits,
                                               const std::vector<TxSummary>& summaries, const RateTable& rates);

// metrics.csv: platform, id, funds, currency, supporters, period, model, status, fetched_at, category, goal
void write_metrics(const fs::path& path, const std::vector<CampaignMetrics>& records);
std::vector<CampaignMetrics> read_metrics(const fs::path& path);

}  // namespace conspigraph::metrics
