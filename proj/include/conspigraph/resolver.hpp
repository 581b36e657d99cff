#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "conspigraph/dataset.hpp"
#include "conspigraph/http.hpp"
#include "conspigraph/url.hpp"

namespace conspigraph::resolver {

// `unresolved` marks a shortened URL that was not looked up (offline run or
// extract-only stage). It is never written to the cache.
enum class Status { resolved, not_shortened, failed_timeout, failed_network, failed_loop, failed_status, unresolved };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);

struct Outcome {
  Status status = Status::not_shortened;
  std::optional<url::NormalizedUrl> final_url;
  int redirect_count = 0;
  UtcTime fetched_at{};
};

class ShortenerList {
 public:
  static ShortenerList parse(std::string_view text);
  static ShortenerList load(const fs::path& path);
  /// data/shorteners.txt, loaded once.
  static const ShortenerList& bundled();

  bool contains(std::string_view host) const { return hosts_.contains(std::string(host)); }
  std::size_t size() const { return hosts_.size(); }

 private:
  std::unordered_set<std::string> hosts_;
};

/// True when the host, or its registrable domain, is a known shortener.
bool is_shortened(const url::NormalizedUrl& u, const ShortenerList& shorteners);

struct Policy {
  int max_redirects = 10;
  std::chrono::milliseconds timeout{10'000};
  bool get_fallback = true;  // retry rejected HEADs with a body-less GET
  std::chrono::milliseconds host_delay{1'000};
  std::size_t workers = 4;
  bool network = true;
};

/// Per-host politeness: one request in flight per host, and a request starts
/// no earlier than `delay` after the previous one to that host completed.
class HostThrottle {
 public:
  explicit HostThrottle(std::chrono::milliseconds delay) : delay_(delay) {}

  void run(const std::string& host, const std::function<void()>& request);

 private:
  struct Slot {
    std::mutex busy;
    std::optional<std::chrono::steady_clock::time_point> last_done;
  };
  Slot& slot(const std::string& host);

  std::chrono::milliseconds delay_;
  std::mutex map_mutex_;
  std::map<std::string, std::unique_ptr<Slot>> slots_;
};

/// Follows the redirect chain of one URL. Network errors are reported as
/// statuses, never thrown.
Outcome resolve(const url::NormalizedUrl& u, const Policy& policy, http::Client& client,
                HostThrottle* throttle = nullptr);

/// Append-only JSONL log of outcomes keyed by normalized URL. A corrupt file
/// is discarded with a warning and rewritten from scratch.
class Cache {
 public:
  explicit Cache(fs::path path);

  std::optional<Outcome> find(const std::string& key) const;
  void append(const std::string& key, const Outcome& outcome);
  std::size_t size() const;
  bool rebuilt() const { return rebuilt_; }

 private:
  fs::path path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, Outcome> entries_;
  bool rebuilt_ = false;
};

struct UrlOccurrence {
  url::RawUrl raw;
  url::NormalizedUrl normalized;
  Outcome resolution;

  const url::NormalizedUrl& effective() const {
    return resolution.status == Status::resolved && resolution.final_url ? *resolution.final_url : normalized;
  }
};

/// Extracts and normalizes every URL in the corpus, in channel then message
/// order. URLs whose authority cannot be parsed are dropped and counted.
struct Extraction {
  std::vector<UrlOccurrence> occurrences;
  std::size_t dropped = 0;
};
Extraction extract_occurrences(const dataset::Corpus& corpus, const ShortenerList& shorteners);

struct ResolveStats {
  std::size_t occurrences = 0;
  std::size_t shortened = 0;
  std::size_t unique_shortened = 0;
  std::size_t cache_hits = 0;
  std::size_t network_resolutions = 0;
  std::size_t unresolved = 0;

  double cache_hit_rate() const {
    return unique_shortened == 0 ? 1.0 : static_cast<double>(cache_hits) / static_cast<double>(unique_shortened);
  }
};

/// Resolves every distinct shortened URL at most once, consulting and
/// extending the cache. `client` may be null only when policy.network is off.
ResolveStats resolve_all(std::vector<UrlOccurrence>& occurrences, const fs::path& cache_path, const Policy& policy,
                         const ShortenerList& shorteners, http::Client* client);

// urls.csv: channel_id, message_id, raw, effective, status
struct UrlRow {
  ChannelId channel_id = 0;
  MessageId message_id = 0;
  std::string raw;
  url::NormalizedUrl effective;
  Status status = Status::not_shortened;
};

void write_url_rows(const fs::path& path, const std::vector<UrlOccurrence>& occurrences);
std::vector<UrlRow> read_url_rows(const fs::path& path);

}  // namespace conspigraph::resolver
