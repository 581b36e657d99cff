#include "conspigraph/resolver.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <thread>

#include "conspigraph/csv.hpp"
#include "conspigraph/domain.hpp"
#include "conspigraph/timeutil.hpp"

namespace conspigraph::resolver {

using nlohmann::json;

namespace {

constexpr std::pair<Status, std::string_view> kStatusNames[] = {
    {Status::resolved, "resolved"},
    {Status::not_shortened, "not_shortened"},
    {Status::failed_timeout, "failed_timeout"},
    {Status::failed_network, "failed_network"},
    {Status::failed_loop, "failed_loop"},
    {Status::failed_status, "failed_status"},
    {Status::unresolved, "unresolved"},
};

UtcTime now_utc() { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); }

}  // namespace

std::string_view to_string(Status s) {
  for (auto [status, name] : kStatusNames)
    if (status == s) return name;
  return "unknown";
}

std::optional<Status> parse_status(std::string_view s) {
  for (auto [status, name] : kStatusNames)
    if (name == s) return status;
  return std::nullopt;
}

// ---------------------------------------------------------------- shorteners

ShortenerList ShortenerList::parse(std::string_view text) {
  ShortenerList list;
  for (auto line : strings::split(text, '\n')) {
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = strings::trim(line);
    if (!line.empty()) list.hosts_.insert(strings::to_lower(line));
  }
  return list;
}

ShortenerList ShortenerList::load(const fs::path& path) { return parse(read_file(path)); }

const ShortenerList& ShortenerList::bundled() {
  static const ShortenerList list = load(data_dir() / "shorteners.txt");
  return list;
}

bool is_shortened(const url::NormalizedUrl& u, const ShortenerList& shorteners) {
  if (shorteners.contains(u.host)) return true;
  auto reg = domain::PublicSuffixList::bundled().registrable_domain(u.host);
  return !reg.empty() && shorteners.contains(reg);
}

// ---------------------------------------------------------------- politeness

HostThrottle::Slot& HostThrottle::slot(const std::string& host) {
  std::lock_guard lock(map_mutex_);
  auto& s = slots_[host];
  if (!s) s = std::make_unique<Slot>();
  return *s;
}

void HostThrottle::run(const std::string& host, const std::function<void()>& request) {
  Slot& s = slot(host);
  std::lock_guard busy(s.busy);
  if (s.last_done) std::this_thread::sleep_until(*s.last_done + delay_);
  try {
    request();
  } catch (...) {
    s.last_done = std::chrono::steady_clock::now();
    throw;
  }
  s.last_done = std::chrono::steady_clock::now();
}

// ---------------------------------------------------------------- resolve

Outcome resolve(const url::NormalizedUrl& start, const Policy& policy, http::Client& client, HostThrottle* throttle) {
  Outcome out;
  std::unordered_set<std::string> visited{start.to_string()};
  url::NormalizedUrl current = start;

  auto send = [&](bool use_get) {
    http::Response r;
    auto call = [&] { r = use_get ? client.get_headers(current, policy.timeout) : client.head(current, policy.timeout); };
    if (throttle) {
      throttle->run(current.ascii_host(), call);
    } else {
      call();
    }
    return r;
  };

  while (true) {
    http::Response r = send(false);
    if (r.failure == http::Failure::none && r.status >= 400 && policy.get_fallback) r = send(true);
    out.fetched_at = now_utc();

    if (r.failure == http::Failure::timeout) {
      out.status = Status::failed_timeout;
      return out;
    }
    if (r.failure == http::Failure::network) {
      out.status = Status::failed_network;
      return out;
    }
    if (r.status >= 300 && r.status < 400 && r.location) {
      auto next = url::resolve_reference(current, *r.location);
      if (!next) {
        out.status = Status::failed_status;
        return out;
      }
      if (out.redirect_count >= policy.max_redirects || !visited.insert(next->to_string()).second) {
        out.status = Status::failed_loop;
        return out;
      }
      ++out.redirect_count;
      current = std::move(*next);
      continue;
    }
    if (r.status >= 200 && r.status < 300) {
      out.status = Status::resolved;
      out.final_url = current;
      return out;
    }
    out.status = Status::failed_status;
    return out;
  }
}

// ---------------------------------------------------------------- cache

namespace {

json outcome_to_json(const std::string& key, const Outcome& o) {
  json j;
  j["normalized_url"] = key;
  j["status"] = std::string(to_string(o.status));
  j["final_url"] = o.final_url ? json(o.final_url->to_string()) : json(nullptr);
  j["redirect_count"] = o.redirect_count;
  j["fetched_at"] = timeutil::format_iso8601(o.fetched_at);
  return j;
}

std::pair<std::string, Outcome> outcome_from_json(const json& j) {
  Outcome o;
  auto key = j.at("normalized_url").get<std::string>();
  auto status = parse_status(j.at("status").get<std::string>());
  if (!status || *status == Status::unresolved) throw ParseError("bad status");
  o.status = *status;
  if (const auto& f = j.at("final_url"); !f.is_null()) {
    o.final_url = url::normalize(f.get<std::string>());
    if (!o.final_url) throw ParseError("bad final_url");
  }
  if ((o.status == Status::resolved) != o.final_url.has_value()) throw ParseError("final_url inconsistent with status");
  o.redirect_count = j.at("redirect_count").get<int>();
  auto t = timeutil::parse_iso8601(j.at("fetched_at").get<std::string>());
  if (!t) throw ParseError("bad fetched_at");
  o.fetched_at = *t;
  return {std::move(key), std::move(o)};
}

}  // namespace

Cache::Cache(fs::path path) : path_(std::move(path)) {
  if (!fs::exists(path_)) return;
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (strings::trim(line).empty()) continue;
      auto [key, outcome] = outcome_from_json(json::parse(line));
      entries_[key] = std::move(outcome);
    }
  } catch (const std::exception& e) {
    log_warn("resolution cache " + path_.string() + ":" + std::to_string(lineno) + " is corrupt (" + e.what() +
             "); rebuilding from empty");
    entries_.clear();
    rebuilt_ = true;
    std::ofstream truncate(path_, std::ios::trunc);
  }
}

std::optional<Outcome> Cache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void Cache::append(const std::string& key, const Outcome& outcome) {
  std::lock_guard lock(mutex_);
  if (!path_.parent_path().empty()) fs::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << outcome_to_json(key, outcome).dump() << '\n';
  if (!out) throw Error("cannot append to resolution cache " + path_.string());
  entries_[key] = outcome;
}

std::size_t Cache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------- corpus level

Extraction extract_occurrences(const dataset::Corpus& corpus, const ShortenerList& shorteners) {
  const auto& channels = corpus.channels();
  unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::size_t chunk = (channels.size() + workers - 1) / std::max<std::size_t>(workers, 1);

  auto work = [&](std::size_t begin, std::size_t end) {
    Extraction part;
    for (std::size_t c = begin; c < end; ++c) {
      const auto& ch = channels[c];
      for (const auto& msg : ch.messages) {
        for (auto& raw : url::extract_urls(msg.text, ch.channel_id, msg.message_id)) {
          auto normalized = url::normalize(raw);
          if (!normalized) {
            ++part.dropped;
            log_warn("dropping URL with unparseable authority: " + raw.text);
            continue;
          }
          UrlOccurrence occ{std::move(raw), std::move(*normalized), {}};
          occ.resolution.status = is_shortened(occ.normalized, shorteners) ? Status::unresolved : Status::not_shortened;
          part.occurrences.push_back(std::move(occ));
        }
      }
    }
    return part;
  };

  std::vector<std::future<Extraction>> parts;
  for (std::size_t b = 0; b < channels.size(); b += chunk)
    parts.push_back(std::async(std::launch::async, work, b, std::min(channels.size(), b + chunk)));
  Extraction all;
  for (auto& f : parts) {
    auto p = f.get();
    all.dropped += p.dropped;
    if (all.occurrences.empty()) {
      all.occurrences = std::move(p.occurrences);
    } else {
      std::move(p.occurrences.begin(), p.occurrences.end(), std::back_inserter(all.occurrences));
    }
  }
  return all;
}

ResolveStats resolve_all(std::vector<UrlOccurrence>& occurrences, const fs::path& cache_path, const Policy& policy,
                         const ShortenerList& shorteners, http::Client* client) {
  if (policy.network && !client) throw ValidationError("network resolution requested without an HTTP client");
  ResolveStats stats;
  stats.occurrences = occurrences.size();

  // Distinct shortened URLs in first-seen order.
  std::unordered_map<std::string, std::size_t> slot_of;
  std::vector<std::string> keys;
  std::vector<const url::NormalizedUrl*> urls;
  std::vector<std::size_t> occ_slot(occurrences.size(), SIZE_MAX);
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    auto& occ = occurrences[i];
    if (!is_shortened(occ.normalized, shorteners)) {
      occ.resolution = Outcome{};
      continue;
    }
    ++stats.shortened;
    auto key = occ.normalized.to_string();
    auto [it, inserted] = slot_of.emplace(key, keys.size());
    if (inserted) {
      keys.push_back(std::move(key));
      urls.push_back(&occ.normalized);
    }
    occ_slot[i] = it->second;
  }
  stats.unique_shortened = keys.size();

  Cache cache(cache_path);
  std::vector<Outcome> results(keys.size());
  std::vector<std::size_t> pending;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (auto hit = cache.find(keys[k])) {
      results[k] = *hit;
      ++stats.cache_hits;
    } else if (policy.network) {
      pending.push_back(k);
    } else {
      results[k].status = Status::unresolved;
      ++stats.unresolved;
    }
  }

  if (!pending.empty()) {
    HostThrottle throttle(policy.host_delay);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        std::size_t p = next.fetch_add(1);
        if (p >= pending.size()) return;
        std::size_t k = pending[p];
        results[k] = resolve(*urls[k], policy, *client, &throttle);
        cache.append(keys[k], results[k]);
      }
    };
    std::size_t n = std::clamp<std::size_t>(policy.workers, 1, pending.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    stats.network_resolutions = pending.size();
  }

  for (std::size_t i = 0; i < occurrences.size(); ++i)
    if (occ_slot[i] != SIZE_MAX) occurrences[i].resolution = results[occ_slot[i]];
  return stats;
}

// ---------------------------------------------------------------- urls.csv

void write_url_rows(const fs::path& path, const std::vector<UrlOccurrence>& occurrences) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  csv::Writer w(out);
  w.row({"channel_id", "message_id", "raw", "effective", "status"});
  for (const auto& occ : occurrences) {
    w.field(occ.raw.channel_id)
        .field(occ.raw.message_id)
        .field(occ.raw.text)
        .field(occ.effective().to_string())
        .field(to_string(occ.resolution.status))
        .end_row();
  }
}

std::vector<UrlRow> read_url_rows(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  csv::Reader reader(in, path.string());
  std::vector<std::string> row;
  if (!reader.next(row) || row.size() != 5 || row[0] != "channel_id")
    throw ParseError(path.string() + ": missing urls.csv header");
  std::vector<UrlRow> rows;
  while (reader.next(row)) {
    if (row.size() != 5) throw ParseError(reader.locator() + ": expected 5 fields");
    UrlRow r;
    try {
      r.channel_id = std::stoll(row[0]);
      r.message_id = std::stoll(row[1]);
    } catch (const std::exception&) {
      throw ParseError(reader.locator() + ": bad id");
    }
    r.raw = std::move(row[2]);
    auto eff = url::normalize(row[3]);
    auto status = parse_status(row[4]);
    if (!eff || !status) throw ParseError(reader.locator() + ": bad effective url or status");
    r.effective = std::move(*eff);
    r.status = *status;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace conspigraph::resolver
