#include "conspigraph/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "conspigraph/communities.hpp"
#include "conspigraph/crypto.hpp"
#include "conspigraph/csv.hpp"
#include "conspigraph/dataset.hpp"
#include "conspigraph/graph.hpp"
#include "conspigraph/hits.hpp"
#include "conspigraph/language.hpp"
#include "conspigraph/leiden.hpp"
#include "conspigraph/matcher.hpp"
#include "conspigraph/metrics.hpp"
#include "conspigraph/monetization.hpp"
#include "conspigraph/reports.hpp"
#include "conspigraph/resolver.hpp"
#include "conspigraph/timeutil.hpp"

namespace conspigraph::pipeline {

using json = nlohmann::json;

std::string_view to_string(StageId s) {
  switch (s) {
    case StageId::ingest: return "ingest";
    case StageId::urls: return "urls";
    case StageId::match: return "match";
    case StageId::graph: return "graph";
    case StageId::flag: return "flag";
    case StageId::hits: return "hits";
    case StageId::language: return "language";
    case StageId::monetize: return "monetize";
    case StageId::metrics: return "metrics";
    case StageId::reports: return "reports";
  }
  return "unknown";
}

std::optional<StageId> parse_stage(std::string_view s) {
  for (auto id : kStages)
    if (to_string(id) == s) return id;
  return std::nullopt;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::completed: return "completed";
    case Outcome::cached: return "cached";
    case Outcome::failed: return "failed";
    case Outcome::skipped: return "skipped";
  }
  return "unknown";
}

bool RunReport::ok() const {
  return std::none_of(stages.begin(), stages.end(), [](const auto& s) { return s.outcome == Outcome::failed; });
}

std::vector<std::string> Layout::outputs(StageId s) {
  switch (s) {
    case StageId::ingest: return {"stages/channels.csv", "stages/ingest_summary.json"};
    case StageId::urls: return {"stages/urls.csv", "stages/url_stats.json"};
    case StageId::match: return {"stages/matches.csv", "stages/totals.csv", "stages/flagged.csv"};
    case StageId::graph:
      return {"stages/graph.bin", "stages/edges.csv", "stages/communities.csv", "stages/partition.json"};
    case StageId::flag: return {"stages/flag_report.csv"};
    case StageId::hits: return {"stages/hits.csv"};
    case StageId::language: return {"stages/languages.csv", "stages/language_distribution.csv"};
    case StageId::monetize: return {"stages/monetization.csv", "stages/review_queue.csv", "stages/ecommerce.csv"};
    case StageId::metrics: return {"stages/metrics.csv", "stages/aggregate.csv"};
    case StageId::reports:
      return {"reports/table1_totals.csv",  "reports/table3_ecommerce.csv", "reports/table4_donation.csv",
              "reports/table5_crowdfunding.csv", "reports/scatter.csv",      "reports/longitudinal.csv",
              "reports/top_authorities.csv", "reports/blockchain.csv"};
  }
  return {};
}

namespace {

using Clock = std::chrono::steady_clock;

std::string now_iso() {
  return timeutil::format_iso8601(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
}

// Files under a directory, digested in path order.
std::string digest_path(const fs::path& p) {
  if (p.empty()) return "none";
  if (!fs::exists(p)) return "absent";
  if (!fs::is_directory(p)) return crypto::to_hex(crypto::sha256_file(p));
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  crypto::Sha256 h;
  for (const auto& f : files) {
    h.update(fs::relative(f, p).generic_string());
    h.update(crypto::to_hex(crypto::sha256_file(f)));
  }
  auto d = h.finish();
  return crypto::to_hex(d);
}

struct Stage {
  StageId id;
  int version;
  // logical input name -> path (files produced upstream or supplied by the user)
  std::function<std::vector<std::pair<std::string, fs::path>>()> inputs;
  std::function<std::string()> params;
  std::function<void()> run;
};

class Runner {
 public:
  Runner(const config::PipelineConfig& c, const RunOptions& o) : c_(c), o_(o), layout_{c.out} {}

  RunReport run();

 private:
  fs::path out(const char* rel) const { return layout_.root / rel; }
  const dataset::Corpus& corpus();
  http::Client* client();
  std::string digest(const fs::path& p);
  std::vector<Stage> stages();
  void require(StageId producer, const fs::path& p) const;

  const config::PipelineConfig& c_;
  const RunOptions& o_;
  Layout layout_;
  std::optional<dataset::Corpus> corpus_;
  std::unique_ptr<http::Client> own_client_;
  std::map<fs::path, std::string> digests_;
};

const dataset::Corpus& Runner::corpus() {
  if (!corpus_) {
    dataset::LoadOptions lo;
    lo.strict = c_.strict;
    corpus_ = dataset::load_corpus(c_.corpus, lo);
  }
  return *corpus_;
}

http::Client* Runner::client() {
  if (c_.no_network) return nullptr;
  if (o_.client) return o_.client;
  if (!own_client_) own_client_ = http::make_default_client();
  return own_client_.get();
}

std::string Runner::digest(const fs::path& p) {
  // Upstream outputs change within a run, so only user inputs are memoized.
  bool ours = !p.empty() && p.lexically_normal().string().starts_with(layout_.root.lexically_normal().string());
  if (ours) return digest_path(p);
  auto it = digests_.find(p);
  if (it == digests_.end()) it = digests_.emplace(p, digest_path(p)).first;
  return it->second;
}

void Runner::require(StageId producer, const fs::path& p) const {
  if (!fs::exists(p))
    throw Error("missing output of stage '" + std::string(to_string(producer)) + "': " + p.string());
}

std::string bundled_or(const fs::path& p, const char* bundled) {
  return p.empty() ? (data_dir() / bundled).string() : p.string();
}

std::vector<Stage> Runner::stages() {
  auto P = [this](const char* rel) { return out(rel); };
  const auto& c = c_;
  std::vector<Stage> s;

  s.push_back({StageId::ingest, 1, [&] { return std::vector<std::pair<std::string, fs::path>>{{"corpus", c.corpus}}; },
               [&] { return std::string("strict=") + (c.strict ? "1" : "0"); },
               [this, P] {
                 const auto& corp = corpus();
                 std::vector<reports::ChannelInfo> info;
                 for (const auto& ch : corp.channels())
                   info.push_back({ch.channel_id, ch.username.value_or(""), ch.title, ch.creation_date, ch.messages.size()});
                 std::sort(info.begin(), info.end(), [](auto& a, auto& b) { return a.channel_id < b.channel_id; });
                 reports::write_channels(P("stages/channels.csv"), info);
                 const auto& sm = corp.summary();
                 json j = {{"channel_records", sm.channel_records},   {"channels_parsed", sm.channels_parsed},
                           {"channels_skipped", sm.channels_skipped}, {"message_records", sm.message_records},
                           {"messages_parsed", sm.messages_parsed},   {"messages_skipped", sm.messages_skipped}};
                 j["skipped"] = json::array();
                 for (const auto& issue : sm.skipped) j["skipped"].push_back({{"locator", issue.locator}, {"reason", issue.reason}});
                 j["warnings"] = json::array();
                 for (const auto& issue : sm.warnings)
                   j["warnings"].push_back({{"locator", issue.locator}, {"reason", issue.reason}});
                 write_file(P("stages/ingest_summary.json"), j.dump(1) + "\n");
               }});

  s.push_back({StageId::urls, 1,
               [&] {
                 return std::vector<std::pair<std::string, fs::path>>{
                     {"corpus", c.corpus}, {"shorteners", bundled_or(c.shorteners, "shorteners.txt")}};
               },
               [&] {
                 return "network=" + std::string(c.no_network ? "0" : "1") + ";delay_ms=" +
                        std::to_string(c.politeness_delay_ms) + ";timeout_ms=" + std::to_string(c.timeout_ms) +
                        ";max_redirects=" + std::to_string(c.max_redirects);
               },
               [this, P] {
                 auto shorteners = c_.shorteners.empty() ? resolver::ShortenerList::bundled()
                                                         : resolver::ShortenerList::load(c_.shorteners);
                 auto ex = resolver::extract_occurrences(corpus(), shorteners);
                 resolver::Policy policy;
                 policy.max_redirects = c_.max_redirects;
                 policy.timeout = std::chrono::milliseconds(c_.timeout_ms);
                 policy.host_delay = std::chrono::milliseconds(c_.politeness_delay_ms);
                 policy.workers = c_.workers;
                 policy.network = !c_.no_network;
                 auto stats = resolver::resolve_all(ex.occurrences, config::cache_path(c_), policy, shorteners, client());
                 resolver::write_url_rows(P("stages/urls.csv"), ex.occurrences);
                 json j = {{"occurrences", stats.occurrences},
                           {"dropped", ex.dropped},
                           {"shortened", stats.shortened},
                           {"unique_shortened", stats.unique_shortened},
                           {"cache_hits", stats.cache_hits},
                           {"network_resolutions", stats.network_resolutions},
                           {"unresolved", stats.unresolved}};
                 write_file(P("stages/url_stats.json"), j.dump(1) + "\n");
               }});

  s.push_back({StageId::match, 1,
               [&, P] {
                 return std::vector<std::pair<std::string, fs::path>>{{"urls", P("stages/urls.csv")},
                                                                      {"catalog", c.catalog}};
               },
               [] { return std::string(); },
               [this, P] {
                 require(StageId::urls, P("stages/urls.csv"));
                 auto load = dataset::load_catalog(c_.catalog);
                 for (const auto& w : load.warnings) log_warn(w);
                 auto rows = resolver::read_url_rows(P("stages/urls.csv"));
                 auto result = matcher::match_corpus(rows, load.catalog);
                 matcher::write_matches(P("stages/matches.csv"), result.matches);
                 matcher::write_totals(P("stages/totals.csv"), result.totals);
                 matcher::write_flagged(P("stages/flagged.csv"), matcher::flag_channels(result.matches));
               }});

  s.push_back({StageId::graph, 1, [&] { return std::vector<std::pair<std::string, fs::path>>{{"corpus", c.corpus}}; },
               [&] {
                 return "resolution=" + csv::format_fixed(c.resolution, 12) + ";seed=" + std::to_string(c.seed) +
                        ";binary_edges=" + (c.binary_edges ? "1" : "0");
               },
               [this, P] {
                 auto g = graph::build_graph(corpus(), c_.binary_edges);
                 leiden::Options lo;
                 lo.resolution = c_.resolution;
                 lo.seed = c_.seed;
                 auto part = leiden::leiden_partition(g, lo);
                 graph::save_binary(P("stages/graph.bin"), g);
                 graph::write_edges_csv(P("stages/edges.csv"), g);
                 communities::write_communities(P("stages/communities.csv"), g, part.assignment);
                 json j = {{"nodes", g.node_count()},
                           {"edges", g.edges().size()},
                           {"dropped_external_forwards", g.dropped_external_forwards},
                           {"self_forwards", g.self_forwards},
                           {"community_count", part.community_count},
                           {"modularity", part.modularity},
                           {"resolution", part.resolution},
                           {"seed", part.seed},
                           {"history", part.history}};
                 write_file(P("stages/partition.json"), j.dump(1) + "\n");
               }});

  s.push_back({StageId::flag, 1,
               [P] {
                 return std::vector<std::pair<std::string, fs::path>>{{"graph", P("stages/graph.bin")},
                                                                      {"communities", P("stages/communities.csv")},
                                                                      {"flagged", P("stages/flagged.csv")}};
               },
               [&] { return "threshold=" + csv::format_fixed(c.flag_threshold, 12) + ";min_size=" + std::to_string(c.min_size); },
               [this, P] {
                 require(StageId::graph, P("stages/graph.bin"));
                 require(StageId::graph, P("stages/communities.csv"));
                 require(StageId::match, P("stages/flagged.csv"));
                 auto g = graph::load_binary(P("stages/graph.bin"));
                 auto assignment = communities::read_assignment(P("stages/communities.csv"), g);
                 auto flagged = matcher::read_flagged(P("stages/flagged.csv"));
                 auto report = communities::flag_communities(g, assignment, flagged, c_.flag_threshold, c_.min_size);
                 communities::write_flag_report(P("stages/flag_report.csv"), report);
               }});

  s.push_back({StageId::hits, 1,
               [P] {
                 return std::vector<std::pair<std::string, fs::path>>{{"graph", P("stages/graph.bin")},
                                                                      {"communities", P("stages/communities.csv")}};
               },
               [&] { return "tolerance=" + csv::format_fixed(c.hits_tolerance, 15); },
               [this, P] {
                 require(StageId::graph, P("stages/graph.bin"));
                 require(StageId::graph, P("stages/communities.csv"));
                 auto g = graph::load_binary(P("stages/graph.bin"));
                 auto assignment = communities::read_assignment(P("stages/communities.csv"), g);
                 auto scores = hits::hits(g, c_.hits_tolerance);
                 if (!scores.converged) log_warn("HITS did not converge");
                 communities::write_hits(P("stages/hits.csv"), g, scores, assignment);
               }});

  s.push_back({StageId::language, 1,
               [&, P] {
                 return std::vector<std::pair<std::string, fs::path>>{
                     {"corpus", c.corpus}, {"communities", P("stages/communities.csv")}, {"profiles", data_dir() / "languages"}};
               },
               [&] {
                 return "sample_size=" + std::to_string(c.sample_size) + ";threshold=" +
                        csv::format_fixed(c.language_threshold, 12) + ";min_chars=" + std::to_string(c.language_min_chars);
               },
               [this, P] {
                 require(StageId::graph, P("stages/communities.csv"));
                 auto det = language::Detector::bundled();
                 det.set_options({c_.language_min_chars, c_.language_threshold});
                 const auto& corp = corpus();
                 auto verdicts = language::corpus_languages(corp, det, c_.sample_size);
                 std::vector<ChannelId> ids;
                 for (const auto& ch : corp.channels()) ids.push_back(ch.channel_id);
                 language::write_languages(P("stages/languages.csv"), ids, verdicts);

                 auto community_of = communities::read_communities(P("stages/communities.csv"));
                 std::vector<std::uint32_t> assignment;
                 std::vector<language::Verdict> kept;
                 for (std::size_t i = 0; i < ids.size(); ++i) {
                   auto it = community_of.find(ids[i]);
                   if (it == community_of.end()) continue;
                   assignment.push_back(it->second);
                   kept.push_back(verdicts[i]);
                 }
                 auto dist = language::community_distribution(assignment, kept);
                 std::ofstream f(P("stages/language_distribution.csv"), std::ios::binary);
                 csv::Writer w(f);
                 w.row({"community_id", "language", "fraction"});
                 for (const auto& [comm, hist] : dist)
                   for (const auto& [lang, frac] : hist)
                     w.field(static_cast<std::int64_t>(comm)).field(lang).field(frac, 6).end_row();
               }});

  s.push_back({StageId::monetize, 1,
               [&, P] {
                 return std::vector<std::pair<std::string, fs::path>>{
                     {"urls", P("stages/urls.csv")},
                     {"corpus", c.corpus},
                     {"communities", P("stages/communities.csv")},
                     {"flag_report", P("stages/flag_report.csv")},
                     {"platforms", bundled_or(c.platforms, "platforms.csv")},
                     {"shop_keywords", data_dir() / "shop_keywords.txt"},
                     {"allowdeny", c.allowdeny}};
               },
               [&] { return std::string("scan_messages=") + (c.scan_messages ? "1" : "0"); },
               [this, P] {
                 require(StageId::urls, P("stages/urls.csv"));
                 require(StageId::graph, P("stages/communities.csv"));
                 require(StageId::flag, P("stages/flag_report.csv"));
                 auto catalog = c_.platforms.empty() ? monetization::PlatformCatalog::bundled()
                                                     : monetization::PlatformCatalog::load(c_.platforms);
                 auto community_of = communities::read_communities(P("stages/communities.csv"));
                 auto report = communities::read_flag_report(P("stages/flag_report.csv"));
                 auto conspiracy = [&](ChannelId id) {
                   auto it = community_of.find(id);
                   return it != community_of.end() && report.is_conspiracy(it->second);
                 };

                 std::vector<monetization::Hit> hits;
                 std::vector<monetization::EcommerceSighting> sightings;
                 std::map<std::string, std::set<ChannelId>> elsewhere;
                 for (const auto& row : resolver::read_url_rows(P("stages/urls.csv"))) {
                   bool inside = conspiracy(row.channel_id);
                   auto hit = monetization::classify_url(row.effective, catalog);
                   if (!inside) {
                     if (hit && (hit->category == monetization::Category::donation ||
                                 hit->category == monetization::Category::crowdfunding))
                       elsewhere[hit->url].insert(row.channel_id);
                     continue;
                   }
                   if (hit) {
                     hit->channel_id = row.channel_id;
                     hit->message_id = row.message_id;
                     hits.push_back(std::move(*hit));
                   }
                   if (auto s = monetization::ecommerce_sighting(row.effective, catalog)) {
                     s->channel_id = row.channel_id;
                     s->message_id = row.message_id;
                     sightings.push_back(std::move(*s));
                   }
                 }
                 std::map<std::string, std::size_t> other_counts;
                 for (const auto& [u, chans] : elsewhere) other_counts[u] = chans.size();
                 auto lists = c_.allowdeny.empty() ? monetization::AllowDeny{} : monetization::AllowDeny::load(c_.allowdeny);
                 auto filtered = monetization::cross_community_filter(hits, other_counts, lists);

                 auto kept = std::move(filtered.retained);
                 for (const auto& ch : corpus().channels())
                   if (conspiracy(ch.channel_id))
                     for (auto& h : monetization::blockchain_hits(ch, c_.scan_messages)) kept.push_back(std::move(h));
                 std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
                   return std::tie(a.channel_id, a.message_id) < std::tie(b.channel_id, b.message_id);
                 });
                 monetization::write_hits(P("stages/monetization.csv"), kept, filtered.flagged_for_review);
                 monetization::write_review_queue(P("stages/review_queue.csv"), filtered.review_queue);
                 monetization::write_ecommerce(P("stages/ecommerce.csv"), sightings);
               }});

  s.push_back({StageId::metrics, 1,
               [&, P] {
                 return std::vector<std::pair<std::string, fs::path>>{{"monetization", P("stages/monetization.csv")},
                                                                      {"fixtures", config::fixtures_path(c)},
                                                                      {"rates", c.rates},
                                                                      {"tx_summaries", c.tx_summaries}};
               },
               [&] {
                 bool live = c.metrics_source == config::MetricsSource::live && !c.no_network;
                 return std::string("source=") + (live ? "live" : "fixture");
               },
               [this, P] {
                 require(StageId::monetize, P("stages/monetization.csv"));
                 auto hits = monetization::read_hits(P("stages/monetization.csv"));
                 std::vector<metrics::CampaignMetrics> records;
                 if (c_.metrics_source == config::MetricsSource::live && !c_.no_network) {
                   metrics::LiveSource src(config::fixtures_path(c_), *client(),
                                           std::chrono::milliseconds(c_.politeness_delay_ms),
                                           std::chrono::milliseconds(c_.timeout_ms));
                   records = metrics::fetch_all(hits, src);
                 } else {
                   metrics::FixtureSource src(config::fixtures_path(c_));
                   records = metrics::fetch_all(hits, src);
                 }
                 metrics::write_metrics(P("stages/metrics.csv"), records);
                 auto rates = c_.rates.empty() ? metrics::RateTable{} : metrics::RateTable::load(c_.rates);
                 auto rows = metrics::aggregate(records, hits, rates);
                 auto summaries = c_.tx_summaries.empty() ? std::vector<metrics::TxSummary>{}
                                                          : metrics::load_tx_summaries(c_.tx_summaries);
                 for (auto& r : metrics::aggregate_blockchain(hits, summaries, rates)) rows.push_back(std::move(r));
                 reports::write_aggregate(P("stages/aggregate.csv"), rows);
               }});

  s.push_back({StageId::reports, 1,
               [P] {
                 std::vector<std::pair<std::string, fs::path>> in;
                 for (auto rel : {"stages/totals.csv", "stages/ecommerce.csv", "stages/aggregate.csv",
                                  "stages/flag_report.csv", "stages/channels.csv", "stages/communities.csv",
                                  "stages/hits.csv"})
                   in.emplace_back(rel, P(rel));
                 return in;
               },
               [&] { return "top_k=" + std::to_string(c.top_k); },
               [this, P] {
                 std::pair<StageId, const char*> needed[] = {
                     {StageId::match, "stages/totals.csv"},      {StageId::monetize, "stages/ecommerce.csv"},
                     {StageId::metrics, "stages/aggregate.csv"}, {StageId::flag, "stages/flag_report.csv"},
                     {StageId::ingest, "stages/channels.csv"},   {StageId::graph, "stages/communities.csv"},
                     {StageId::hits, "stages/hits.csv"}};
                 for (auto [stage, rel] : needed) require(stage, P(rel));
                 auto R = [this](const char* name) { return layout_.reports() / name; };
                 reports::write_table1(R("table1_totals.csv"), reports::read_totals(P("stages/totals.csv")));
                 reports::write_table3(R("table3_ecommerce.csv"),
                                       reports::ecommerce_summary(monetization::read_ecommerce(P("stages/ecommerce.csv"))));
                 auto agg = reports::read_aggregate(P("stages/aggregate.csv"));
                 reports::write_table4(R("table4_donation.csv"), agg);
                 reports::write_table5(R("table5_crowdfunding.csv"), agg);
                 reports::write_blockchain(R("blockchain.csv"), agg);
                 auto flag = communities::read_flag_report(P("stages/flag_report.csv"));
                 communities::write_scatter(R("scatter.csv"), flag);
                 auto channels = reports::read_channels(P("stages/channels.csv"));
                 auto community_of = communities::read_communities(P("stages/communities.csv"));
                 reports::write_longitudinal(R("longitudinal.csv"), reports::longitudinal(channels, community_of, flag));
                 auto top = communities::top_authorities(communities::read_hits(P("stages/hits.csv")), flag, c_.top_k);
                 reports::write_top_authorities(R("top_authorities.csv"), top, channels);
               }});
  return s;
}

json read_manifest(const fs::path& p) {
  if (!fs::exists(p)) return json::object();
  auto j = json::parse(read_file(p), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    log_warn("ignoring unreadable manifest " + p.string());
    return json::object();
  }
  return j;
}

RunReport Runner::run() {
  fs::create_directories(layout_.stages());
  fs::create_directories(layout_.reports());
  auto manifest = read_manifest(layout_.manifest());
  if (!manifest.contains("stages") || !manifest["stages"].is_object()) manifest["stages"] = json::object();
  manifest["config"] = c_.to_text();
  manifest["started_at"] = now_iso();

  RunReport report;
  bool halted = false;
  for (auto& st : stages()) {
    StageResult res;
    res.stage = st.id;
    auto name = std::string(to_string(st.id));
    if (halted || (o_.only && *o_.only != st.id)) {
      if (halted) {
        res.outcome = Outcome::skipped;
        manifest["stages"][name] = {{"status", "skipped"}};
        report.stages.push_back(res);
      }
      continue;
    }
    auto t0 = Clock::now();
    json entry;
    try {
      json inputs = json::object();
      crypto::Sha256 fp;
      fp.update(name + "\n" + std::to_string(st.version) + "\n" + st.params() + "\n");
      for (const auto& [label, path] : st.inputs()) {
        auto d = digest(path);
        inputs[label] = {{"path", path.string()}, {"sha256", d}};
        fp.update(label + "=" + d + "\n");
      }
      auto fingerprint = crypto::to_hex(fp.finish());

      const auto& prev = manifest["stages"].contains(name) ? manifest["stages"][name] : json();
      bool cached = !o_.force && prev.is_object() && prev.value("status", "") != "failed" &&
                    prev.value("fingerprint", "") == fingerprint && prev.contains("outputs");
      if (cached) {
        for (const auto& rel : Layout::outputs(st.id)) {
          auto p = layout_.root / rel;
          if (!fs::exists(p) || !prev["outputs"].contains(rel) || prev["outputs"][rel] != digest_path(p)) {
            cached = false;
            break;
          }
        }
      }
      entry = {{"version", st.version}, {"parameters", st.params()}, {"inputs", inputs}, {"fingerprint", fingerprint}};
      if (cached) {
        res.outcome = Outcome::cached;
        entry = prev;
        entry["status"] = "cached";
      } else {
        entry["started_at"] = now_iso();
        st.run();
        json outputs = json::object();
        for (const auto& rel : Layout::outputs(st.id)) {
          auto p = layout_.root / rel;
          if (!fs::exists(p)) throw Error("stage did not produce " + rel);
          outputs[rel] = digest_path(p);
        }
        entry["outputs"] = outputs;
        entry["finished_at"] = now_iso();
        entry["status"] = "completed";
        res.outcome = Outcome::completed;
      }
    } catch (const std::exception& e) {
      res.outcome = Outcome::failed;
      res.error = e.what();
      entry["status"] = "failed";
      entry["error"] = e.what();
      entry["finished_at"] = now_iso();
      halted = true;
      log_warn("stage " + name + " failed: " + e.what());
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    entry["seconds"] = res.seconds;
    manifest["stages"][name] = entry;
    report.stages.push_back(res);
    write_file(layout_.manifest(), manifest.dump(1) + "\n");
  }
  manifest["finished_at"] = now_iso();
  write_file(layout_.manifest(), manifest.dump(1) + "\n");
  return report;
}

}  // namespace

RunReport run_pipeline(const config::PipelineConfig& config, const RunOptions& options) {
  config::validate(config);
  Runner r(config, options);
  return r.run();
}

}  // namespace conspigraph::pipeline
