// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <sys/resource.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "conspigraph/addresses.hpp"
#include "conspigraph/config.hpp"
#include "conspigraph/graph.hpp"
#include "conspigraph/hits.hpp"
#include "conspigraph/leiden.hpp"
#include "conspigraph/matcher.hpp"
#include "conspigraph/metrics.hpp"
#include "conspigraph/monetization.hpp"
#include "conspigraph/pipeline.hpp"
#include "conspigraph/reports.hpp"
#include "conspigraph/resolver.hpp"
#include "conspigraph/synthetic.hpp"
#include "conspigraph/timeutil.hpp"
#include "conspigraph/url.hpp"
#include "oracles.hpp"
#include "stub_server.hpp"

namespace cg = conspigraph;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using oracle::Triple;

namespace {

const fs::path kFixtures = CG_FIXTURES;

struct Verdict {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;  // first failure wins
    ok = false;
  }
  void note(const std::string& s) {
    if (ok) detail = s;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 6) {
  std::ostringstream ss;
  ss.precision(prec);
  ss << v;
  return ss.str();
}

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("cg_accept_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// random graphs with n <= 8 across edge densities; odd ones are directed
// forwarding graphs, even ones undirected with self-loops
struct SmallGraph {
  std::size_t n;
  std::vector<Triple> triples;
  bool directed;
};

std::vector<SmallGraph> small_graphs() {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> w(1, 5);
  std::vector<SmallGraph> out;
  for (int gi = 0; gi < 50; ++gi) {
    SmallGraph g;
    g.n = 1 + static_cast<std::size_t>(gi % 8);
    g.directed = gi % 2 == 1;
    double p = (gi % 10) / 9.0;
    for (std::uint32_t a = 0; a < g.n; ++a)
      for (std::uint32_t b = 0; b < g.n; ++b) {
        if (g.directed) {
          if (a != b && u(rng) < p) g.triples.emplace_back(a, b, w(rng));
        } else if (a <= b && u(rng) < (a == b ? p / 3 : p)) {
          g.triples.emplace_back(a, b, w(rng));
        }
      }
    out.push_back(std::move(g));
  }
  return out;
}

cg::graph::ForwardingGraph to_forwarding(std::size_t n, const std::vector<Triple>& t) {
  std::vector<cg::ChannelId> nodes;
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(1000 + i);
  std::vector<cg::graph::Edge> edges;
  for (const auto& [a, b, w] : t) edges.push_back({a, b, static_cast<std::uint64_t>(w)});
  return cg::graph::ForwardingGraph(std::move(nodes), std::move(edges));
}

// ---------------------------------------------------------------- 1

Verdict modularity_oracle() {
  Verdict v;
  auto t0 = Clock::now();
  double worst = 0;
  std::size_t evaluated = 0;
  for (const auto& sg : small_graphs()) {
    cg::graph::UndirectedGraph ug;
    cg::graph::ForwardingGraph fg;
    if (sg.directed) {
      fg = to_forwarding(sg.n, sg.triples);
    } else {
      ug = cg::graph::UndirectedGraph::from_triples(sg.n, sg.triples);
    }
    oracle::for_each_partition(sg.n, [&](const std::vector<std::uint32_t>& labels) {
      for (double gamma : {1.0, 0.5}) {
        double lib = sg.directed ? cg::graph::modularity(fg, labels, gamma) : cg::graph::modularity(ug, labels, gamma);
        double ref = oracle::brute_modularity(sg.n, sg.triples, labels, gamma);
        worst = std::max(worst, std::abs(lib - ref));
        ++evaluated;
      }
    });
  }
  double secs = seconds_since(t0);
  if (worst > 1e-12) v.fail("max |Q - Q_ref| = " + fmt(worst));
  if (secs >= 10) v.fail("took " + fmt(secs) + " s");
  v.note(std::to_string(evaluated) + " partitions, max diff " + fmt(worst, 3) + ", " + fmt(secs, 3) + " s");
  return v;
}

// ---------------------------------------------------------------- 2, 3

std::vector<std::uint32_t> planted_truth() {
  std::vector<std::uint32_t> t(200);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<std::uint32_t>(i / 50);
  return t;
}

std::vector<Triple> two_cliques(std::uint32_t k) {
  std::vector<Triple> t;
  for (std::uint32_t c = 0; c < 2; ++c)
    for (std::uint32_t a = 0; a < k; ++a)
      for (std::uint32_t b = a + 1; b < k; ++b) t.emplace_back(c * k + a, c * k + b, 1.0);
  t.emplace_back(k - 1, k, 1.0);
  return t;
}

Verdict leiden_recovery() {
  Verdict v;
  auto truth = planted_truth();
  int good = 0;
  double slowest = 0, worst_nmi = 1;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto g = cg::graph::UndirectedGraph::from_triples(200, oracle::planted_partition(4, 50, 0.3, 0.01, 1000 + s));
    cg::leiden::Options o;
    o.seed = s;
    auto t0 = Clock::now();
    auto p = cg::leiden::leiden_partition(g, o);
    slowest = std::max(slowest, seconds_since(t0));
    double score = oracle::nmi(p.assignment, truth);
    worst_nmi = std::min(worst_nmi, score);
    if (score >= 0.95) ++good;
  }
  if (good < 19) v.fail("NMI >= 0.95 in only " + std::to_string(good) + "/20 runs");
  if (slowest >= 1.0) v.fail("slowest run " + fmt(slowest) + " s");

  // 5-cliques: the expected split is the brute-force optimum; 10-cliques: the obvious split
  int exact = 0, tried = 0;
  for (std::uint32_t k : {5u, 10u}) {
    auto triples = two_cliques(k);
    auto g2 = cg::graph::UndirectedGraph::from_triples(2 * k, triples);
    std::vector<std::uint32_t> expect(2 * k);
    for (std::uint32_t i = 0; i < 2 * k; ++i) expect[i] = i < k ? 0 : 1;
    if (k == 5) {
      double best = -1e300;
      oracle::for_each_partition(2 * k, [&](const std::vector<std::uint32_t>& labels) {
        double q = oracle::brute_modularity(2 * k, triples, labels, 1.0);
        if (q > best + 1e-12) {
          best = q;
          expect = labels;
        }
      });
    }
    for (std::uint64_t s = 0; s < 20; ++s) {
      cg::leiden::Options o;
      o.seed = s;
      ++tried;
      if (cg::leiden::canonical_labels(cg::leiden::leiden_partition(g2, o).assignment) == expect) ++exact;
    }
  }
  if (exact != tried) v.fail("two-clique fixtures exact in " + std::to_string(exact) + "/" + std::to_string(tried) + " runs");
  v.note(std::to_string(good) + "/20 with NMI >= 0.95 (min " + fmt(worst_nmi, 4) + "), slowest " + fmt(slowest, 3) +
         " s, two cliques " + std::to_string(exact) + "/" + std::to_string(tried));
  return v;
}

Verdict leiden_determinism() {
  Verdict v;
  std::vector<cg::graph::UndirectedGraph> graphs;
  for (std::uint64_t s = 0; s < 20; ++s)
    graphs.push_back(cg::graph::UndirectedGraph::from_triples(200, oracle::planted_partition(4, 50, 0.3, 0.01, 1000 + s)));
  graphs.push_back(cg::graph::UndirectedGraph::from_triples(20, two_cliques(10)));
  for (const auto& sg : small_graphs()) {
    if (sg.directed) {
      graphs.push_back(cg::graph::UndirectedGraph::project(to_forwarding(sg.n, sg.triples)));
    } else {
      graphs.push_back(cg::graph::UndirectedGraph::from_triples(sg.n, sg.triples));
    }
  }
  // sparse random graphs with many small components
  for (std::uint64_t s = 0; s < 5; ++s)
    graphs.push_back(cg::graph::UndirectedGraph::from_triples(300, oracle::planted_partition(1, 300, 0.01, 0, 77 + s)));

  std::size_t runs = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (double gamma : {0.5, 1.0, 2.0}) {
      for (std::uint64_t seed : {0ULL, 7ULL}) {
        cg::leiden::Options o;
        o.resolution = gamma;
        o.seed = seed;
        auto a = cg::leiden::leiden_partition(graphs[gi], o);
        auto b = cg::leiden::leiden_partition(graphs[gi], o);
        ++runs;
        if (a.assignment != b.assignment || a.history != b.history)
          v.fail("graph " + std::to_string(gi) + " gamma " + fmt(gamma) + " seed " + std::to_string(seed) +
                 " not reproducible");
        for (std::size_t i = 1; i < a.history.size(); ++i)
          if (a.history[i] < a.history[i - 1])
            v.fail("graph " + std::to_string(gi) + ": modularity fell from " + fmt(a.history[i - 1], 17) + " to " +
                   fmt(a.history[i], 17));
      }
    }
  }
  v.note(std::to_string(graphs.size()) + " graphs, " + std::to_string(runs) + " repeated runs");
  return v;
}

// ---------------------------------------------------------------- 4

Verdict hits_oracle() {
  Verdict v;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> w(1, 5);
  double worst = 1;
  for (int gi = 0; gi < 20; ++gi) {
    const std::size_t n = 50;
    double p = 0.04 + 0.01 * gi;
    std::vector<Triple> t;
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b)
        if (a != b && u(rng) < p) t.emplace_back(a, b, w(rng));
    auto g = to_forwarding(n, t);
    auto s = cg::hits::hits(g);
    auto ref = oracle::authority_eigenvector(n, t);
    worst = std::min(worst, oracle::cosine(s.authority, ref));
  }
  if (worst < 1 - 1e-6) v.fail("min cosine " + fmt(worst, 12));

  // two leaves forward from one centre
  cg::graph::ForwardingGraph star({1, 2, 3}, {{1, 0, 1}, {2, 0, 1}});
  auto s = cg::hits::hits(star);
  const double h = 1 / std::sqrt(2.0);
  double err = std::max({std::abs(s.authority[0] - 1), std::abs(s.authority[1]), std::abs(s.authority[2]),
                         std::abs(s.hub[0]), std::abs(s.hub[1] - h), std::abs(s.hub[2] - h)});
  if (err > 1e-10) v.fail("star graph off by " + fmt(err));
  v.note("min cosine " + fmt(worst, 12) + ", star error " + fmt(err, 3));
  return v;
}

// ---------------------------------------------------------------- 5

Verdict url_extraction() {
  Verdict v;
  std::ifstream in(kFixtures / "url_messages.jsonl");
  std::string line;
  std::size_t messages = 0, labeled = 0, extracted = 0, tp = 0, norm_ok = 0, norm_total = 0;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    ++messages;
    auto text = j["text"].get<std::string>();
    std::multiset<std::string> want;
    std::map<std::string, std::string> norm_of;
    for (const auto& e : j["urls"]) {
      want.insert(e["raw"].get<std::string>());
      norm_of[e["raw"].get<std::string>()] = e["normalized"].get<std::string>();
    }
    labeled += want.size();
    auto got = cg::url::extract_urls(text);
    extracted += got.size();
    for (const auto& r : got) {
      if (text.compare(r.byte_offset, r.text.size(), r.text) != 0)
        v.fail("offset mismatch in message " + std::to_string(messages));
      auto it = want.find(r.text);
      if (it == want.end()) {
        v.fail("unexpected '" + r.text + "' in message " + std::to_string(messages));
        continue;
      }
      want.erase(it);
      ++tp;
      ++norm_total;
      auto n = cg::url::normalize(r);
      if (n && n->to_string() == norm_of[r.text]) {
        ++norm_ok;
      } else {
        v.fail("'" + r.text + "' normalized to '" + (n ? n->to_string() : std::string("<none>")) + "', expected '" +
               norm_of[r.text] + "'");
      }
    }
    for (const auto& m : want) v.fail("missed '" + m + "' in message " + std::to_string(messages));
  }
  if (messages != 200) v.fail("fixture has " + std::to_string(messages) + " messages");
  double precision = extracted ? static_cast<double>(tp) / extracted : 1;
  double recall = labeled ? static_cast<double>(tp) / labeled : 1;
  v.note(std::to_string(messages) + " messages, precision " + fmt(precision) + ", recall " + fmt(recall) +
         ", normalization " + std::to_string(norm_ok) + "/" + std::to_string(norm_total));
  return v;
}

// ---------------------------------------------------------------- 6

class CountingClient : public cg::http::Client {
 public:
  explicit CountingClient(cg::http::Client& inner) : inner_(inner) {}
  cg::http::Response head(const cg::url::NormalizedUrl& t, std::chrono::milliseconds to) override {
    ++calls;
    return inner_.head(t, to);
  }
  cg::http::Response get_headers(const cg::url::NormalizedUrl& t, std::chrono::milliseconds to) override {
    ++calls;
    return inner_.get_headers(t, to);
  }
  cg::http::Response get(const cg::url::NormalizedUrl& t, std::chrono::milliseconds to) override {
    ++calls;
    return inner_.get(t, to);
  }
  std::atomic<int> calls{0};

 private:
  cg::http::Client& inner_;
};

std::vector<cg::resolver::UrlOccurrence> occurrences_of(const std::vector<std::string>& urls) {
  std::vector<cg::resolver::UrlOccurrence> out;
  cg::MessageId id = 1;
  for (const auto& u : urls) {
    cg::resolver::UrlOccurrence o;
    o.raw = cg::url::RawUrl{u, 1, id++, 0};
    o.normalized = *cg::url::normalize(u);
    out.push_back(std::move(o));
  }
  return out;
}

Verdict resolution_politeness() {
  Verdict v;
  stub::Server server;
  const auto a = server.base("127.0.0.1"), b = server.base("localhost");
  std::vector<std::string> urls = {a + "/hop/one", a + "/hop/two", a + "/hop/three", a + "/nohead/four", a + "/loop",
                                   a + "/gone",    b + "/hop/five", b + "/ping",     b + "/hop/six",
                                   "https://example.com/direct",   "https://example.org/also/direct"};
  for (int i = 0; i < 5; ++i) urls.push_back(a + "/hop/one");  // duplicates resolve once

  auto shorteners = cg::resolver::ShortenerList::parse("127.0.0.1\nlocalhost\n");
  cg::resolver::Policy policy;
  policy.host_delay = std::chrono::milliseconds(200);
  policy.timeout = std::chrono::milliseconds(2000);
  policy.workers = 4;
  auto cache = scratch() / "resolve_cache.jsonl";
  fs::remove(cache);

  auto real = cg::http::make_default_client();
  CountingClient first(*real);
  auto occ = occurrences_of(urls);
  auto stats1 = cg::resolver::resolve_all(occ, cache, policy, shorteners, &first);

  auto expect = [&](std::size_t i, cg::resolver::Status st, const std::string& final_path = {}) {
    const auto& r = occ[i].resolution;
    if (r.status != st) {
      v.fail(urls[i] + " -> " + std::string(cg::resolver::to_string(r.status)) + ", expected " +
             std::string(cg::resolver::to_string(st)));
      return;
    }
    if (!final_path.empty() && (!r.final_url || r.final_url->path != final_path))
      v.fail(urls[i] + " final url " + (r.final_url ? r.final_url->to_string() : "<none>"));
  };
  expect(0, cg::resolver::Status::resolved, "/final/one");
  expect(3, cg::resolver::Status::resolved, "/final/four");  // HEAD 405, GET 301
  expect(4, cg::resolver::Status::failed_loop);
  expect(5, cg::resolver::Status::failed_status);
  expect(7, cg::resolver::Status::failed_loop);
  expect(9, cg::resolver::Status::not_shortened);
  if (occ[0].resolution.redirect_count != 1) v.fail("single hop counted " + std::to_string(occ[0].resolution.redirect_count));
  if (stats1.unique_shortened != 9 || stats1.network_resolutions != 9)
    v.fail("first run resolved " + std::to_string(stats1.network_resolutions) + " of " +
           std::to_string(stats1.unique_shortened) + " unique");

  // fallback visible in the server log
  auto log = server.log();
  bool saw_head = false, saw_get = false;
  for (const auto& r : log)
    if (r.path == "/nohead/four") (r.method == "HEAD" ? saw_head : saw_get) = true;
  if (!saw_head || !saw_get) v.fail("405 fallback not visible in server log");

  // per-host gaps from the server log
  std::map<std::string, std::vector<stub::Request>> by_host;
  for (const auto& r : log) by_host[r.host].push_back(r);
  double min_gap_ms = 1e9;
  for (auto& [host, reqs] : by_host) {
    std::sort(reqs.begin(), reqs.end(), [](const auto& x, const auto& y) { return x.entered < y.entered; });
    for (std::size_t i = 1; i < reqs.size(); ++i) {
      double gap = std::chrono::duration<double, std::milli>(reqs[i].entered - reqs[i - 1].left).count();
      min_gap_ms = std::min(min_gap_ms, gap);
    }
  }
  if (by_host.size() != 2) v.fail("expected requests from 2 hosts, saw " + std::to_string(by_host.size()));
  if (min_gap_ms < 200) v.fail("per-host gap " + fmt(min_gap_ms) + " ms < 200 ms");

  // second run over the same input
  auto before = server.requests();
  CountingClient second(*real);
  auto occ2 = occurrences_of(urls);
  auto stats2 = cg::resolver::resolve_all(occ2, cache, policy, shorteners, &second);
  if (second.calls != 0 || server.requests() != before)
    v.fail("second run made " + std::to_string(second.calls.load()) + " client calls");
  if (stats2.cache_hit_rate() != 1.0) v.fail("second run cache hit rate " + fmt(stats2.cache_hit_rate()));
  for (std::size_t i = 0; i < occ.size(); ++i)
    if (occ2[i].resolution.status != occ[i].resolution.status || occ2[i].effective() != occ[i].effective())
      v.fail("cached outcome differs for " + urls[i]);

  v.note(std::to_string(log.size()) + " requests, min per-host gap " + fmt(min_gap_ms, 4) + " ms, second run " +
         std::to_string(second.calls.load()) + " calls");
  return v;
}

// ---------------------------------------------------------------- 7, 12: planted corpus through the pipeline

struct E2E {
  fs::path dir;
  cg::synthetic::Synthetic synth;
  cg::pipeline::RunReport report;
};

const E2E& e2e() {
  static E2E e = [] {
    E2E x;
    x.dir = scratch() / "planted";
    cg::synthetic::Options o;
    o.channels = 300;
    o.messages = 30'000;
    o.seed = 11;
    x.synth = cg::synthetic::generate(o);
    cg::synthetic::write(x.dir, x.synth);
    cg::config::PipelineConfig c;
    c.corpus = x.dir / "corpus.jsonl";
    c.catalog = x.dir / "catalog.csv";
    c.out = x.dir / "out";
    c.no_network = true;
    x.report = cg::pipeline::run_pipeline(c);
    return x;
  }();
  return e;
}

Verdict matching_end_to_end() {
  Verdict v;
  const auto& e = e2e();
  if (!e.report.ok()) {
    for (const auto& s : e.report.stages)
      if (!s.error.empty()) v.fail(std::string(cg::pipeline::to_string(s.stage)) + ": " + s.error);
    return v;
  }
  auto table = oracle::slurp(e.dir / "out/reports/table1_totals.csv");
  auto expected = oracle::slurp(kFixtures / "table1_seed11.csv");
  if (table != expected) v.fail("table1_totals.csv differs from fixture");

  auto flagged = cg::matcher::read_flagged(e.dir / "out/stages/flagged.csv");
  if (flagged.per_channel != e.synth.truth.flagged)
    v.fail("flagged channels: " + std::to_string(flagged.size()) + " vs planted " +
           std::to_string(e.synth.truth.flagged.size()));
  auto totals = cg::reports::read_totals(e.dir / "out/stages/totals.csv");
  if (totals.urls != e.synth.truth.planted_urls) v.fail("per-kind URL totals differ from planted counts");
  v.note(std::to_string(flagged.size()) + " flagged channels, " + std::to_string(totals.total_urls()) +
         " matched URLs, table byte-identical");
  return v;
}

Verdict longitudinal() {
  Verdict v;
  const auto& e = e2e();
  if (!e.report.ok()) {
    v.fail("pipeline run failed");
    return v;
  }
  // oracle: creation dates straight from the corpus file
  std::map<std::string, std::size_t> per_day;
  std::size_t channels = 0;
  {
    std::ifstream in(e.dir / "corpus.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      ++per_day[j["creation_date"].get<std::string>().substr(0, 10)];
      ++channels;
    }
  }
  auto rows = oracle::read_delimited(e.dir / "out/reports/longitudinal.csv", ',', false);
  const auto& header = rows.at(0);
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  std::size_t ti = col("total"), ci = col("conspiracy"), ri = col("rest");
  std::size_t sum = 0, best = 0;
  std::string best_day;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::size_t total = std::stoul(row.at(ti));
    sum += total;
    if (total > best) {
      best = total;
      best_day = row[0];
    }
    std::size_t want = per_day.count(row[0]) ? per_day[row[0]] : 0;
    if (total != want) v.fail(row[0] + ": total " + std::to_string(total) + " vs corpus " + std::to_string(want));
    std::size_t communities = 0;
    for (std::size_t c = 1; c < ci; ++c) communities += std::stoul(row.at(c));
    if (communities != std::stoul(row.at(ci)) || std::stoul(row.at(ci)) + std::stoul(row.at(ri)) != total)
      v.fail(row[0] + ": columns do not add up");
  }
  auto spike = cg::timeutil::format_day_number(e.synth.truth.spike_day);
  if (best_day != spike) v.fail("series max on " + best_day + ", planted spike on " + spike);
  if (sum != channels) v.fail("per-day sum " + std::to_string(sum) + " vs " + std::to_string(channels) + " channels");
  v.note("max " + std::to_string(best) + " on " + best_day + " (planted " + spike + "), sum " + std::to_string(sum) +
         " = " + std::to_string(channels) + " channels");
  return v;
}

// ---------------------------------------------------------------- 8

Verdict monetization_detectors() {
  Verdict v;
  const auto& catalog = cg::monetization::PlatformCatalog::bundled();
  const auto& words = cg::monetization::ShopKeywords::bundled();
  auto cases = oracle::read_delimited(kFixtures / "monetization_cases.tsv", '\t');
  std::size_t agree = 0;
  std::vector<cg::url::NormalizedUrl> detected;
  for (auto row : cases) {
    row.resize(4);
    auto u = cg::url::normalize(row[0]);
    if (!u) {
      v.fail("fixture URL does not normalize: " + row[0]);
      continue;
    }
    auto hit = cg::monetization::classify_url(*u, catalog, words);
    std::string got = hit ? std::string(cg::monetization::to_string(hit->category)) : "none";
    bool same = got == row[1] && (!hit || (hit->platform == row[2] && hit->extracted_id == row[3]));
    if (same) {
      ++agree;
    } else {
      v.fail(row[0] + " -> " + got + (hit ? " " + hit->platform + " '" + hit->extracted_id + "'" : "") +
             ", labeled " + row[1] + " " + row[2] + " '" + row[3] + "'");
    }
    if (hit) detected.push_back(*u);
  }

  // Disjointness: the category is the first detector in precedence order
  // that fires, and each detected URL lands in exactly one category tally.
  const auto& e = e2e();
  auto hits = cg::monetization::read_hits(e.dir / "out/stages/monetization.csv");
  for (const auto& h : hits)
    if (h.category != cg::monetization::Category::blockchain) detected.push_back(*cg::url::normalize(h.url));
  std::map<std::string, std::set<cg::monetization::Category>> categories_of;
  for (const auto& u : detected) {
    std::optional<cg::monetization::Hit> first;
    for (auto d : {+[](const cg::url::NormalizedUrl& x) { return cg::monetization::detect_affiliate(x); },
                   +[](const cg::url::NormalizedUrl& x) {
                     return cg::monetization::detect_platform(x, cg::monetization::PlatformCatalog::bundled());
                   },
                   +[](const cg::url::NormalizedUrl& x) { return cg::monetization::detect_amazon_pages(x); },
                   +[](const cg::url::NormalizedUrl& x) {
                     return cg::monetization::detect_custom_shop(x, cg::monetization::PlatformCatalog::bundled(),
                                                                  cg::monetization::ShopKeywords::bundled());
                   }}) {
      if ((first = d(u))) break;
    }
    auto hit = cg::monetization::classify_url(u, catalog, words);
    if (!hit || !first || hit->category != first->category) v.fail("precedence broken for " + u.to_string());
    if (hit) categories_of[u.to_string()].insert(hit->category);
  }
  for (const auto& [u, cats] : categories_of)
    if (cats.size() != 1) v.fail(u + " falls in " + std::to_string(cats.size()) + " categories");
  std::map<std::tuple<cg::ChannelId, cg::MessageId, std::string>, int> rows;
  for (const auto& h : hits)
    if (h.category != cg::monetization::Category::blockchain && ++rows[{h.channel_id, h.message_id, h.url}] > 1)
      v.fail("occurrence listed twice: " + h.url);

  v.note(std::to_string(agree) + "/" + std::to_string(cases.size()) + " cases agree, " +
         std::to_string(categories_of.size()) + " detected URLs in one category each");
  if (cases.size() != 60) v.fail("fixture has " + std::to_string(cases.size()) + " cases");
  return v;
}

// ---------------------------------------------------------------- 9

Verdict blockchain_validation() {
  Verdict v;
  auto rows = oracle::read_delimited(kFixtures / "addresses.tsv", '\t');
  std::map<std::string, std::pair<int, int>> per_chain;  // accepted valid, rejected corrupted
  for (const auto& r : rows) {
    const auto& chain = r.at(0);
    const auto& addr = r.at(1);
    const auto& expected = r.at(2);
    auto got = cg::addresses::classify(addr);
    bool accepted = got && got->validation != cg::addresses::Validation::invalid;
    auto in_text = cg::addresses::extract_blockchain_addresses("send to " + addr + " thanks");
    if (expected == "invalid") {
      if (accepted || !in_text.empty()) {
        v.fail(chain + " corrupted address accepted: " + addr);
      } else {
        ++per_chain[chain].second;
      }
      continue;
    }
    if (!accepted || cg::addresses::to_string(got->chain) != chain ||
        cg::addresses::to_string(got->validation) != expected) {
      v.fail(chain + " " + addr + " -> " +
             (got ? std::string(cg::addresses::to_string(got->chain)) + "/" +
                        std::string(cg::addresses::to_string(got->validation))
                  : std::string("none")) +
             ", expected " + expected);
      continue;
    }
    if (in_text.size() != 1 || in_text[0] != *got) {
      v.fail("not extracted from text: " + addr);
      continue;
    }
    ++per_chain[chain].first;
  }
  std::string summary;
  for (const auto& chain : {"bitcoin", "ethereum", "monero", "zcash"}) {
    auto [ok, rej] = per_chain[chain];
    if (ok != 10 || rej != 10) v.fail(std::string(chain) + ": " + std::to_string(ok) + "/10 valid, " +
                                      std::to_string(rej) + "/10 corrupted rejected");
    summary += std::string(summary.empty() ? "" : ", ") + chain + " " + std::to_string(ok) + "+" + std::to_string(rej);
  }
  v.note(summary);
  return v;
}

// ---------------------------------------------------------------- 10

std::vector<cg::monetization::Hit> fixture_hits() {
  std::vector<cg::monetization::Hit> hits;
  std::ifstream in(kFixtures / "metrics/urls.txt");
  std::string line;
  cg::MessageId id = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto u = cg::url::normalize(line);
    auto h = cg::monetization::classify_url(*u, cg::monetization::PlatformCatalog::bundled(),
                                            cg::monetization::ShopKeywords::bundled());
    if (!h) throw std::runtime_error("fixture URL not detected: " + line);
    h->channel_id = 1;
    h->message_id = id++;
    hits.push_back(*h);
  }
  return hits;
}

// Everything the metrics stage and its reports produce, written under `dir`.
std::vector<cg::metrics::AggregateRow> metrics_run(const fs::path& dir,
                                                   std::vector<cg::metrics::CampaignMetrics>* records_out = nullptr) {
  fs::create_directories(dir);
  auto hits = fixture_hits();
  cg::metrics::FixtureSource source(kFixtures / "metrics/snapshots");
  auto records = cg::metrics::fetch_all(hits, source);
  auto rates = cg::metrics::RateTable::load(kFixtures / "metrics/rates.csv");
  auto rows = cg::metrics::aggregate(records, hits, rates);
  cg::metrics::write_metrics(dir / "metrics.csv", records);
  cg::reports::write_aggregate(dir / "aggregate.csv", rows);
  cg::reports::write_table4(dir / "table4_donation.csv", rows);
  cg::reports::write_table5(dir / "table5_crowdfunding.csv", rows);
  if (records_out) *records_out = records;
  return rows;
}

Verdict metrics_aggregation() {
  Verdict v;
  std::vector<cg::metrics::CampaignMetrics> records;
  auto rows = metrics_run(scratch() / "metrics_a", &records);
  auto expected = oracle::read_delimited(kFixtures / "metrics/expected_aggregate.csv", ',');
  if (rows.size() != expected.size())
    v.fail(std::to_string(rows.size()) + " aggregate rows, expected " + std::to_string(expected.size()));
  for (std::size_t i = 0; i < std::min(rows.size(), expected.size()); ++i) {
    const auto& r = rows[i];
    const auto& e = expected[i];
    bool same = std::string(cg::monetization::to_string(r.category)) == e[0] && r.platform == e[1] &&
                r.url_count == std::stoul(e[2]) && r.distinct_ids == std::stoul(e[3]) &&
                r.reachable == std::stoul(e[4]) && r.failed_excluded == std::stoul(e[5]) &&
                r.amounts_published == (e[6] == "1") && std::abs(r.total_funds_usd - std::stod(e[7])) < 1e-9 &&
                r.total_supporters == std::stoll(e[8]) && std::string(cg::metrics::to_string(r.period)) == e[9];
    if (!same)
      v.fail("row " + std::to_string(i) + " " + r.platform + ": urls " + std::to_string(r.url_count) + " ids " +
             std::to_string(r.distinct_ids) + " reachable " + std::to_string(r.reachable) + " funds " +
             fmt(r.total_funds_usd, 12) + " supporters " + std::to_string(r.total_supporters) + ", expected " +
             e[1] + " " + e[2] + " " + e[3] + " " + e[4] + " " + e[7] + " " + e[8]);
  }

  // the failed all-or-nothing campaign is seen, classified and left out
  auto failed = std::find_if(records.begin(), records.end(),
                             [](const auto& r) { return r.extracted_id == "maker/fail-proj"; });
  if (failed == records.end() || failed->model != cg::metrics::Model::all_or_nothing ||
      failed->status != cg::metrics::Status::failed || failed->countable())
    v.fail("failed Kickstarter campaign not recognised");
  auto missing = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.extracted_id == "missing"; });
  if (missing == records.end() || missing->status != cg::metrics::Status::unreachable)
    v.fail("page without snapshot not unreachable");

  // rerun into a second directory; every file must match byte for byte
  metrics_run(scratch() / "metrics_b");
  for (auto name : {"metrics.csv", "aggregate.csv", "table4_donation.csv", "table5_crowdfunding.csv"})
    if (oracle::slurp(scratch() / "metrics_a" / name) != oracle::slurp(scratch() / "metrics_b" / name))
      v.fail(std::string(name) + " differs across reruns");
  v.note(std::to_string(rows.size()) + " rows match hand-computed sums, failed campaign excluded, reruns identical");
  return v;
}

// ---------------------------------------------------------------- 11

int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + CG_CLI + "\" " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Verdict scale_check() {
  Verdict v;
  auto dir = scratch() / "scale";
  auto t0 = Clock::now();
  if (int rc = run_cli("synth --out \"" + dir.string() + "\" --channels 10000 --messages 1000000 --seed 5"); rc != 0) {
    v.fail("synth exited " + std::to_string(rc));
    return v;
  }
  double synth_s = seconds_since(t0);
  t0 = Clock::now();
  int rc = run_cli("run --config \"" + (dir / "pipeline.conf").string() + "\"");
  double run_s = seconds_since(t0);
  rusage ru{};
  getrusage(RUSAGE_CHILDREN, &ru);
  double peak_gb = static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);  // ru_maxrss is KiB
  if (rc != 0) v.fail("pipeline exited " + std::to_string(rc));
  if (run_s >= 300) v.fail("pipeline took " + fmt(run_s) + " s");
  if (peak_gb >= 4) v.fail("peak memory " + fmt(peak_gb) + " GB");
  auto manifest = nlohmann::json::parse(oracle::slurp(dir / "out/manifest.json"));
  std::size_t completed = 0;
  for (const auto& [name, st] : manifest["stages"].items())
    if (st.value("status", "") == "completed") ++completed;
  if (completed != cg::pipeline::kStages.size()) v.fail(std::to_string(completed) + " stages completed");
  v.note("pipeline " + fmt(run_s, 3) + " s (synth " + fmt(synth_s, 3) + " s), peak RSS " + fmt(peak_gb, 3) + " GB, " +
         std::to_string(completed) + " stages");
  fs::remove_all(dir);
  return v;
}

}  // namespace

int main() {
  cg::set_quiet(true);
  struct Criterion {
    const char* name;
    Verdict (*fn)();
  };
  const Criterion criteria[] = {
      {"modularity_oracle", modularity_oracle},
      {"leiden_recovery", leiden_recovery},
      {"leiden_determinism_monotonicity", leiden_determinism},
      {"hits_oracle", hits_oracle},
      {"url_extraction_corpus", url_extraction},
      {"resolution_politeness_cache", resolution_politeness},
      {"matching_end_to_end", matching_end_to_end},
      {"monetization_detectors", monetization_detectors},
      {"blockchain_validation", blockchain_validation},
      {"metrics_aggregation", metrics_aggregation},
      {"scale_check", scale_check},
      {"longitudinal", longitudinal},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    std::cout << (v.ok ? "PASS " : "FAIL ") << c.name << " - " << v.detail << std::endl;
    if (!v.ok) ++failed;
  }
  fs::remove_all(scratch());
  std::cout << (std::size(criteria) - failed) << "/" << std::size(criteria) << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
