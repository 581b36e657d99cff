// conspigraph command line: full runs, single stages, synthetic corpora.
#include <iostream>

#include <CLI11.hpp>

#include "conspigraph/config.hpp"
#include "conspigraph/pipeline.hpp"
#include "conspigraph/synthetic.hpp"

namespace cg = conspigraph;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string corpus;
  std::string catalog;
  std::vector<std::string> sets;
  bool force = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Pipeline config file (key = value)");
  app->add_option("--out", c.out, "Output directory");
  app->add_option("--corpus", c.corpus, "Corpus .jsonl file or directory of shards");
  app->add_option("--catalog", c.catalog, "Resource catalog CSV");
  app->add_option("--set", c.sets, "Override a config key, key=value (repeatable)");
  app->add_flag("--force", c.force, "Ignore cached stage results");
}

cg::config::PipelineConfig build_config(const Common& c, const std::vector<std::pair<std::string, std::string>>& extra) {
  auto cfg = c.config.empty() ? cg::config::PipelineConfig{} : cg::config::load(c.config);
  auto cwd = cg::fs::current_path();
  if (!c.out.empty()) cg::config::set(cfg, "out", c.out, cwd);
  if (!c.corpus.empty()) cg::config::set(cfg, "corpus", c.corpus, cwd);
  if (!c.catalog.empty()) cg::config::set(cfg, "catalog", c.catalog, cwd);
  for (const auto& [k, v] : extra) cg::config::set(cfg, k, v, cwd);
  for (const auto& s : c.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw cg::ValidationError("--set expects key=value, got '" + s + "'");
    cg::config::set(cfg, s.substr(0, eq), s.substr(eq + 1), cwd);
  }
  return cfg;
}

int execute(const cg::config::PipelineConfig& cfg, std::optional<cg::pipeline::StageId> only, bool force) {
  cg::pipeline::RunOptions o;
  o.only = only;
  o.force = force;
  auto report = cg::pipeline::run_pipeline(cfg, o);
  for (const auto& s : report.stages) {
    std::cout << cg::pipeline::to_string(s.stage) << ": " << cg::pipeline::to_string(s.outcome);
    if (s.outcome == cg::pipeline::Outcome::completed) std::cout << " (" << s.seconds << " s)";
    if (!s.error.empty()) std::cout << " - " << s.error;
    std::cout << "\n";
  }
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community and monetization analysis of broadcast-channel corpora"};
  app.require_subcommand(1);

  Common common;
  std::vector<std::pair<std::string, std::string>> extra;
  std::optional<cg::pipeline::StageId> only;
  std::function<int()> action;

  auto stage_cmd = [&](CLI::App* cmd, cg::pipeline::StageId id) {
    add_common(cmd, common);
    cmd->callback([&, id] {
      only = id;
      action = [&] { return execute(build_config(common, extra), only, common.force); };
    });
    return cmd;
  };

  auto* run = app.add_subcommand("run", "Run every stage, reusing cached results");
  add_common(run, common);
  run->callback([&] { action = [&] { return execute(build_config(common, extra), std::nullopt, common.force); }; });

  stage_cmd(app.add_subcommand("ingest", "Load and validate the corpus"), cg::pipeline::StageId::ingest);

  auto* urls = app.add_subcommand("urls", "Extract URLs and resolve shortened links");
  urls->require_subcommand(1);
  stage_cmd(urls->add_subcommand("extract", "Extract and normalize only (no network)"), cg::pipeline::StageId::urls)
      ->final_callback([&] { extra.emplace_back("no_network", "true"); });
  auto* resolve = stage_cmd(urls->add_subcommand("resolve", "Extract and resolve shortened URLs"), cg::pipeline::StageId::urls);
  std::string delay;
  resolve->add_option("--delay-ms", delay, "Per-host politeness delay")->each([&](const std::string& v) {
    extra.emplace_back("politeness_delay_ms", v);
  });
  resolve->add_flag_callback("--no-network", [&] { extra.emplace_back("no_network", "true"); }, "Leave shortened URLs unresolved");

  stage_cmd(app.add_subcommand("match", "Match URLs against the resource catalog"), cg::pipeline::StageId::match);

  auto* graph = app.add_subcommand("graph", "Forwarding graph analysis");
  graph->require_subcommand(1);
  for (auto [name, id, help] : {std::tuple{"build", cg::pipeline::StageId::graph, "Build the graph and detect communities"},
                                std::tuple{"communities", cg::pipeline::StageId::graph, "Same as build"},
                                std::tuple{"flag", cg::pipeline::StageId::flag, "Flag conspiracy communities"},
                                std::tuple{"hits", cg::pipeline::StageId::hits, "Hub and authority scores"}}) {
    auto* sub = stage_cmd(graph->add_subcommand(name, help), id);
    if (id == cg::pipeline::StageId::graph) {
      sub->add_option_function<std::string>("--resolution", [&](const std::string& v) { extra.emplace_back("resolution", v); });
      sub->add_option_function<std::string>("--seed", [&](const std::string& v) { extra.emplace_back("seed", v); });
      sub->add_flag_callback("--binary-edges", [&] { extra.emplace_back("binary_edges", "true"); });
    }
    if (id == cg::pipeline::StageId::flag) {
      sub->add_option_function<std::string>("--threshold", [&](const std::string& v) { extra.emplace_back("flag_threshold", v); });
      sub->add_option_function<std::string>("--min-size", [&](const std::string& v) { extra.emplace_back("min_size", v); });
    }
  }

  stage_cmd(app.add_subcommand("language", "Detect channel languages"), cg::pipeline::StageId::language);

  auto* monetize = stage_cmd(app.add_subcommand("monetize", "Detect monetization evidence"), cg::pipeline::StageId::monetize);
  monetize->add_option_function<std::string>("--platforms", [&](const std::string& v) { extra.emplace_back("platforms", v); },
                                             "Platform catalog CSV");
  monetize->add_option_function<std::string>("--allowdeny", [&](const std::string& v) { extra.emplace_back("allowdeny", v); },
                                             "Review decisions: lines 'allow <url>' or 'deny <url>'");

  auto* metrics = app.add_subcommand("metrics", "Funding metrics for donation and crowdfunding hits");
  metrics->require_subcommand(1);
  auto* fetch = stage_cmd(metrics->add_subcommand("fetch", "Fetch or read page snapshots, then aggregate"),
                          cg::pipeline::StageId::metrics);
  fetch->add_option_function<std::string>("--source", [&](const std::string& v) { extra.emplace_back("metrics_source", v); })
      ->check(CLI::IsMember({"fixture", "live"}));
  fetch->add_option_function<std::string>("--fixtures", [&](const std::string& v) { extra.emplace_back("fixtures", v); });
  auto* aggregate = stage_cmd(metrics->add_subcommand("aggregate", "Aggregate with a currency table"),
                              cg::pipeline::StageId::metrics);
  aggregate->add_option_function<std::string>("--rates", [&](const std::string& v) { extra.emplace_back("rates", v); });
  fetch->add_option_function<std::string>("--rates", [&](const std::string& v) { extra.emplace_back("rates", v); });

  stage_cmd(app.add_subcommand("report", "Emit report tables from stage outputs"), cg::pipeline::StageId::reports);

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus with planted structure");
  cg::synthetic::Options so;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Directory for corpus.jsonl, catalog.csv, truth.json")->required();
  synth->add_option("--channels", so.channels);
  synth->add_option("--messages", so.messages);
  synth->add_option("--blocks", so.blocks);
  synth->add_option("--conspiracy-blocks", so.conspiracy_blocks);
  synth->add_option("--seed", so.seed);
  synth->callback([&] {
    action = [&] {
      auto s = cg::synthetic::generate(so);
      cg::synthetic::write(synth_out, s);
      cg::write_file(cg::fs::path(synth_out) / "pipeline.conf",
                     "corpus = corpus.jsonl\ncatalog = catalog.csv\nout = out\nno_network = true\n");
      std::cout << "wrote " << s.channels.size() << " channels to " << synth_out << "\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 0;
  } catch (const cg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
