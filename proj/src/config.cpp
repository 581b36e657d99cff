#include "conspigraph/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>

namespace conspigraph::config {

namespace {

template <typename T>
T number(std::string_view key, std::string_view v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ValidationError("config: bad value '" + std::string(v) + "' for " + std::string(key));
  return out;
}

bool boolean(std::string_view key, std::string_view v) {
  auto s = strings::to_lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ValidationError("config: bad boolean '" + std::string(v) + "' for " + std::string(key));
}

fs::path path_of(std::string_view v, const fs::path& base) {
  if (v.empty()) return {};
  fs::path p{std::string(v)};
  return p.is_absolute() || base.empty() ? p : base / p;
}

struct Field {
  std::function<void(PipelineConfig&, std::string_view, const fs::path&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

#define PATH_FIELD(name) \
  {#name, {[](PipelineConfig& c, std::string_view v, const fs::path& b) { c.name = path_of(v, b); }, \
           [](const PipelineConfig& c) { return c.name.string(); }}}
#define NUM_FIELD(name, T) \
  {#name, {[](PipelineConfig& c, std::string_view v, const fs::path&) { c.name = number<T>(#name, v); }, \
           [](const PipelineConfig& c) { return std::to_string(c.name); }}}
#define REAL_FIELD(name) \
  {#name, {[](PipelineConfig& c, std::string_view v, const fs::path&) { c.name = number<double>(#name, v); }, \
           [](const PipelineConfig& c) { return fmt(c.name); }}}
#define BOOL_FIELD(name) \
  {#name, {[](PipelineConfig& c, std::string_view v, const fs::path&) { c.name = boolean(#name, v); }, \
           [](const PipelineConfig& c) { return std::string(c.name ? "true" : "false"); }}}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      PATH_FIELD(corpus), PATH_FIELD(catalog), PATH_FIELD(platforms), PATH_FIELD(shorteners), PATH_FIELD(cache),
      PATH_FIELD(fixtures), PATH_FIELD(out), PATH_FIELD(allowdeny), PATH_FIELD(rates), PATH_FIELD(tx_summaries),
      REAL_FIELD(resolution), NUM_FIELD(seed, std::uint64_t), REAL_FIELD(flag_threshold),
      NUM_FIELD(min_size, std::size_t), REAL_FIELD(hits_tolerance), NUM_FIELD(sample_size, std::size_t),
      NUM_FIELD(politeness_delay_ms, std::int64_t), NUM_FIELD(timeout_ms, std::int64_t),
      NUM_FIELD(max_redirects, int), NUM_FIELD(workers, std::size_t), REAL_FIELD(language_threshold),
      NUM_FIELD(language_min_chars, std::size_t), NUM_FIELD(top_k, std::size_t), BOOL_FIELD(strict),
      BOOL_FIELD(no_network), BOOL_FIELD(binary_edges), BOOL_FIELD(scan_messages),
      {"metrics_source",
       {[](PipelineConfig& c, std::string_view v, const fs::path&) {
          if (v == "fixture") c.metrics_source = MetricsSource::fixture;
          else if (v == "live") c.metrics_source = MetricsSource::live;
          else throw ValidationError("config: metrics_source must be fixture or live");
        },
        [](const PipelineConfig& c) {
          return std::string(c.metrics_source == MetricsSource::live ? "live" : "fixture");
        }}},
  };
  return f;
}

}  // namespace

void set(PipelineConfig& c, std::string_view key, std::string_view value, const fs::path& base_dir) {
  for (const auto& [name, f] : fields())
    if (name == key) {
      f.set(c, value, base_dir);
      return;
    }
  throw ValidationError("config: unknown key '" + std::string(key) + "'");
}

std::string PipelineConfig::to_text() const {
  std::string out;
  for (const auto& [name, f] : fields()) out += name + " = " + f.get(*this) + "\n";
  return out;
}

PipelineConfig parse(std::string_view text, const fs::path& base_dir, const std::string& source) {
  PipelineConfig c;
  std::size_t lineno = 0;
  for (auto line : strings::split(text, '\n')) {
    ++lineno;
    auto t = strings::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError(source + ":" + std::to_string(lineno) + ": expected key = value");
    try {
      set(c, strings::trim(t.substr(0, eq)), strings::trim(t.substr(eq + 1)), base_dir);
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  // the default out dir is relative too, so anchor it like any other path
  if (c.out.is_relative() && !c.out.empty() && !base_dir.empty()) c.out = base_dir / c.out;
  return c;
}

PipelineConfig load(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("config file not found: " + path.string());
  return parse(read_file(path), path.parent_path(), path.string());
}

void validate(const PipelineConfig& c) {
  auto need = [](const fs::path& p, const char* what) {
    if (p.empty()) throw ValidationError(std::string("config: ") + what + " is required");
    if (!fs::exists(p)) throw ValidationError(std::string("config: ") + what + " not found: " + p.string());
  };
  auto optional = [](const fs::path& p, const char* what) {
    if (!p.empty() && !fs::exists(p))
      throw ValidationError(std::string("config: ") + what + " not found: " + p.string());
  };
  need(c.corpus, "corpus");
  need(c.catalog, "catalog");
  optional(c.platforms, "platforms");
  optional(c.shorteners, "shorteners");
  optional(c.allowdeny, "allowdeny");
  optional(c.rates, "rates");
  optional(c.tx_summaries, "tx_summaries");
  if (c.out.empty()) throw ValidationError("config: out is required");
  if (fs::exists(c.out) && !fs::is_directory(c.out)) throw ValidationError("config: out is not a directory");
  if (!(c.resolution > 0)) throw ValidationError("config: resolution must be > 0");
  if (!(c.flag_threshold >= 0 && c.flag_threshold <= 1)) throw ValidationError("config: flag_threshold must be in [0, 1]");
  if (c.min_size < 1) throw ValidationError("config: min_size must be >= 1");
  if (!(c.hits_tolerance > 0)) throw ValidationError("config: hits_tolerance must be > 0");
  if (c.sample_size < 1) throw ValidationError("config: sample_size must be >= 1");
  if (c.politeness_delay_ms < 0) throw ValidationError("config: politeness_delay_ms must be >= 0");
  if (c.timeout_ms <= 0) throw ValidationError("config: timeout_ms must be > 0");
  if (c.max_redirects < 0) throw ValidationError("config: max_redirects must be >= 0");
  if (c.workers < 1) throw ValidationError("config: workers must be >= 1");
  if (!(c.language_threshold >= 0 && c.language_threshold <= 1))
    throw ValidationError("config: language_threshold must be in [0, 1]");
  if (c.top_k < 1) throw ValidationError("config: top_k must be >= 1");
}

fs::path cache_path(const PipelineConfig& c) { return c.cache.empty() ? c.out / "cache" / "resolutions.jsonl" : c.cache; }
fs::path fixtures_path(const PipelineConfig& c) { return c.fixtures.empty() ? c.out / "fixtures" : c.fixtures; }

}  // namespace conspigraph::config
