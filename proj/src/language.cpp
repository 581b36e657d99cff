#include "conspigraph/language.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <thread>

#include "conspigraph/csv.hpp"
#include "conspigraph/domain.hpp"

namespace conspigraph::language {

namespace {

bool is_letter(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
  if (c >= 0xC0 && c <= 0x2AF) return c != 0xD7 && c != 0xF7;
  if (c >= 0x370 && c <= 0x3FF) return c >= 0x386 && c != 0x387 && c != 0x3F6;
  if (c >= 0x400 && c <= 0x52F) return !(c >= 0x482 && c <= 0x489);
  if (c >= 0x531 && c <= 0x587) return true;   // Armenian
  if (c >= 0x5D0 && c <= 0x5EA) return true;   // Hebrew
  if (c >= 0x620 && c <= 0x64A) return true;   // Arabic
  if (c >= 0x900 && c <= 0xDFF) return true;   // Indic scripts (marks included)
  if (c >= 0xE01 && c <= 0xE4E) return true;   // Thai
  if (c >= 0x1E00 && c <= 0x1FFF) return true; // Latin/Greek extended
  if (c >= 0x3041 && c <= 0x30FF) return true; // kana
  if (c >= 0x4E00 && c <= 0x9FFF) return true; // CJK
  if (c >= 0xAC00 && c <= 0xD7A3) return true; // Hangul
  return false;
}

char32_t to_lower(char32_t c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x137) return c | 1;
  if (c >= 0x139 && c <= 0x148) return (c & 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return c | 1;
  if (c == 0x178) return 0xFF;
  if (c >= 0x179 && c <= 0x17E) return (c & 1) ? c + 1 : c;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x460 && c <= 0x481) return c | 1;
  if (c >= 0x48A && c <= 0x4BF) return c | 1;
  if (c >= 0x4D0 && c <= 0x52F) return c | 1;
  if (c >= 0x1E00 && c <= 0x1E95) return c | 1;
  if (c >= 0x1EA0 && c <= 0x1EFF) return c | 1;
  return c;
}

bool is_word_char(char32_t c) { return is_letter(c) || (c >= '0' && c <= '9') || c == '_'; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

constexpr std::uint64_t pack(char32_t a, char32_t b, char32_t c) {
  return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) | static_cast<std::uint64_t>(c);
}

// Calls f(packed) for every trigram of the cleaned text.
template <typename F>
void for_each_trigram(const std::u32string& cleaned, F&& f) {
  std::size_t i = 0;
  while (i < cleaned.size()) {
    std::size_t end = cleaned.find(U' ', i);
    if (end == std::u32string::npos) end = cleaned.size();
    // " " + word + " "
    char32_t prev2 = U' ', prev1 = cleaned[i];
    for (std::size_t k = i + 1; k <= end; ++k) {
      char32_t cur = k < end ? cleaned[k] : U' ';
      f(pack(prev2, prev1, cur));
      prev2 = prev1;
      prev1 = cur;
    }
    i = end + 1;
  }
}

std::u32string clean(std::string_view text) {
  std::u32string out;
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      pending_space = true;
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < text.size() && !is_space(text[end])) ++end;
    auto token = text.substr(i, end - i);
    i = end;
    if (token.find("://") != std::string_view::npos || strings::starts_with_icase(token, "www.")) {
      pending_space = true;
      continue;
    }
    auto cps = domain::utf8_decode(token);
    for (std::size_t k = 0; k < cps.size(); ++k) {
      char32_t c = cps[k];
      if (c == U'@' && k + 1 < cps.size() && is_word_char(cps[k + 1])) {
        while (k + 1 < cps.size() && is_word_char(cps[k + 1])) ++k;
        pending_space = true;
        continue;
      }
      if (!is_letter(c)) {
        pending_space = true;
        continue;
      }
      if (pending_space && !out.empty()) out.push_back(U' ');
      pending_space = false;
      out.push_back(to_lower(c));
    }
    pending_space = true;
  }
  return out;
}

}  // namespace

std::string clean_text(std::string_view text) { return domain::utf8_encode(clean(text)); }

Detector Detector::load(const fs::path& dir, DetectorOptions options) {
  Detector d;
  d.options_ = options;
  std::vector<std::pair<std::string, std::string>> manifest;
  auto manifest_text = read_file(dir / "manifest.tsv");
  for (auto line : strings::split(manifest_text, '\n')) {
    line = strings::trim(line);
    if (line.empty() || line.starts_with('#')) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError((dir / "manifest.tsv").string() + ": expected code<TAB>file");
    manifest.emplace_back(std::string(line.substr(0, tab)), std::string(strings::trim(line.substr(tab + 1))));
  }
  if (manifest.empty()) throw ValidationError("no language profiles in " + dir.string());

  const std::size_t langs = manifest.size();
  for (std::size_t l = 0; l < langs; ++l) {
    d.codes_.push_back(manifest[l].first);
    auto path = dir / manifest[l].second;
    std::size_t lineno = 0;
    auto text = read_file(path);
    for (auto line : strings::split(text, '\n')) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      // Trigrams may begin or end with a space: split on the last tab, no trim.
      auto tab = line.rfind('\t');
      auto gram = domain::utf8_decode(line.substr(0, tab == std::string_view::npos ? 0 : tab));
      if (tab == std::string_view::npos || gram.size() != 3)
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected trigram<TAB>weight");
      double w = std::stod(std::string(line.substr(tab + 1)));
      auto key = pack(gram[0], gram[1], gram[2]);
      auto [it, inserted] = d.index_.emplace(key, d.index_.size());
      if (inserted) d.weights_.resize(d.weights_.size() + langs, 0.0);
      d.weights_[it->second * langs + l] = w;
    }
  }
  return d;
}

const Detector& Detector::bundled() {
  static const Detector d = load(data_dir() / "languages");
  return d;
}

std::vector<double> Detector::scores(std::string_view text) const {
  const std::size_t langs = codes_.size();
  std::vector<double> dot(langs, 0.0);
  auto cleaned = clean(text);
  std::unordered_map<std::uint64_t, double> counts;
  for_each_trigram(cleaned, [&](std::uint64_t g) { counts[g] += 1; });
  double norm = 0;
  for (const auto& [g, n] : counts) {
    norm += n * n;
    auto it = index_.find(g);
    if (it == index_.end()) continue;
    const double* row = &weights_[it->second * langs];
    for (std::size_t l = 0; l < langs; ++l) dot[l] += n * row[l];
  }
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (auto& x : dot) x /= norm;
  }
  return dot;
}

Verdict Detector::detect(std::string_view text) const {
  auto cleaned = clean(text);
  if (cleaned.size() < options_.min_chars) return {};
  auto s = scores(text);
  std::size_t best = 0;
  for (std::size_t l = 1; l < s.size(); ++l)
    if (s[l] > s[best]) best = l;
  if (s.empty() || s[best] < options_.threshold) return Verdict{std::string(kUndetermined), s.empty() ? 0 : s[best]};
  return Verdict{codes_[best], s[best]};
}

Verdict channel_language(const dataset::ChannelRecord& channel, const Detector& detector, std::size_t sample_size) {
  std::map<std::string, std::size_t> votes;
  std::size_t classified = 0;
  for (auto it = channel.messages.rbegin(); it != channel.messages.rend() && classified < sample_size; ++it) {
    auto v = detector.detect(it->text);
    if (v.language == kUndetermined) continue;
    ++votes[v.language];
    ++classified;
  }
  if (classified == 0) return {};
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it)
    if (it->second > best->second) best = it;
  return Verdict{best->first, static_cast<double>(best->second) / static_cast<double>(classified)};
}

std::vector<Verdict> corpus_languages(const dataset::Corpus& corpus, const Detector& detector,
                                      std::size_t sample_size) {
  const auto& channels = corpus.channels();
  std::vector<Verdict> out(channels.size());
  unsigned workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::size_t chunk = std::max<std::size_t>(1, (channels.size() + workers - 1) / workers);
  std::vector<std::future<void>> futures;
  for (std::size_t b = 0; b < channels.size(); b += chunk) {
    futures.push_back(std::async(std::launch::async, [&, b] {
      for (std::size_t c = b; c < std::min(channels.size(), b + chunk); ++c)
        out[c] = channel_language(channels[c], detector, sample_size);
    }));
  }
  for (auto& f : futures) f.get();
  return out;
}

std::map<std::uint32_t, Histogram> community_distribution(const std::vector<std::uint32_t>& assignment,
                                                          const std::vector<Verdict>& verdicts) {
  if (assignment.size() != verdicts.size()) throw ValidationError("verdicts do not cover the partition");
  std::map<std::uint32_t, std::map<std::string, std::size_t>> counts;
  std::map<std::uint32_t, std::size_t> sizes;
  for (std::size_t v = 0; v < assignment.size(); ++v) {
    ++counts[assignment[v]][verdicts[v].language];
    ++sizes[assignment[v]];
  }
  std::map<std::uint32_t, Histogram> out;
  for (auto& [c, langs] : counts) {
    Histogram h;
    for (auto& [lang, n] : langs) h.emplace_back(lang, static_cast<double>(n) / static_cast<double>(sizes[c]));
    std::stable_sort(h.begin(), h.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    out[c] = std::move(h);
  }
  return out;
}

void write_languages(const fs::path& path, const std::vector<ChannelId>& channels,
                     const std::vector<Verdict>& verdicts) {
  if (channels.size() != verdicts.size()) throw ValidationError("channel and verdict counts differ");
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  csv::Writer w(out);
  w.row({"channel_id", "language", "confidence"});
  for (std::size_t i = 0; i < channels.size(); ++i)
    w.field(channels[i]).field(verdicts[i].language).field(verdicts[i].confidence, 6).end_row();
}

std::map<ChannelId, Verdict> read_languages(const fs::path& path) {
  auto t = csv::read_table(path);
  auto c_ch = t.column("channel_id"), c_l = t.column("language"), c_c = t.column("confidence");
  std::map<ChannelId, Verdict> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    try {
      out[std::stoll(t.rows[r][c_ch])] = Verdict{t.rows[r][c_l], std::stod(t.rows[r][c_c])};
    } catch (const std::exception&) {
      throw ParseError(t.source + ":" + std::to_string(t.lines[r]) + ": bad languages row");
    }
  }
  return out;
}

}  // namespace conspigraph::language
