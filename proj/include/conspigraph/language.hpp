#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "conspigraph/dataset.hpp"

namespace conspigraph::language {

inline constexpr std::string_view kUndetermined = "und";

struct Verdict {
  std::string language{kUndetermined};
  double confidence = 0;

  bool operator==(const Verdict&) const = default;
};

struct DetectorOptions {
  std::size_t min_chars = 20;
  double threshold = 0.08;
};

/// Lowercased letters only, words separated by single spaces; URLs, @mentions
/// and everything that is not a letter removed.
std::string clean_text(std::string_view text);

/// Character-trigram detector. Each profile is an L2-normalized sparse
/// trigram vector; the text's trigram counts (words padded with one space on
/// each side) are compared by cosine similarity.
class Detector {
 public:
  /// Directory with manifest.tsv (`code<TAB>file`) and one `trigram<TAB>weight`
  /// file per language.
  static Detector load(const fs::path& dir, DetectorOptions options = {});
  static const Detector& bundled();

  Verdict detect(std::string_view text) const;
  /// Cosine against every profile, in manifest order.
  std::vector<double> scores(std::string_view text) const;

  const std::vector<std::string>& languages() const { return codes_; }
  const DetectorOptions& options() const { return options_; }
  void set_options(DetectorOptions o) { options_ = o; }

 private:
  std::vector<std::string> codes_;
  std::unordered_map<std::uint64_t, std::size_t> index_;  // packed trigram -> row
  std::vector<double> weights_;                           // row-major, codes_.size() per row
  DetectorOptions options_;
};

/// Majority vote over the most recent `sample_size` classifiable messages;
/// ties go to the alphabetically first code.
Verdict channel_language(const dataset::ChannelRecord& channel, const Detector& detector,
                         std::size_t sample_size = 500);

/// Verdicts for every corpus channel (parallel over channels), corpus order.
std::vector<Verdict> corpus_languages(const dataset::Corpus& corpus, const Detector& detector,
                                      std::size_t sample_size = 500);

/// Per community: (language, fraction of channels), descending fraction then
/// ascending code. "und" channels are included.
using Histogram = std::vector<std::pair<std::string, double>>;
std::map<std::uint32_t, Histogram> community_distribution(const std::vector<std::uint32_t>& assignment,
                                                          const std::vector<Verdict>& verdicts);

// languages.csv: channel_id, language, confidence
void write_languages(const fs::path& path, const std::vector<ChannelId>& channels, const std::vector<Verdict>& verdicts);
std::map<ChannelId, Verdict> read_languages(const fs::path& path);

}  // namespace conspigraph::language
