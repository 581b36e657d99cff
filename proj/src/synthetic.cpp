#include "conspigraph/synthetic.hpp"

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "conspigraph/timeutil.hpp"

namespace conspigraph::synthetic {

namespace {

using dataset::ResourceKind;

const std::map<std::string, std::vector<std::string>>& vocabularies() {
  static const std::map<std::string, std::vector<std::string>> v = {
      {"en", {"the", "truth", "they", "want", "you", "to", "know", "about", "what", "is", "really", "happening",
              "government", "people", "world", "share", "this", "before", "deleted", "media", "will", "never",
              "tell", "wake", "up", "everyone", "should", "watch", "read", "understand", "freedom", "which",
              "their", "there", "through", "without", "thinking", "nothing", "right", "now"}},
      {"de", {"die", "wahrheit", "wird", "nicht", "mehr", "lange", "verborgen", "bleiben", "wir", "sind", "das",
              "volk", "und", "lassen", "uns", "keine", "angst", "machen", "regierung", "teilen", "bevor", "gelöscht",
              "medien", "werden", "niemals", "sagen", "aufwachen", "jetzt", "endlich", "freiheit", "zusammen",
              "gegen", "diese", "nachrichten", "schauen", "lesen", "verstehen", "weil", "auch"}},
      {"es", {"la", "verdad", "que", "los", "medios", "no", "quieren", "que", "sepas", "sobre", "lo", "está",
              "pasando", "gobierno", "pueblo", "mundo", "comparte", "esto", "antes", "borren", "nunca", "dirán",
              "despierta", "todos", "deberían", "mirar", "leer", "entender", "libertad", "nuestros", "hijos",
              "contra", "esta", "noticias", "porque", "también", "ahora", "mismo", "ellos", "información"}},
      {"it", {"la", "verità", "che", "non", "vogliono", "farti", "sapere", "su", "quello", "sta", "succedendo",
              "governo", "popolo", "mondo", "condividi", "questo", "prima", "cancellino", "giornali", "mai",
              "diranno", "svegliatevi", "tutti", "dovrebbero", "guardare", "leggere", "capire", "libertà", "nostri",
              "figli", "contro", "questa", "notizie", "perché", "anche", "adesso", "loro", "informazione", "gli",
              "delle"}},
      {"fr", {"la", "vérité", "que", "les", "médias", "ne", "veulent", "pas", "que", "vous", "sachiez", "sur",
              "ce", "qui", "passe", "gouvernement", "peuple", "monde", "partagez", "ceci", "avant", "suppression",
              "jamais", "diront", "réveillez", "tous", "devraient", "regarder", "lire", "comprendre", "liberté",
              "nos", "enfants", "contre", "cette", "nouvelles", "parce", "aussi", "maintenant", "eux"}},
      {"pt", {"a", "verdade", "que", "os", "meios", "não", "querem", "você", "saiba", "sobre", "está",
              "acontecendo", "governo", "povo", "mundo", "compartilhe", "isso", "antes", "apaguem", "nunca", "vão",
              "dizer", "acordem", "todos", "deveriam", "assistir", "ler", "entender", "liberdade", "nossos",
              "filhos", "contra", "essa", "notícias", "porque", "também", "agora", "eles", "informação", "então"}},
      {"ru", {"правда", "которую", "они", "не", "хотят", "чтобы", "вы", "знали", "что", "происходит",
              "правительство", "народ", "мир", "поделитесь", "этим", "пока", "удалили", "средства", "информации",
              "никогда", "скажут", "проснитесь", "все", "должны", "смотреть", "читать", "понимать", "свобода",
              "наших", "детей", "против", "этой", "новости", "потому", "также", "сейчас", "только", "здесь", "было"}},
      {"nl", {"de", "waarheid", "die", "ze", "niet", "willen", "dat", "je", "weet", "over", "wat", "er", "gebeurt",
              "regering", "volk", "wereld", "deel", "dit", "voordat", "verwijderd", "media", "zullen", "nooit",
              "zeggen", "wakker", "worden", "iedereen", "moet", "kijken", "lezen", "begrijpen", "vrijheid", "onze",
              "kinderen", "tegen", "deze", "nieuws", "omdat", "ook", "nu"}},
  };
  return v;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t bits() { return rng_(); }
  double unit() { return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0); }
  bool chance(double p) { return unit() < p; }
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n); }

  std::string token(std::size_t len, std::string_view alphabet) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[below(alphabet.size())];
    return s;
  }

  std::string sentence(const std::vector<std::string>& words) {
    std::size_t n = 6 + below(9);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += words[below(words.size())];
    }
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

constexpr std::string_view kAlnum = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
constexpr std::string_view kLower = "abcdefghijklmnopqrstuvwxyz";

struct CatalogPlan {
  std::vector<std::pair<ResourceKind, std::string>> entries;
};

// Identifiers are drawn from namespaces that decoys never use.
CatalogPlan plan_catalog(Gen& g, dataset::ResourceCatalog& catalog) {
  CatalogPlan p;
  auto add = [&](ResourceKind k, std::string id) {
    if (catalog.add({k, id, "synthetic"})) p.entries.emplace_back(k, dataset::ResourceCatalog::normalize_identifier(k, id));
  };
  for (int i = 0; i < 40; ++i) add(ResourceKind::youtube_video, "Z" + g.token(10, kAlnum));
  for (int i = 0; i < 20; ++i) add(ResourceKind::youtube_channel, "UCz" + g.token(21, kAlnum));
  for (int i = 0; i < 10; ++i) add(ResourceKind::subreddit, "hidden_" + g.token(6, kLower));
  for (int i = 0; i < 3; ++i) add(ResourceKind::voat_subverse, "veiled" + std::to_string(i));
  for (int i = 0; i < 8; ++i) add(ResourceKind::chan_board, "qboard" + std::to_string(i));
  for (int i = 0; i < 20; ++i) add(ResourceKind::website_domain, "truthsite" + std::to_string(i) + ".com");
  return p;
}

std::string planted_url(Gen& g, ResourceKind k, const std::string& id) {
  switch (k) {
    case ResourceKind::youtube_video:
      return g.chance(0.5) ? "https://www.youtube.com/watch?v=" + id + "&t=" + std::to_string(g.below(600)) + "s"
                           : "https://youtu.be/" + id;
    case ResourceKind::youtube_channel: return "https://www.youtube.com/channel/" + id;
    case ResourceKind::subreddit: return "https://www.reddit.com/r/" + id + "/comments/" + g.token(6, kLower) + "/";
    case ResourceKind::voat_subverse: return "https://voat.co/v/" + id;
    case ResourceKind::chan_board: return "https://8kun.top/" + id + "/res/" + std::to_string(1000 + g.below(9000)) + ".html";
    case ResourceKind::website_domain:
      return (g.chance(0.5) ? "https://www." : "http://") + id + "/article/" + std::to_string(g.below(100000));
  }
  return {};
}

std::string decoy_url(Gen& g) {
  switch (g.below(6)) {
    case 0: return "https://www.youtube.com/watch?v=D" + g.token(10, kAlnum);
    case 1: return "https://www.reddit.com/r/news" + std::to_string(g.below(50)) + "/";
    case 2: return "https://dailyreport" + std::to_string(g.below(40)) + ".org/story/" + std::to_string(g.below(9999));
    case 3: return "https://en.wikipedia.org/wiki/" + g.token(8, kLower);
    case 4: return "www.weather" + std::to_string(g.below(10)) + ".net/today";
    default: return "https://t.me/" + g.token(8, kLower);
  }
}

const char* kWallets[] = {
    "1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa",
    "bc1qw508d6qejxtdg4y5r3zarvary0c5xw7kv8f3t4",
    "0x52908400098527886E0F7030069857D2E4169EE7",
};

std::string monetization_url(Gen& g, const std::string& name) {
  switch (g.below(8)) {
    case 0: return "https://www.patreon.com/" + name;
    case 1: return "https://www.paypal.com/donate?hosted_button_id=" + g.token(13, "ABCDEFGHJKLMNPQRSTUVWXYZ23456789");
    case 2: return "https://www.gofundme.com/f/" + name + "-legal-fund";
    case 3: return "https://www.amazon.com/dp/B0" + g.token(8, "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789") + "?tag=" + name + "-20";
    case 4: return "https://www.amazon.de/dp/B0" + g.token(8, "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789");
    case 5: return "https://www.buymeacoffee.com/" + name;
    case 6: return "https://www.givesendgo.com/" + name;
    default: return "https://shop." + name + "-news.com/products/mug";
  }
}

}  // namespace

const std::vector<std::string>& block_languages() {
  static const std::vector<std::string> langs = {"en", "de", "es", "it", "fr", "pt", "ru", "nl"};
  return langs;
}

Synthetic generate(const Options& o) {
  if (o.channels == 0 || o.blocks == 0 || o.blocks > o.channels)
    throw ValidationError("synthetic corpus needs 1 <= blocks <= channels");
  if (o.conspiracy_blocks > o.blocks) throw ValidationError("more conspiracy blocks than blocks");
  auto start = timeutil::parse_iso8601(o.start_date);
  if (!start || o.span_days <= 0 || o.spike_offset < 0 || o.spike_offset >= o.span_days)
    throw ValidationError("bad synthetic date range");

  Gen g(o.seed);
  Synthetic s;
  auto plan = plan_catalog(g, s.catalog);
  const auto& vocab = vocabularies();
  const auto& langs = block_languages();
  const std::size_t n = o.channels;
  auto& t = s.truth;
  t.spike_day = timeutil::day_number(*start) + o.spike_offset;
  for (std::size_t b = 0; b < o.blocks; ++b) t.conspiracy_block.push_back(b < o.conspiracy_blocks);

  std::vector<std::vector<std::size_t>> members(o.blocks);
  s.channels.resize(n);
  std::size_t spike = o.spike_channels ? std::min(o.spike_channels, n) : n / 10;
  for (std::size_t i = 0; i < n; ++i) {
    auto b = static_cast<std::uint32_t>(i * o.blocks / n);
    members[b].push_back(i);
    t.block_of.push_back(b);
    t.language_of.push_back(langs[b % langs.size()]);
    auto& ch = s.channels[i];
    ch.channel_id = static_cast<ChannelId>(100000 + i);
    ch.username = "chan" + std::to_string(i);
    ch.title = "Channel " + std::to_string(i);
    int day = static_cast<int>(g.below(o.span_days - 1));
    if (day >= o.spike_offset) ++day;  // the spike day is reserved
    ch.creation_date = *start + std::chrono::days(day) + std::chrono::seconds(g.below(86400));
  }
  // Spread the spike channels evenly over the blocks.
  for (std::size_t k = 0; k < spike; ++k) {
    auto& ch = s.channels[k * n / spike];
    ch.creation_date = *start + std::chrono::days(o.spike_offset) + std::chrono::seconds(g.below(86400));
  }

  std::vector<std::size_t> per_channel(n, o.messages / n);
  for (std::size_t r = 0; r < o.messages % n; ++r) ++per_channel[r];

  for (std::size_t i = 0; i < n; ++i) {
    auto& ch = s.channels[i];
    auto b = t.block_of[i];
    const auto& words = vocab.at(t.language_of[i]);
    bool consp = t.conspiracy_block[b];
    ch.description = g.sentence(words);
    auto when = ch.creation_date;
    for (std::size_t m = 0; m < per_channel[i]; ++m) {
      dataset::MessageRecord msg;
      msg.message_id = static_cast<MessageId>(m + 1);
      when += std::chrono::seconds(600 + g.below(7200));
      msg.timestamp = when;
      const auto& w = g.chance(o.foreign_message_rate) ? vocab.at(langs[g.below(langs.size())]) : words;
      msg.text = g.sentence(w);
      if (g.chance(o.forward_rate) && n > 1) {
        std::size_t src;
        if (g.chance(o.forward_in_block) && members[b].size() > 1) {
          do src = members[b][g.below(members[b].size())]; while (src == i);
        } else {
          do src = g.below(n); while (src == i);
        }
        msg.forwarded_from = s.channels[src].channel_id;
      } else if (g.chance(o.decoy_url_rate)) {
        msg.text += ' ' + decoy_url(g);
      }
      ch.messages.push_back(std::move(msg));
    }

    if (!ch.messages.empty() && g.chance(consp ? o.conspiracy_link_rate : o.background_link_rate)) {
      auto links = 1 + g.below(5);
      auto& counts = t.flagged[ch.channel_id];
      for (std::size_t l = 0; l < links; ++l) {
        const auto& [kind, id] = plan.entries[g.below(plan.entries.size())];
        auto& msg = ch.messages[g.below(ch.messages.size())];
        msg.text += ' ' + planted_url(g, kind, id) + (g.chance(0.3) ? "." : "");
        ++counts[matcher::kind_index(kind)];
        ++t.planted_urls[matcher::kind_index(kind)];
      }
    }
    if (consp && !ch.messages.empty() && g.chance(o.monetization_rate)) {
      auto name = *ch.username;
      auto& msg = ch.messages[g.below(ch.messages.size())];
      msg.text += " support us: " + monetization_url(g, name);
      if (g.chance(0.3)) ch.description += std::string(" BTC ") + kWallets[g.below(3)];
    }
  }
  return s;
}

void write(const fs::path& dir, const Synthetic& s) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / "corpus.jsonl").string());
    dataset::write_corpus(out, s.channels);
  }
  {
    std::ofstream out(dir / "catalog.csv", std::ios::binary);
    out << "kind,identifier,source_label\n";
    for (const auto& e : s.catalog.entries())
      out << dataset::to_string(e.kind) << ',' << e.identifier << ',' << e.source_label << '\n';
  }
  nlohmann::json j;
  const auto& t = s.truth;
  for (auto k : dataset::kAllResourceKinds)
    j["planted_urls"][std::string(dataset::to_string(k))] = t.planted_urls[matcher::kind_index(k)];
  j["flagged_channels"] = nlohmann::json::array();
  for (const auto& [id, counts] : t.flagged) j["flagged_channels"].push_back(id);
  j["block_of"] = t.block_of;
  j["language_of"] = t.language_of;
  j["conspiracy_block"] = t.conspiracy_block;
  j["spike_day"] = timeutil::format_day_number(t.spike_day);
  write_file(dir / "truth.json", j.dump(1) + "\n");
}

}  // namespace conspigraph::synthetic
