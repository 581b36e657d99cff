#include "conspigraph/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <sstream>

#include "conspigraph/csv.hpp"
#include "conspigraph/domain.hpp"
#include "conspigraph/timeutil.hpp"

namespace conspigraph::dataset {

using nlohmann::json;

Corpus::Corpus(std::vector<ChannelRecord> channels, LoadSummary summary)
    : channels_(std::move(channels)), summary_(std::move(summary)) {
  index_.reserve(channels_.size());
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    auto [it, inserted] = index_.emplace(channels_[i].channel_id, i);
    if (!inserted) throw ValidationError("duplicate channel_id " + std::to_string(channels_[i].channel_id));
  }
}

const ChannelRecord* Corpus::find(ChannelId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &channels_[it->second];
}

std::size_t Corpus::message_count() const {
  std::size_t n = 0;
  for (const auto& c : channels_) n += c.messages.size();
  return n;
}

namespace {

class MalformedRecord : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::int64_t require_int(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) throw MalformedRecord(std::string("missing or non-integer ") + key);
  return it->get<std::int64_t>();
}

UtcTime require_time(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw MalformedRecord(std::string("missing ") + key);
  auto t = timeutil::parse_iso8601(it->get_ref<const std::string&>());
  if (!t) throw MalformedRecord(std::string("invalid ") + key + " '" + it->get<std::string>() + "'");
  return *t;
}

std::string optional_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw MalformedRecord(std::string("non-string ") + key);
  return it->get<std::string>();
}

MessageRecord parse_message(const json& m) {
  if (!m.is_object()) throw MalformedRecord("message is not an object");
  MessageRecord msg;
  msg.message_id = require_int(m, "message_id");
  msg.timestamp = require_time(m, "timestamp");
  msg.text = optional_string(m, "text");
  if (auto it = m.find("forwarded_from"); it != m.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw MalformedRecord("non-integer forwarded_from");
    msg.forwarded_from = it->get<ChannelId>();
  }
  return msg;
}

struct ShardResult {
  std::vector<ChannelRecord> channels;
  std::vector<std::string> channel_locators;
  LoadSummary summary;
};

ShardResult parse_shard(std::string_view content, const std::string& source, const LoadOptions& options) {
  ShardResult out;
  auto& summary = out.summary;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (strings::trim(line).empty()) continue;

    std::string locator = source + ":" + std::to_string(line_no);
    ++summary.channel_records;
    auto fail_channel = [&](const std::string& reason) {
      if (options.strict) throw ParseError(locator + ": " + reason);
      ++summary.channels_skipped;
      summary.skipped.push_back({locator, reason});
    };

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_channel(std::string("invalid JSON: ") + e.what());
      continue;
    }

    ChannelRecord ch;
    try {
      if (!obj.is_object()) throw MalformedRecord("record is not an object");
      ch.channel_id = require_int(obj, "channel_id");
      if (auto it = obj.find("username"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw MalformedRecord("non-string username");
        ch.username = it->get<std::string>();
      }
      ch.title = optional_string(obj, "title");
      ch.description = optional_string(obj, "description");
      ch.creation_date = require_time(obj, "creation_date");
    } catch (const MalformedRecord& e) {
      fail_channel(e.what());
      continue;
    }

    const json* messages = nullptr;
    if (auto it = obj.find("messages"); it != obj.end() && !it->is_null()) {
      if (!it->is_array()) {
        fail_channel("messages is not an array");
        continue;
      }
      messages = &*it;
    }

    if (messages) {
      std::unordered_set<MessageId> seen;
      ch.messages.reserve(messages->size());
      for (std::size_t i = 0; i < messages->size(); ++i) {
        ++summary.message_records;
        std::string mloc = locator + "#message[" + std::to_string(i) + "]";
        try {
          auto msg = parse_message((*messages)[i]);
          if (!seen.insert(msg.message_id).second)
            throw MalformedRecord("duplicate message_id " + std::to_string(msg.message_id));
          ch.messages.push_back(std::move(msg));
          ++summary.messages_parsed;
        } catch (const MalformedRecord& e) {
          if (options.strict) throw ParseError(mloc + ": " + e.what());
          ++summary.messages_skipped;
          summary.skipped.push_back({mloc, e.what()});
        }
      }
    }

    std::stable_sort(ch.messages.begin(), ch.messages.end(), [](const MessageRecord& a, const MessageRecord& b) {
      return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.message_id < b.message_id;
    });
    if (!ch.messages.empty() && ch.messages.front().timestamp < ch.creation_date) {
      std::string reason = "creation_date after first message; moved back to " +
                           timeutil::format_iso8601(ch.messages.front().timestamp);
      if (options.strict) throw ParseError(locator + ": creation_date after first message");
      summary.warnings.push_back({locator, reason});
      ch.creation_date = ch.messages.front().timestamp;
    }

    ++summary.channels_parsed;
    out.channels.push_back(std::move(ch));
    out.channel_locators.push_back(std::move(locator));
  }
  return out;
}

void merge_summary(LoadSummary& into, LoadSummary&& from) {
  into.channel_records += from.channel_records;
  into.channels_parsed += from.channels_parsed;
  into.channels_skipped += from.channels_skipped;
  into.message_records += from.message_records;
  into.messages_parsed += from.messages_parsed;
  into.messages_skipped += from.messages_skipped;
  std::move(from.skipped.begin(), from.skipped.end(), std::back_inserter(into.skipped));
  std::move(from.warnings.begin(), from.warnings.end(), std::back_inserter(into.warnings));
}

Corpus assemble(std::vector<ShardResult> shards) {
  std::vector<ChannelRecord> channels;
  LoadSummary summary;
  std::unordered_map<ChannelId, std::string> seen;
  for (auto& shard : shards) {
    for (std::size_t i = 0; i < shard.channels.size(); ++i) {
      auto id = shard.channels[i].channel_id;
      auto [it, inserted] = seen.emplace(id, shard.channel_locators[i]);
      if (!inserted)
        throw ValidationError(shard.channel_locators[i] + ": duplicate channel_id " + std::to_string(id) +
                              " (first seen at " + it->second + ")");
      channels.push_back(std::move(shard.channels[i]));
    }
    merge_summary(summary, std::move(shard.summary));
  }
  return Corpus(std::move(channels), std::move(summary));
}

}  // namespace

Corpus parse_corpus(std::string_view jsonl, const std::string& source, const LoadOptions& options) {
  std::vector<ShardResult> shards;
  shards.push_back(parse_shard(jsonl, source, options));
  return assemble(std::move(shards));
}

Corpus load_corpus(const fs::path& path, const LoadOptions& options) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw ValidationError("corpus path does not exist: " + path.string());
  }

  std::vector<std::future<ShardResult>> futures;
  for (const auto& file : files) {
    futures.push_back(std::async(std::launch::async, [file, options] {
      std::string content = read_file(file);
      return parse_shard(content, file.string(), options);
    }));
  }
  std::vector<ShardResult> shards;
  for (auto& f : futures) shards.push_back(f.get());
  return assemble(std::move(shards));
}

void write_channel(std::ostream& out, const ChannelRecord& ch) {
  nlohmann::ordered_json obj;
  obj["channel_id"] = ch.channel_id;
  obj["username"] = ch.username ? nlohmann::ordered_json(*ch.username) : nlohmann::ordered_json(nullptr);
  obj["title"] = ch.title;
  obj["description"] = ch.description;
  obj["creation_date"] = timeutil::format_iso8601(ch.creation_date);
  auto messages = nlohmann::ordered_json::array();
  for (const auto& m : ch.messages) {
    nlohmann::ordered_json jm;
    jm["message_id"] = m.message_id;
    jm["timestamp"] = timeutil::format_iso8601(m.timestamp);
    jm["text"] = m.text;
    jm["forwarded_from"] = m.forwarded_from ? nlohmann::ordered_json(*m.forwarded_from) : nlohmann::ordered_json(nullptr);
    messages.push_back(std::move(jm));
  }
  obj["messages"] = std::move(messages);
  out << obj.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
}

void write_corpus(std::ostream& out, const std::vector<ChannelRecord>& channels) {
  for (const auto& ch : channels) write_channel(out, ch);
}

// ---------------------------------------------------------------- catalog

std::string_view to_string(ResourceKind kind) {
  switch (kind) {
    case ResourceKind::youtube_channel: return "youtube_channel";
    case ResourceKind::youtube_video: return "youtube_video";
    case ResourceKind::subreddit: return "subreddit";
    case ResourceKind::voat_subverse: return "voat_subverse";
    case ResourceKind::chan_board: return "chan_board";
    case ResourceKind::website_domain: return "website_domain";
  }
  return "unknown";
}

std::optional<ResourceKind> parse_resource_kind(std::string_view tag) {
  for (auto k : kAllResourceKinds)
    if (to_string(k) == tag) return k;
  return std::nullopt;
}

std::string ResourceCatalog::normalize_identifier(ResourceKind kind, std::string_view raw) {
  std::string_view id = strings::trim(raw);
  auto strip_prefix = [&id](std::string_view p) {
    if (strings::starts_with_icase(id, p)) id.remove_prefix(p.size());
  };
  switch (kind) {
    case ResourceKind::youtube_channel:
    case ResourceKind::youtube_video:
      return std::string(id);
    case ResourceKind::subreddit:
      strip_prefix("/");
      strip_prefix("r/");
      break;
    case ResourceKind::voat_subverse:
      strip_prefix("/");
      strip_prefix("v/");
      break;
    case ResourceKind::chan_board:
      break;
    case ResourceKind::website_domain: {
      std::string host = strings::to_lower(id);
      if (auto p = host.find("://"); p != std::string::npos) host.erase(0, p + 3);
      if (auto p = host.find_first_of("/?#"); p != std::string::npos) host.erase(p);
      if (auto p = host.rfind('@'); p != std::string::npos) host.erase(0, p + 1);
      if (auto p = host.find(':'); p != std::string::npos) host.erase(p);
      while (!host.empty() && host.back() == '.') host.pop_back();
      host = domain::punycode_decode_host(host);
      auto reg = domain::PublicSuffixList::bundled().registrable_domain(host);
      return reg.empty() ? host : std::string(reg);
    }
  }
  while (!id.empty() && id.front() == '/') id.remove_prefix(1);
  while (!id.empty() && id.back() == '/') id.remove_suffix(1);
  return strings::to_lower(id);
}

bool ResourceCatalog::add(ResourceEntry entry) {
  entry.identifier = normalize_identifier(entry.kind, entry.identifier);
  if (entry.identifier.empty()) return false;
  if (!index_[static_cast<std::size_t>(entry.kind)].insert(entry.identifier).second) return false;
  entries_.push_back(std::move(entry));
  return true;
}

bool ResourceCatalog::contains(ResourceKind kind, std::string_view identifier) const {
  const auto& set = index_[static_cast<std::size_t>(kind)];
  return set.find(std::string(identifier)) != set.end();
}

std::size_t ResourceCatalog::count(ResourceKind kind) const { return index_[static_cast<std::size_t>(kind)].size(); }

CatalogLoad parse_catalog(std::istream& in, const std::string& source) {
  CatalogLoad out;
  auto table = csv::read_table(in, source);
  auto kind_col = table.column("kind");
  auto id_col = table.column("identifier");
  std::optional<std::size_t> label_col;
  if (table.has_column("source_label")) label_col = table.column("source_label");

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    std::string locator = source + ":" + std::to_string(table.lines[r]);
    auto kind = parse_resource_kind(strings::trim(row[kind_col]));
    if (!kind) throw ValidationError(locator + ": unknown resource kind '" + row[kind_col] + "'");
    ResourceEntry entry{*kind, row[id_col], label_col ? row[*label_col] : std::string{}};
    std::string normalized = ResourceCatalog::normalize_identifier(*kind, entry.identifier);
    if (normalized.empty()) {
      out.warnings.push_back(locator + ": empty identifier skipped");
      continue;
    }
    if (!out.catalog.add(std::move(entry)))
      out.warnings.push_back(locator + ": duplicate " + std::string(to_string(*kind)) + " '" + normalized + "' dropped");
  }
  return out;
}

CatalogLoad load_catalog(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open catalog " + path.string());
  return parse_catalog(in, path.string());
}

}  // namespace conspigraph::dataset
