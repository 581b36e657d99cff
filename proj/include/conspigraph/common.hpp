#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace conspigraph {

using ChannelId = std::int64_t;
using MessageId = std::int64_t;
using UtcTime = std::chrono::sys_seconds;

namespace fs = std::filesystem;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad config, missing path, unknown enum tag.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be parsed. The message carries a locator (file:line).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Diagnostics go to stderr unless silenced (tests silence them).
void set_quiet(bool quiet);
bool quiet();
void log_warn(std::string_view message);
void log_info(std::string_view message);

/// Location of the bundled data directory. Honors $CONSPIGRAPH_DATA.
fs::path data_dir();

namespace strings {

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// Slug used for fixture directories: lowercase ascii alnum runs joined by '-'.
std::string slug(std::string_view s);

}  // namespace strings

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view content);

}  // namespace conspigraph
