#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace threadmine {

// Portable RNG helpers. std::mt19937_64 output is fixed by the standard but
// the <random> distributions are not, so bounded draws are done by hand to
// keep seeded runs identical across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t uniform_index(Rng& rng, std::uint64_t n);
double uniform_unit(Rng& rng);

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);
inline std::string digest_hex(std::string_view bytes) { return hex64(fnv1a64(bytes)); }

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_ws(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);
std::string to_lower_ascii(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool is_ascii_space(char c);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Sequential reader over the lines of a text artifact (model files and
/// similar), reporting 1-based line numbers in errors.
class LineCursor {
 public:
  LineCursor(std::string_view text, std::string source);

  bool at_end() const { return pos_ >= lines_.size(); }
  std::string_view next();
  std::string_view peek() const;
  // Reads the next line and checks it starts with `keyword`; returns the rest.
  std::string_view expect(std::string_view keyword);
  [[noreturn]] void fail(const std::string& message) const;
  const std::string& source() const { return source_; }

 private:
  std::vector<std::string_view> lines_;
  std::size_t pos_ = 0;
  std::string source_;
};

void log_warning(std::string_view message);
// Silences log_warning; used by tests that exercise warning paths.
void set_warnings_enabled(bool enabled);

}  // namespace threadmine
