#pragma once

#include <string>
#include <utility>
#include <vector>

namespace swhs {

// Round-trip formatting for doubles (shortest form would be nicer but %.17g
// is portable and exact).
std::string format_double(double v);

// Writes to "<path>.tmp" and renames over the target, so readers never see a
// partially written artifact.
void write_text_atomic(const std::string& path, const std::string& content);

// Ordered key=value report. Text form is one "key=value" line per entry;
// nesting is expressed with dotted keys.
class KvReport {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, const char* value);
  void set(std::string key, double value);
  void set(std::string key, bool value);
  void set(std::string key, long long value);
  void set(std::string key, int value) { set(std::move(key), static_cast<long long>(value)); }
  void set(std::string key, std::size_t value) { set(std::move(key), static_cast<long long>(value)); }

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string to_text() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace swhs
