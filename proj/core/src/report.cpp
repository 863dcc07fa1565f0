#include "swhs/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace swhs {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path);
  }
}

void KvReport::set(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}
void KvReport::set(std::string key, const char* value) {
  entries_.emplace_back(std::move(key), std::string(value));
}
void KvReport::set(std::string key, double value) {
  entries_.emplace_back(std::move(key), format_double(value));
}
void KvReport::set(std::string key, bool value) {
  entries_.emplace_back(std::move(key), value ? "true" : "false");
}
void KvReport::set(std::string key, long long value) {
  entries_.emplace_back(std::move(key), std::to_string(value));
}

std::string KvReport::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  }
  return out;
}

void KvReport::write(const std::string& path) const { write_text_atomic(path, to_text()); }

}  // namespace swhs
