#pragma once

#include <string>
#include <vector>

#include "swhs/extremal.hpp"
#include "swhs/grid.hpp"
#include "swhs/params.hpp"
#include "swhs/rational.hpp"

namespace swhs {

/// Parse or lookup failure carrying "origin:line" and the offending field,
/// so callers can report exactly what to fix.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& message, std::string field)
        : std::runtime_error(message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

/// Flat key = value text with optional [section] headers; '#' and ';' start
/// comments. Sectioned keys are addressed as "section.key". Values stay raw
/// strings until a typed getter runs; numeric getters accept rationals
/// ("3/2"), integers, decimals and scientific notation, and get_rational
/// keeps them exact.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    Rational get_rational(const std::string& key) const;
    Rational get_rational(const std::string& key, const Rational& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// keys in file order
    std::vector<std::string> keys() const;
    const std::string& origin() const { return origin_; }

  private:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };
    const Entry* find(const std::string& key) const;
    [[noreturn]] void fail(const Entry& entry, const std::string& what) const;

    std::string origin_;
    std::vector<Entry> entries_;
};

/// Builders for the [params], [grid] and [solve] blocks. Parameter keys may
/// appear bare or under their section; lookups try "params.p" then "p".
InequalityParams inequality_from_config(const Config& cfg);
SystemParams system_from_config(const Config& cfg);
GridSpec grid_from_config(const Config& cfg);
SolveOptions solve_options_from_config(const Config& cfg);
WeightConvention weight_convention_from_config(const Config& cfg);

}  // namespace swhs
