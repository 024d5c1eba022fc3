#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prodgraph/catalog.hpp"
#include "prodgraph/dictionary.hpp"
#include "prodgraph/types.hpp"

namespace prodgraph {

// Behavior log:  user \t item \t action \t epoch_seconds [\t category]
// Catalog:       item \t category
// Ratings:       user \t item \t rating

struct ParseReport {
  std::size_t total = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> reasons;  // first kMaxReasons, "line N: reason"

  static constexpr std::size_t kMaxReasons = 10;

  void reject(std::size_t line, std::string_view why) {
    ++rejected;
    if (reasons.size() < kMaxReasons) reasons.push_back("line " + std::to_string(line) + ": " + std::string(why));
  }
};

struct ParseOptions {
  bool strict = false;  // fail on the first malformed line
};

struct CategoryDelta {
  ItemId item;
  CategoryId category;
  std::size_t line = 0;
};

struct ParsedLog {
  std::vector<BehaviorEvent> events;
  std::vector<CategoryDelta> categories;  // from the optional fifth column
  ParseReport report;
};

struct Rating {
  UserId user;
  ItemId item;
  double value = 0.0;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view chomp(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

inline std::optional<Action> parse_action(std::string_view s) {
  std::string lower(s);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "click") return Action::Click;
  if (lower == "purchase") return Action::Purchase;
  return std::nullopt;
}

// Non-negative integer seconds. Returns an error reason or empty on success.
inline std::string parse_timestamp(std::string_view s, Timestamp& out) {
  if (s.empty()) return "empty timestamp";
  if (s.find('.') != std::string_view::npos) return "fractional timestamp";
  for (char ch : s) {
    if (ch < '0' || ch > '9') return "timestamp is not a non-negative integer";
  }
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return "timestamp out of range";
  return {};
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read file: " + path.string());
  return in;
}

}  // namespace detail

inline ParsedLog parse_log(std::istream& in, Dictionaries& dicts, const ParseOptions& opts = {}) {
  ParsedLog out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    ++out.report.total;
    auto line = detail::chomp(raw);
    auto cols = detail::split_tabs(line);

    std::string why;
    std::optional<Action> action;
    Timestamp ts = 0;
    if (line.empty()) {
      why = "empty line";
    } else if (cols.size() != 4 && cols.size() != 5) {
      why = "expected 4 or 5 tab-separated columns, got " + std::to_string(cols.size());
    } else if (cols[0].empty() || cols[1].empty()) {
      why = "empty user or item id";
    } else if (!(action = detail::parse_action(cols[2]))) {
      why = "unknown action '" + std::string(cols[2]) + "'";
    } else if (auto ts_err = detail::parse_timestamp(cols[3], ts); !ts_err.empty()) {
      why = ts_err;
    } else if (cols.size() == 5 && *action != Action::Purchase) {
      why = "category column is only allowed on purchase events";
    } else if (cols.size() == 5 && cols[4].empty()) {
      why = "empty category";
    }

    if (!why.empty()) {
      if (opts.strict) throw ValidationError("line " + std::to_string(line_no) + ": " + why);
      out.report.reject(line_no, why);
      continue;
    }

    BehaviorEvent ev{dicts.users.intern(cols[0]), dicts.items.intern(cols[1]), *action, ts};
    out.events.push_back(ev);
    if (cols.size() == 5) out.categories.push_back({ev.item, dicts.categories.intern(cols[4]), line_no});
    ++out.report.accepted;
  }
  return out;
}

inline ParsedLog parse_log(const std::filesystem::path& path, Dictionaries& dicts, const ParseOptions& opts = {}) {
  auto in = detail::open_input(path);
  try {
    return parse_log(in, dicts, opts);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// Duplicate rows must agree; a conflicting row is fatal and names both lines.
inline Catalog parse_catalog(std::istream& in, Dictionaries& dicts, std::string_view source = "catalog") {
  Catalog catalog;
  std::unordered_map<std::uint64_t, std::size_t> first_line;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw ValidationError(std::string(source) + " line " + std::to_string(line_no) +
                            ": expected 'item<TAB>category'");
    }
    ItemId item = dicts.items.intern(cols[0]);
    CategoryId cat = dicts.categories.intern(cols[1]);
    if (!catalog.assign(item, cat)) {
      throw ValidationError(std::string(source) + ": conflicting categories for item '" + std::string(cols[0]) +
                            "' on lines " + std::to_string(first_line[item.value]) + " and " +
                            std::to_string(line_no));
    }
    first_line.try_emplace(item.value, line_no);
  }
  return catalog;
}

inline Catalog parse_catalog(const std::filesystem::path& path, Dictionaries& dicts) {
  auto in = detail::open_input(path);
  return parse_catalog(in, dicts, path.string());
}

// Folds fifth-column categories from a purchase log into the catalog.
inline void merge_categories(Catalog& catalog, const std::vector<CategoryDelta>& deltas, const Dictionaries& dicts) {
  for (const auto& d : deltas) {
    if (!catalog.assign(d.item, d.category)) {
      throw ValidationError("conflicting category '" + dicts.categories.name(d.category) + "' for item '" +
                            dicts.items.name(d.item) + "' on log line " + std::to_string(d.line));
    }
  }
}

inline std::vector<Rating> parse_ratings(std::istream& in, Dictionaries& dicts, std::string_view source = "ratings") {
  std::vector<Rating> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty()) continue;
    auto cols = detail::split_tabs(line);
    double value = 0.0;
    bool ok = cols.size() == 3 && !cols[0].empty() && !cols[1].empty();
    if (ok) {
      auto [ptr, ec] = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(), value);
      ok = ec == std::errc{} && ptr == cols[2].data() + cols[2].size() && std::isfinite(value);
    }
    if (!ok) {
      throw ValidationError(std::string(source) + " line " + std::to_string(line_no) +
                            ": expected 'user<TAB>item<TAB>rating'");
    }
    out.push_back({dicts.users.intern(cols[0]), dicts.items.intern(cols[1]), value});
  }
  return out;
}

inline std::vector<Rating> parse_ratings(const std::filesystem::path& path, Dictionaries& dicts) {
  auto in = detail::open_input(path);
  return parse_ratings(in, dicts, path.string());
}

// Inverse of parse_log for events without the category column.
inline void write_log(std::ostream& out, std::span<const BehaviorEvent> events, const Dictionaries& dicts) {
  for (const auto& e : events) {
    out << dicts.users.name(e.user) << '\t' << dicts.items.name(e.item) << '\t' << to_string(e.action) << '\t'
        << e.timestamp << '\n';
  }
}

}  // namespace prodgraph
