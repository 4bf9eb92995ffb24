#include "wpgen/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace wpgen::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string format_with(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

bool nearly_integral(double x) { return std::fabs(x - std::round(x)) < 1e-9; }

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool ends_like_sentence(std::string_view s) {
  const std::string t = trim(s);
  return !t.empty() && is_terminator(t.back());
}

std::size_t sentence_count(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_terminator(s[i]) && (i + 1 == s.size() || is_space(s[i + 1]))) ++n;
  }
  return n;
}

std::optional<std::string> first_sentence(std::string_view s) {
  const std::string t = trim(s);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (is_terminator(t[i]) && (i + 1 == t.size() || is_space(t[i + 1]))) {
      return t.substr(0, i + 1);
    }
  }
  return std::nullopt;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  const std::string t = trim(s);
  std::size_t start = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (is_terminator(t[i]) && (i + 1 == t.size() || is_space(t[i + 1]))) {
      out.push_back(trim(std::string_view(t).substr(start, i + 1 - start)));
      start = i + 1;
    }
  }
  const std::string tail = trim(std::string_view(t).substr(start));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool icontains(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return true;
  const std::string h = to_lower(haystack);
  const std::string n = to_lower(needle);
  return h.find(n) != std::string::npos;
}

std::string capitalize_first(std::string s) {
  for (char& c : s) {
    if (!is_space(c)) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
  return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_percent(double probability) {
  const double pct = probability * 100.0;
  if (nearly_integral(pct)) {
    return format_with("%.0f", pct) + "%";
  }
  return format_with("%.1f", pct) + "%";
}

std::string format_fixed1(double x) { return format_with("%.1f", x); }

std::string format_minimal(double x) {
  if (nearly_integral(x)) return format_with("%.0f", x);
  return format_with("%.1f", x);
}

}  // namespace wpgen::text
