#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wpgen::text {

std::string trim(std::string_view s);

bool is_terminator(char c);  // '.', '!' or '?'

// True if the trimmed string ends in sentence-final punctuation.
bool ends_like_sentence(std::string_view s);

// Number of sentence terminators that close a sentence (followed by
// whitespace or end of string). Quote-free heuristic shared by the
// single-sentence checks.
std::size_t sentence_count(std::string_view s);

// Cuts the text at the first terminal punctuation mark followed by
// whitespace or end of input; the remainder is discarded. Empty optional
// when no terminator occurs.
std::optional<std::string> first_sentence(std::string_view s);

std::vector<std::string> split_sentences(std::string_view s);

std::string to_lower(std::string_view s);
bool icontains(std::string_view haystack, std::string_view needle);

std::string capitalize_first(std::string s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// 0.55 -> "55%", 0.125 -> "12.5%". Integer percent when within 1e-9 of one.
std::string format_percent(double probability);

// Always one decimal: 24 -> "24.0".
std::string format_fixed1(double x);

// Shortest of integer/one-decimal: 428.0 -> "428", 427.5 -> "427.5".
std::string format_minimal(double x);

}  // namespace wpgen::text
