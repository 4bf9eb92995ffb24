#pragma once

#include <string>

#include "wpgen/controller.hpp"
#include "wpgen/model.hpp"

namespace wpgen {

// Exercise document with fixed top-level keys: spec, arrangement,
// constituents, questions, facts. Key order and indentation are canonical,
// so equal exercises serialize to identical bytes.
std::string serialize_exercise(const Exercise& ex);

// Inverse of serialize_exercise. Throws MalformedDocument on missing or
// unknown fields, wrong types, or an arrangement that breaks the grammar.
Exercise deserialize_exercise(const std::string& json_text);

// Generation outcome envelope shared by accepted exercises and rejections:
// verdict, attempts, reports, and the exercise document (null when
// rejected). Embeds every per-attempt check report for audit.
std::string serialize_result(const GenerationResult& result, const ExerciseSpec& spec);

}  // namespace wpgen
