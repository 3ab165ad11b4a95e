#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bisnorm/confusion_matrix.hpp"

namespace bisnorm {

enum class MatrixFormat { Csv, Json };

// CSV:  label,<class_1>,...,<class_C>  then one row per true class.
// JSON: {"labels": [...], "entries": [[...], ...]}
ConfusionMatrix parse_confusion_csv(std::string_view text);
ConfusionMatrix parse_confusion_json(std::string_view text);

std::string format_confusion_csv(const ConfusionMatrix& m);
std::string format_confusion_json(const ConfusionMatrix& m);

// Chooses the format from the extension (".json" -> JSON, else CSV).
MatrixFormat format_for_path(const std::filesystem::path& path);

ConfusionMatrix read_confusion(const std::filesystem::path& path);
void write_confusion(const std::filesystem::path& path, const ConfusionMatrix& m);

// Shortest round-trippable rendering at 12 significant digits.
std::string format_real(double value);

std::string read_text_file(const std::filesystem::path& path);
// Writes through a sibling temp file and renames it over `path`.
void write_text_file_atomic(const std::filesystem::path& path,
                            std::string_view contents);

}  // namespace bisnorm
