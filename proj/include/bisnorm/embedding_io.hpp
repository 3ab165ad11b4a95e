#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bisnorm/geometry.hpp"

namespace bisnorm {

// CSV with header id,true_label,predicted_label,e_1,...,e_n. Label strings
// map to class indices in order of first appearance (true label before
// predicted label on each row) unless `labels` fixes the order.
EmbeddedDataset parse_embeddings_csv(std::string_view text,
                                     const std::optional<std::vector<std::string>>& labels = {});
std::string format_embeddings_csv(const EmbeddedDataset& ds);

EmbeddedDataset read_embeddings(const std::filesystem::path& path,
                                const std::optional<std::vector<std::string>>& labels = {});
// One label per line.
std::vector<std::string> read_label_file(const std::filesystem::path& path);

}  // namespace bisnorm
