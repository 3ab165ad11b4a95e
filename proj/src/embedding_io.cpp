#include "bisnorm/embedding_io.hpp"

#include <map>
#include <sstream>

#include "bisnorm/csv.hpp"
#include "bisnorm/errors.hpp"
#include "bisnorm/matrix_io.hpp"

namespace bisnorm {

EmbeddedDataset parse_embeddings_csv(std::string_view text,
                                     const std::optional<std::vector<std::string>>& labels) {
  const auto rows = split_csv_lines(text);
  if (rows.empty()) throw ParseError("empty embedding CSV");
  const auto& header = rows.front();
  if (header.size() < 4 || header[0] != "id" || header[1] != "true_label" ||
      header[2] != "predicted_label") {
    throw ParseError("embedding CSV header must start with id,true_label,predicted_label,e_1");
  }
  const auto dim = static_cast<Eigen::Index>(header.size() - 3);

  std::vector<std::string> names;
  std::map<std::string, int> index;
  if (labels) {
    names = *labels;
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (!index.emplace(names[k], static_cast<int>(k)).second) {
        throw ParseError("duplicate label in label list: " + names[k]);
      }
    }
  }
  const auto lookup = [&](const std::string& name) {
    if (auto it = index.find(name); it != index.end()) return it->second;
    if (labels) throw ParseError("label not in label list: " + name);
    const int id = static_cast<int>(names.size());
    names.push_back(name);
    index.emplace(name, id);
    return id;
  };

  EmbeddedDataset ds;
  ds.points.resize(static_cast<Eigen::Index>(rows.size() - 1), dim);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw ParseError("embedding CSV row " + std::to_string(r) + " has wrong field count");
    }
    ds.labels.push_back(lookup(row[1]));
    ds.predictions.push_back(lookup(row[2]));
    for (Eigen::Index k = 0; k < dim; ++k) {
      ds.points(static_cast<Eigen::Index>(r - 1), k) =
          parse_real(row[static_cast<std::size_t>(k + 3)]);
    }
  }
  ds.classes = static_cast<int>(names.size());
  ds.class_names = std::move(names);
  try {
    ds.validate();
  } catch (const DegenerateInputError& e) {
    throw ParseError(std::string("embedding CSV: ") + e.what());
  }
  return ds;
}

std::string format_embeddings_csv(const EmbeddedDataset& ds) {
  const auto name = [&](int c) {
    return ds.class_names.empty() ? std::to_string(c)
                                  : ds.class_names[static_cast<std::size_t>(c)];
  };
  std::ostringstream out;
  out << "id,true_label,predicted_label";
  for (Eigen::Index k = 0; k < ds.dim(); ++k) out << ",e_" << k + 1;
  out << '\n';
  for (Eigen::Index r = 0; r < ds.size(); ++r) {
    const auto s = static_cast<std::size_t>(r);
    out << r << ',' << name(ds.labels[s]) << ',' << name(ds.predictions[s]);
    for (Eigen::Index k = 0; k < ds.dim(); ++k) out << ',' << format_real(ds.points(r, k));
    out << '\n';
  }
  return out.str();
}

EmbeddedDataset read_embeddings(const std::filesystem::path& path,
                                const std::optional<std::vector<std::string>>& labels) {
  return parse_embeddings_csv(read_text_file(path), labels);
}

std::vector<std::string> read_label_file(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (const auto& row : split_csv_lines(read_text_file(path))) {
    if (row.size() != 1) throw ParseError("label file must hold one label per line");
    out.push_back(row.front());
  }
  return out;
}

}  // namespace bisnorm
