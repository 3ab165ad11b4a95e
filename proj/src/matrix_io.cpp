#include "bisnorm/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bisnorm/csv.hpp"
#include "bisnorm/errors.hpp"

namespace bisnorm {

ConfusionMatrix parse_confusion_csv(std::string_view text) {
  const auto rows = split_csv_lines(text);
  if (rows.empty()) throw ParseError("empty confusion CSV");
  const auto& header = rows.front();
  if (header.size() < 3) throw ParseError("confusion CSV header too short");
  std::vector<std::string> labels(header.begin() + 1, header.end());
  const auto c = static_cast<Eigen::Index>(labels.size());
  if (static_cast<Eigen::Index>(rows.size()) - 1 != c) {
    throw ParseError("confusion CSV is not square: " + std::to_string(c) +
                     " columns, " + std::to_string(rows.size() - 1) + " rows");
  }
  Eigen::MatrixXd entries(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i + 1)];
    if (static_cast<Eigen::Index>(row.size()) != c + 1) {
      throw ParseError("confusion CSV row " + std::to_string(i + 1) +
                       " has wrong field count");
    }
    if (row.front() != labels[static_cast<std::size_t>(i)]) {
      throw ParseError("confusion CSV row label '" + row.front() +
                       "' does not match column order");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      const double v = parse_real(row[static_cast<std::size_t>(j + 1)]);
      if (v < 0.0) throw ParseError("confusion CSV has a negative entry");
      entries(i, j) = v;
    }
  }
  try {
    return ConfusionMatrix(std::move(entries), std::move(labels));
  } catch (const DegenerateInputError& e) {
    throw ParseError(e.what());
  }
}

ConfusionMatrix parse_confusion_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("confusion JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries")) {
    throw ParseError("confusion JSON needs an \"entries\" array");
  }
  const auto& rows = doc.at("entries");
  if (!rows.is_array() || rows.empty()) {
    throw ParseError("confusion JSON \"entries\" must be a nonempty array");
  }
  const auto c = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd entries(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw ParseError("confusion JSON is not square");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      const auto& cell = row[static_cast<std::size_t>(j)];
      if (!cell.is_number()) throw ParseError("confusion JSON entry is not a number");
      const double v = cell.get<double>();
      if (v < 0.0) throw ParseError("confusion JSON has a negative entry");
      entries(i, j) = v;
    }
  }
  try {
    if (doc.contains("labels")) {
      auto labels = doc.at("labels").get<std::vector<std::string>>();
      return ConfusionMatrix(std::move(entries), std::move(labels));
    }
    return ConfusionMatrix(std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("confusion JSON labels: ") + e.what());
  } catch (const DegenerateInputError& e) {
    throw ParseError(e.what());
  }
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string format_confusion_csv(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << "label";
  for (const auto& l : m.labels()) out << ',' << l;
  out << '\n';
  for (int i = 0; i < m.size(); ++i) {
    out << m.labels()[static_cast<std::size_t>(i)];
    for (int j = 0; j < m.size(); ++j) out << ',' << format_real(m(i, j));
    out << '\n';
  }
  return out.str();
}

std::string format_confusion_json(const ConfusionMatrix& m) {
  // Hand-rolled so numbers carry the same 12-digit rendering as the CSV.
  std::ostringstream out;
  out << "{\"labels\":" << nlohmann::json(m.labels()).dump() << ",\"entries\":[";
  for (int i = 0; i < m.size(); ++i) {
    out << (i ? ",[" : "[");
    for (int j = 0; j < m.size(); ++j) {
      out << (j ? "," : "") << format_real(m(i, j));
    }
    out << ']';
  }
  out << "]}\n";
  return out.str();
}

MatrixFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? MatrixFormat::Json : MatrixFormat::Csv;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file_atomic(const std::filesystem::path& path,
                            std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ConfusionMatrix read_confusion(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return format_for_path(path) == MatrixFormat::Json ? parse_confusion_json(text)
                                                     : parse_confusion_csv(text);
}

void write_confusion(const std::filesystem::path& path, const ConfusionMatrix& m) {
  write_text_file_atomic(path, format_for_path(path) == MatrixFormat::Json
                                   ? format_confusion_json(m)
                                   : format_confusion_csv(m));
}

}  // namespace bisnorm
