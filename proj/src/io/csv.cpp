#include <charconv>
#include <cmath>
#include <sstream>

#include "acrom/error.hpp"
#include "acrom/io.hpp"

namespace acrom::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : path_(path), width_(columns.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  tmp_ = path;
  tmp_ += ".tmp";
  out_ = std::make_unique<std::ofstream>(tmp_, std::ios::binary | std::ios::trunc);
  if (!*out_) throw IoError("cannot open " + tmp_.string() + " for writing");
  row(columns);
}

CsvWriter::~CsvWriter() {
  try {
    close();
  } catch (...) {
  }
}

void CsvWriter::row(std::span<const double> values) {
  std::vector<std::string> f;
  f.reserve(values.size());
  for (double v : values) f.push_back(format_double(v));
  row(f);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (!out_) throw IoError("csv: write after close");
  if (fields.size() != width_)
    throw DimensionError("csv " + path_.string() + ": row has " + std::to_string(fields.size()) + " fields, header has " +
                         std::to_string(width_));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) *out_ << ',';
    *out_ << fields[i];
  }
  *out_ << '\n';
}

void CsvWriter::close() {
  if (!out_) return;
  out_->flush();
  const bool ok = static_cast<bool>(*out_);
  out_.reset();
  if (!ok) throw IoError("write failed: " + tmp_.string());
  std::filesystem::rename(tmp_, path_);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  throw FormatError("csv: no column '" + name + "'");
}

double CsvTable::number(std::size_t row, const std::string& name) const {
  const std::string& s = rows.at(row).at(column(name));
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw FormatError("csv: '" + s + "' is not a number");
  return v;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw MissingArtifactError("missing csv: " + path.string());
  CsvTable t;
  std::string line;
  const auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  if (!std::getline(f, line)) throw FormatError("csv " + path.string() + ": empty file");
  t.columns = split(line);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto r = split(line);
    if (r.size() != t.columns.size()) throw FormatError("csv " + path.string() + ": ragged row");
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace acrom::io
