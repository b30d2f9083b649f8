#include "gdrom/csv.hpp"

#include "gdrom/errors.hpp"

#include <algorithm>
#include <sstream>

namespace gdrom {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::trunc), columns_(header.size()) {
  if (!out_) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<real>& values) {
  if (values.size() != columns_) throw std::invalid_argument("CsvWriter: row width differs from header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_real(values[i]);
  out_ << '\n';
}

void CsvWriter::row(const std::string& label, real value) {
  if (columns_ != 2) throw std::invalid_argument("CsvWriter: labelled rows need two columns");
  out_ << label << ',' << format_real(value) << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("write failed for " + path_.string());
}

real parse_real(const std::string& cell) {
  try {
    std::size_t used = 0;
    const real v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError("non-numeric CSV cell '" + cell + "'");
}

std::vector<std::string> CsvTable::text_column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("missing CSV column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - header.begin());
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::vector<real> CsvTable::column(const std::string& name) const {
  std::vector<real> out;
  for (const auto& cell : text_column(name)) out.push_back(parse_real(cell));
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV " + path.string());
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(cell);
    if (row.size() != table.header.size()) throw IoError("ragged row in " + path.string());
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace gdrom
