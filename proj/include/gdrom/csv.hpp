#pragma once

#include "gdrom/types.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace gdrom {

/// Comma-separated output with reals at 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<real>& values);
  void row(const std::string& label, real value);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Cells of a CSV file with a header line; throws IoError on ragged rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> text_column(const std::string& name) const;
  /// Throws IoError on a non-numeric cell.
  std::vector<real> column(const std::string& name) const;
};

real parse_real(const std::string& cell);

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace gdrom
