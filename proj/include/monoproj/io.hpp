#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace monoproj {

/// A numeric CSV table addressed by header name. Header row mandatory.
class CsvTable {
 public:
  CsvTable() = default;
  CsvTable(std::vector<std::string> header, std::vector<std::vector<double>> columns);

  const std::vector<std::string>& header() const noexcept { return header_; }
  std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
  bool has(std::string_view name) const;
  /// Throws ValidationError for an unknown column.
  const std::vector<double>& column(std::string_view name) const;
  Eigen::VectorXd vector(std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> columns_;
};

/// Parses comma-separated numbers. Errors carry the 1-based line number.
CsvTable parse_csv(std::istream& in, const std::string& source = "<input>");
CsvTable read_csv(const std::filesystem::path& path);

/// Writes with 17 significant digits and LF line endings.
void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);

/// Shortest text that reads back to the same double (17 significant digits).
std::string format_double(double v);

}  // namespace monoproj
