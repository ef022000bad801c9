#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>

namespace echosim {

// Formats with 17 significant digits so every double round-trips exactly.
// Negative zero is normalized to "0".
std::string csv_number(double v);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  void header(std::string_view line);
  void row(std::span<const double> values);
  void row(std::initializer_list<double> values);

 private:
  std::ofstream out_;
};

}  // namespace echosim
