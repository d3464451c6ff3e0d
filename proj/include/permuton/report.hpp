#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace permuton {

// Shortest round-trip is not needed; 17 significant digits, "nan"/"inf" spelled out.
std::string format_double(double v);

// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;

  std::string render(int width = 720, int height = 440) const;
};

}  // namespace permuton
