#pragma once

#include <string>
#include <vector>

#include "sketchsel/matrix.hpp"

namespace sketchsel {

// Decimal text for a double that parses back to the identical bit pattern.
std::string format_double(double v);
double parse_double(const std::string& s);

// Matrix CSV: optional leading `# ...` comment lines, then `rows,cols`, then one
// comma-separated row per line.
std::string matrix_to_csv(const DenseMatrix& m, const std::vector<std::string>& comments = {});
DenseMatrix matrix_from_csv_text(const std::string& text, const std::string& origin = "<string>");

DenseMatrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const DenseMatrix& m,
                      const std::vector<std::string>& comments = {});

// Whole-file helpers; writes go to a temp file and are renamed into place.
std::string read_text_file(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace sketchsel
