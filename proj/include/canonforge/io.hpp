#pragma once
#include <string>
#include <utility>
#include <vector>

#include "canonforge/special.hpp"

namespace cf {

// Fixed 17-significant-digit scientific notation; nan and inf spelled out.
std::string format_number(double v);

// Rows of preformatted cells under a header. Throws NumericError("io", ...) on write failure.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// "1+2i", "-0.5i", "3", "i", "1-i"
cplx parse_complex(const std::string& text);

struct RunManifest {
  std::string tool = "canon-forge";
  std::string version;
  std::string command;
  std::vector<std::string> argv;
  std::string config_json = "{}";  // resolved configuration
  int threads = 1;
  std::vector<std::pair<std::string, double>> timings;  // seconds per stage
  std::vector<std::pair<std::string, double>> errors;   // error estimate per stage
  std::vector<std::pair<std::string, bool>> checks;     // pass/fail flags
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> extra;  // raw JSON fragments
  std::string to_json() const;
};

}  // namespace cf
