#include "canonforge/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cf {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NumericError("io", "cannot open " + path + " for writing");
  out << text;
  if (!out) throw NumericError("io", "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) text += ',';
      text += cells[k];
    }
    text += '\n';
  };
  line(header);
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw NumericError("io", "row width does not match the header in " + path);
    line(r);
  }
  write_text(path, text);
}

cplx parse_complex(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s += c;
  if (s.empty()) throw ValidationError("empty complex number");
  const bool imag = s.back() == 'i' || s.back() == 'j';
  auto num = [&](const std::string& t) -> double {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(t, &used);
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse complex number '" + raw + "'");
    }
    if (used != t.size()) throw ValidationError("cannot parse complex number '" + raw + "'");
    return v;
  };
  if (!imag) return {num(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign or the leading sign
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  if (split == std::string::npos) return {0.0, num(body)};
  return {num(body.substr(0, split)), num(body.substr(split))};
}

std::string RunManifest::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["tool"] = tool;
  j["version"] = version;
  j["command"] = command;
  j["argv"] = argv;
  j["config"] = ordered_json::parse(config_json);
  j["threads"] = threads;
  auto numbers = [](const std::vector<std::pair<std::string, double>>& v) {
    ordered_json o = ordered_json::object();
    for (const auto& [k, x] : v) o[k] = std::isfinite(x) ? ordered_json(x) : ordered_json(format_number(x));
    return o;
  };
  j["timings"] = numbers(timings);
  j["errors"] = numbers(errors);
  ordered_json c = ordered_json::object();
  for (const auto& [k, b] : checks) c[k] = b;
  j["checks"] = c;
  j["outputs"] = outputs;
  for (const auto& [k, raw] : extra) j[k] = ordered_json::parse(raw);
  return j.dump(2) + "\n";
}

}  // namespace cf
