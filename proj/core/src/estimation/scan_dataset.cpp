#include "nvbeat/estimation/scan_dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nvbeat/errors.hpp"

namespace nvbeat {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw InvalidInput(source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& text, const std::string& source, int line, const char* column) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    fail(source, line, std::string("column '") + column + "': cannot parse '" + text + "' as a number");
  }
  return v;
}

}  // namespace

const char* to_string(ObservableKind kind) {
  switch (kind) {
    case ObservableKind::sq_frequency: return "sq_frequency";
    case ObservableKind::zq_frequency: return "zq_frequency";
    case ObservableKind::zq_amplitude: return "zq_amplitude";
  }
  return "?";
}

ObservableKind observable_kind_from_string(const std::string& text) {
  if (text == "sq_frequency") return ObservableKind::sq_frequency;
  if (text == "zq_frequency") return ObservableKind::zq_frequency;
  if (text == "zq_amplitude") return ObservableKind::zq_amplitude;
  throw InvalidInput("unknown observable kind '" + text +
                     "' (expected sq_frequency, zq_frequency or zq_amplitude)");
}

void ScanDataset::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ScanPoint& p = points[i];
    const std::string where = "dataset point " + std::to_string(i) + ": ";
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw InvalidInput(where + "sigma must be > 0");
    if (!std::isfinite(p.value)) throw InvalidInput(where + "value must be finite");
    if (!std::isfinite(p.theta_deg) || p.theta_deg < 0.0 || p.theta_deg > 180.0) {
      throw InvalidInput(where + "theta must lie in [0, 180]");
    }
    if (!std::isfinite(p.phi_deg)) throw InvalidInput(where + "phi must be finite");
    if (!(p.b_gauss >= 0.0)) throw InvalidInput(where + "b must be >= 0");
    if (p.kind == ObservableKind::sq_frequency) {
      if (!p.transition_index || *p.transition_index < 0 || *p.transition_index > 3) {
        throw InvalidInput(where + "sq_frequency needs transition_index in 0..3");
      }
    }
  }
}

ScanDataset read_dataset_csv(std::istream& in, const std::string& source) {
  ScanDataset ds;
  std::string raw;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kDatasetHeader) {
        fail(source, line_no, std::string("expected header '") + kDatasetHeader + "', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 7) {
      fail(source, line_no, "expected 7 columns, got " + std::to_string(f.size()));
    }
    ScanPoint p;
    p.theta_deg = parse_number(f[0], source, line_no, "theta_deg");
    p.phi_deg = parse_number(f[1], source, line_no, "phi_deg");
    p.b_gauss = parse_number(f[2], source, line_no, "b_gauss");
    try {
      p.kind = observable_kind_from_string(f[3]);
    } catch (const InvalidInput& e) {
      fail(source, line_no, e.what());
    }
    p.value = parse_number(f[4], source, line_no, "value");
    p.sigma = parse_number(f[5], source, line_no, "sigma");
    if (!f[6].empty()) {
      const double idx = parse_number(f[6], source, line_no, "transition_index");
      if (idx != std::floor(idx)) fail(source, line_no, "transition_index must be an integer");
      p.transition_index = static_cast<int>(idx);
    }
    ds.points.push_back(p);
    try {
      ScanDataset single;
      single.points.push_back(p);
      single.validate();
    } catch (const InvalidInput& e) {
      std::string msg = e.what();
      const auto colon = msg.find(": ");
      fail(source, line_no, colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
  }
  if (!header_seen) throw InvalidInput(source + ": missing header line");
  return ds;
}

ScanDataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open dataset '" + path + "'");
  return read_dataset_csv(in, path);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_dataset_csv(std::ostream& out, const ScanDataset& dataset) {
  out << kDatasetHeader << '\n';
  for (const ScanPoint& p : dataset.points) {
    out << format_double(p.theta_deg) << ',' << format_double(p.phi_deg) << ','
        << format_double(p.b_gauss) << ',' << to_string(p.kind) << ',' << format_double(p.value) << ','
        << format_double(p.sigma) << ',';
    if (p.transition_index) out << *p.transition_index;
    out << '\n';
  }
}

}  // namespace nvbeat
