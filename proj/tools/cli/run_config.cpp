#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nvbeat/errors.hpp"
#include "nvbeat/estimation/scan_dataset.hpp"

namespace nvbeat::cli {

namespace {

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw InvalidInput("expected a number, got '" + text + "'");
  return v;
}

int parse_int(const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("expected an integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw InvalidInput("expected true or false, got '" + text + "'");
}

Frame parse_frame(const std::string& text) {
  if (text == "NV" || text == "nv") return Frame::nv;
  if (text == "LAB" || text == "lab") return Frame::lab;
  throw InvalidInput("expected NV or LAB, got '" + text + "'");
}

struct Entry {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define NVBEAT_NUMBER(KEY, MEMBER)                                            \
  Entry {                                                                     \
    KEY, [](RunConfig& c, const std::string& v) { c.MEMBER = parse_number(v); }, \
        [](const RunConfig& c) { return format_double(c.MEMBER); }           \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table{
      NVBEAT_NUMBER("constants.d", system.d),
      NVBEAT_NUMBER("constants.gamma_e", system.gamma_e),
      NVBEAT_NUMBER("constants.gamma_n", system.gamma_n),
      Entry{"constants.flip_nuclear_zeeman",
            [](RunConfig& c, const std::string& v) { c.system.flip_nuclear_zeeman = parse_bool(v); },
            [](const RunConfig& c) { return std::string(c.system.flip_nuclear_zeeman ? "true" : "false"); }},
      NVBEAT_NUMBER("tensor.a_xx", system.tensor.a_xx),
      NVBEAT_NUMBER("tensor.a_yy", system.tensor.a_yy),
      NVBEAT_NUMBER("tensor.a_zz", system.tensor.a_zz),
      NVBEAT_NUMBER("tensor.a", system.tensor.a),
      NVBEAT_NUMBER("tensor_sigma.a_xx", tensor_sigma.a_xx),
      NVBEAT_NUMBER("tensor_sigma.a_yy", tensor_sigma.a_yy),
      NVBEAT_NUMBER("tensor_sigma.a_zz", tensor_sigma.a_zz),
      NVBEAT_NUMBER("tensor_sigma.a", tensor_sigma.a),
      NVBEAT_NUMBER("field.b", b),
      NVBEAT_NUMBER("field.theta", theta),
      NVBEAT_NUMBER("field.phi", phi),
      Entry{"field.frame", [](RunConfig& c, const std::string& v) { c.frame = parse_frame(v); },
            [](const RunConfig& c) { return std::string(c.frame == Frame::nv ? "NV" : "LAB"); }},
      NVBEAT_NUMBER("field.nv_axis_theta", nv_axis.theta_deg),
      NVBEAT_NUMBER("field.nv_axis_phi", nv_axis.phi_deg),
      NVBEAT_NUMBER("rabi.frequency", rabi_frequency),
      NVBEAT_NUMBER("rabi.t_max", rabi_t_max),
      Entry{"rabi.n_points", [](RunConfig& c, const std::string& v) { c.rabi_n_points = parse_int(v); },
            [](const RunConfig& c) { return std::to_string(c.rabi_n_points); }},
      Entry{"ramsey.pi_duration",
            [](RunConfig& c, const std::string& v) {
              if (v == "auto") c.pi_duration.reset(); else c.pi_duration = parse_number(v);
            },
            [](const RunConfig& c) { return c.pi_duration ? format_double(*c.pi_duration) : std::string("auto"); }},
      NVBEAT_NUMBER("ramsey.detuning", detuning),
      NVBEAT_NUMBER("ramsey.tau_max", tau_max),
      Entry{"ramsey.n_points", [](RunConfig& c, const std::string& v) { c.n_points = parse_int(v); },
            [](const RunConfig& c) { return std::to_string(c.n_points); }},
      NVBEAT_NUMBER("ramsey.t2_star", t2_star),
      NVBEAT_NUMBER("ramsey.t2_sq", t2_sq),
      Entry{"ramsey.envelope", [](RunConfig& c, const std::string& v) { c.envelope = envelope_shape_from_string(v); },
            [](const RunConfig& c) { return std::string(to_string(c.envelope)); }},
      NVBEAT_NUMBER("noise.sigma_sq", noise.sq_frequency),
      NVBEAT_NUMBER("noise.sigma_zq", noise.zq_frequency),
      NVBEAT_NUMBER("noise.sigma_amplitude", noise.zq_amplitude),
      NVBEAT_NUMBER("noise.imperfection_amplitude", imperfection.amplitude),
      NVBEAT_NUMBER("noise.imperfection_period", imperfection.period),
      NVBEAT_NUMBER("noise.imperfection_phase", imperfection.phase),
      NVBEAT_NUMBER("fit.phi_offset", phi_offset),
      Entry{"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_u64(v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

#undef NVBEAT_NUMBER

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

FieldOrientation RunConfig::field() const {
  const FieldOrientation f = FieldOrientation::make(b, theta, phi, frame);
  return frame == Frame::lab ? lab_to_nv(f, nv_axis) : f;
}

std::optional<FieldImperfection> RunConfig::imperfection_if_enabled() const {
  if (imperfection.amplitude == 0.0) return std::nullopt;
  return imperfection;
}

void RunConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw InvalidInput(std::string(key) + ": " + what);
  };
  try {
    system.validate();
  } catch (const InvalidInput& e) {
    throw InvalidInput(std::string("constants/tensor: ") + e.what());
  }
  require(std::isfinite(b) && b >= 0.0, "field.b", "must be finite and >= 0");
  require(std::isfinite(theta) && theta >= 0.0 && theta <= 180.0, "field.theta", "must lie in [0, 180]");
  require(std::isfinite(phi), "field.phi", "must be finite");
  require(rabi_frequency > 0.0 && std::isfinite(rabi_frequency), "rabi.frequency", "must be > 0");
  require(rabi_t_max > 0.0 && std::isfinite(rabi_t_max), "rabi.t_max", "must be > 0");
  require(rabi_n_points >= 16, "rabi.n_points", "must be >= 16");
  require(!pi_duration || (*pi_duration > 0.0 && std::isfinite(*pi_duration)), "ramsey.pi_duration",
          "must be > 0 or auto");
  require(std::isfinite(detuning), "ramsey.detuning", "must be finite");
  require(tau_max > 0.0 && std::isfinite(tau_max), "ramsey.tau_max", "must be > 0");
  require(n_points >= 16, "ramsey.n_points", "must be >= 16");
  require(t2_star > 0.0, "ramsey.t2_star", "must be > 0 (inf disables)");
  require(t2_sq > 0.0, "ramsey.t2_sq", "must be > 0 (inf disables)");
  require(noise.sq_frequency >= 0.0, "noise.sigma_sq", "must be >= 0");
  require(noise.zq_frequency >= 0.0, "noise.sigma_zq", "must be >= 0");
  require(noise.zq_amplitude >= 0.0, "noise.sigma_amplitude", "must be >= 0");
  require(std::isfinite(imperfection.amplitude), "noise.imperfection_amplitude", "must be finite");
  require(imperfection.period > 0.0, "noise.imperfection_period", "must be > 0");
  require(std::isfinite(phi_offset), "fit.phi_offset", "must be finite");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, const Entry*> lookup;
  for (const Entry& e : entries()) lookup[e.key] = &e;

  RunConfig config;
  std::map<std::string, int> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InvalidInput(where + "expected 'key = value', got '" + text + "'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = lookup.find(key);
    if (it == lookup.end()) throw InvalidInput(where + "unknown key '" + key + "'");
    if (auto prev = seen.find(key); prev != seen.end()) {
      throw InvalidInput(where + "key '" + key + "' already set on line " + std::to_string(prev->second));
    }
    seen[key] = line_no;
    try {
      it->second->set(config, value);
    } catch (const Error& e) {
      throw InvalidInput(where + key + ": " + e.what());
    }
  }
  try {
    config.validate();
  } catch (const Error& e) {
    throw InvalidInput(source + ": " + e.what());
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::string emit_config(const RunConfig& config) {
  std::string out;
  for (const Entry& e : entries()) {
    out += e.key;
    out += " = ";
    out += e.get(config);
    out += '\n';
  }
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Entry& e : entries()) keys.emplace_back(e.key);
  return keys;
}

std::string config_digest(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : emit_config(config)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nvbeat::cli
