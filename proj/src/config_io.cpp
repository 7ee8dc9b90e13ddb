#include "obstacle/config_io.hpp"

#include "obstacle/errors.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace obstacle {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::string key;
  std::size_t line;
  std::string value;
};

double to_double(const Field& f) {
  const char* begin = f.value.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE)
    throw ConfigError("line " + std::to_string(f.line) + ": " + f.key + " expects a number, got '" + f.value + "'",
                      f.key, f.line);
  return v;
}

std::size_t to_count(const Field& f) {
  const char* begin = f.value.c_str();
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || v < 0)
    throw ConfigError("line " + std::to_string(f.line) + ": " + f.key + " expects a non-negative integer, got '" +
                          f.value + "'",
                      f.key, f.line);
  return std::size_t(v);
}

template <class T, class Conv>
std::vector<T> to_list(const Field& f, Conv conv) {
  std::vector<T> out;
  std::istringstream in(f.value);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(conv(Field{f.key, f.line, trim(item)}));
  if (out.empty())
    throw ConfigError("line " + std::to_string(f.line) + ": " + f.key + " expects a comma-separated list", f.key,
                      f.line);
  return out;
}

[[noreturn]] void bad_value(const Field& f, const std::string& expected) {
  throw ConfigError("line " + std::to_string(f.line) + ": " + f.key + " expects " + expected + ", got '" + f.value + "'",
                    f.key, f.line);
}

using Setter = std::function<void(SimConfig&, const Field&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"domain.half_width", [](SimConfig& c, const Field& f) { c.half_width = to_double(f); }},
      {"domain.cells", [](SimConfig& c, const Field& f) { c.cells = to_count(f); }},
      {"domain.horizon", [](SimConfig& c, const Field& f) { c.horizon = to_double(f); }},

      {"law.kind",
       [](SimConfig& c, const Field& f) {
         if (f.value == "linear") c.law.kind = LawKind::Linear;
         else if (f.value == "power") c.law.kind = LawKind::Power;
         else if (f.value == "table") c.law.kind = LawKind::Table;
         else bad_value(f, "linear, power or table");
       }},
      {"law.exponent", [](SimConfig& c, const Field& f) { c.law.exponent = int(to_count(f)); }},
      {"law.table", [](SimConfig& c, const Field& f) { c.law.table_path = f.value; }},

      {"penalty.epsilon", [](SimConfig& c, const Field& f) { c.epsilon = to_double(f); }},
      {"penalty.epsilon_visc", [](SimConfig& c, const Field& f) { c.epsilon_visc = to_double(f); }},
      {"penalty.epsilon_pen", [](SimConfig& c, const Field& f) { c.epsilon_pen = to_double(f); }},
      {"penalty.mode",
       [](SimConfig& c, const Field& f) {
         if (f.value == "one") c.mode = ObstacleMode::One;
         else if (f.value == "two") c.mode = ObstacleMode::Two;
         else bad_value(f, "one or two");
       }},

      {"stepping.scheme",
       [](SimConfig& c, const Field& f) {
         if (f.value == "explicit") c.scheme = Scheme::Explicit;
         else if (f.value == "semi-implicit") c.scheme = Scheme::SemiImplicitPenalty;
         else bad_value(f, "explicit or semi-implicit");
       }},
      {"stepping.cfl", [](SimConfig& c, const Field& f) { c.cfl = to_double(f); }},
      {"stepping.record_stride", [](SimConfig& c, const Field& f) { c.record_stride = to_count(f); }},

      {"initial.kind",
       [](SimConfig& c, const Field& f) {
         if (f.value == "bump") c.initial.kind = InitialKind::Bump;
         else if (f.value == "two-bump") c.initial.kind = InitialKind::TwoBump;
         else if (f.value == "constant") c.initial.kind = InitialKind::Constant;
         else if (f.value == "file") c.initial.kind = InitialKind::File;
         else bad_value(f, "bump, two-bump, constant or file");
       }},
      {"initial.offset", [](SimConfig& c, const Field& f) { c.initial.offset = to_double(f); }},
      {"initial.amplitude", [](SimConfig& c, const Field& f) { c.initial.first.amplitude = to_double(f); }},
      {"initial.center", [](SimConfig& c, const Field& f) { c.initial.first.center = to_double(f); }},
      {"initial.width", [](SimConfig& c, const Field& f) { c.initial.first.width = to_double(f); }},
      {"initial.velocity", [](SimConfig& c, const Field& f) { c.initial.first.velocity = to_double(f); }},
      {"initial.amplitude2", [](SimConfig& c, const Field& f) { c.initial.second.amplitude = to_double(f); }},
      {"initial.center2", [](SimConfig& c, const Field& f) { c.initial.second.center = to_double(f); }},
      {"initial.width2", [](SimConfig& c, const Field& f) { c.initial.second.width = to_double(f); }},
      {"initial.velocity2", [](SimConfig& c, const Field& f) { c.initial.second.velocity = to_double(f); }},
      {"initial.file", [](SimConfig& c, const Field& f) { c.initial.file = f.value; }},
      {"initial.mollify_cells", [](SimConfig& c, const Field& f) { c.initial.mollify_cells = to_double(f); }},

      {"diagnostics.window_lo", [](SimConfig& c, const Field& f) { c.diagnostics.window_lo = to_double(f); }},
      {"diagnostics.window_hi", [](SimConfig& c, const Field& f) { c.diagnostics.window_hi = to_double(f); }},
      {"diagnostics.holder_alpha", [](SimConfig& c, const Field& f) { c.diagnostics.holder_alpha = to_double(f); }},
      {"diagnostics.test_count", [](SimConfig& c, const Field& f) { c.diagnostics.test_count = to_count(f); }},
      {"diagnostics.seed", [](SimConfig& c, const Field& f) { c.diagnostics.seed = unsigned(to_count(f)); }},
      {"diagnostics.sweep_eps",
       [](SimConfig& c, const Field& f) { c.diagnostics.sweep_eps = to_list<double>(f, to_double); }},
      {"diagnostics.refine_cells",
       [](SimConfig& c, const Field& f) { c.diagnostics.refine_cells = to_list<std::size_t>(f, to_count); }},
      {"diagnostics.energy_tolerance",
       [](SimConfig& c, const Field& f) { c.diagnostics.energy_tolerance = to_double(f); }},
  };
  return table;
}

const std::set<std::string> kSections = {"domain", "law", "penalty", "stepping", "initial", "diagnostics"};

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig config;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header", "", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ConfigError("line " + std::to_string(lineno) + ": unknown section [" + section + "]", section, lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'", "", lineno);
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string::npos) value = trim(value.substr(0, hash));
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key '" + key + "' outside any section", key, lineno);
    const std::string full = section + "." + key;
    const auto it = setters().find(full);
    if (it == setters().end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" + section + "]", key,
                        lineno);
    if (seen.count(full))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'", key, lineno);
    seen[full] = lineno;
    it->second(config, Field{key, lineno, value});
  }
  for (const char* required : {"domain.horizon", "penalty.epsilon"}) {
    if (!seen.count(required)) {
      const std::string key = std::string(required).substr(std::string(required).find('.') + 1);
      throw ConfigError("missing required key '" + key + "'", key, 0);
    }
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    std::size_t line = 0;
    for (const auto& [full, l] : seen)
      if (full.substr(full.find('.') + 1) == e.key()) line = l;
    throw ConfigError(line ? "line " + std::to_string(line) + ": " + e.what() : std::string(e.what()), e.key(), line);
  }
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const SimConfig& c) {
  std::ostringstream os;
  const auto list_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
    return s;
  };
  const auto list_n = [](const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s;
  };
  os << "[domain]\n"
     << "half_width = " << fmt_double(c.half_width) << "\n"
     << "cells = " << c.cells << "\n"
     << "horizon = " << fmt_double(c.horizon) << "\n\n";
  os << "[law]\n";
  switch (c.law.kind) {
    case LawKind::Linear: os << "kind = linear\n"; break;
    case LawKind::Power: os << "kind = power\n"; break;
    case LawKind::Table: os << "kind = table\n"; break;
  }
  os << "exponent = " << c.law.exponent << "\n";
  if (!c.law.table_path.empty()) os << "table = " << c.law.table_path << "\n";
  os << "\n[penalty]\n"
     << "epsilon = " << fmt_double(c.epsilon) << "\n";
  if (c.epsilon_visc) os << "epsilon_visc = " << fmt_double(*c.epsilon_visc) << "\n";
  if (c.epsilon_pen) os << "epsilon_pen = " << fmt_double(*c.epsilon_pen) << "\n";
  os << "mode = " << to_string(c.mode) << "\n\n";
  os << "[stepping]\n"
     << "scheme = " << to_string(c.scheme) << "\n"
     << "cfl = " << fmt_double(c.cfl) << "\n"
     << "record_stride = " << c.record_stride << "\n\n";
  const auto& i = c.initial;
  os << "[initial]\n"
     << "kind = " << to_string(i.kind) << "\n"
     << "offset = " << fmt_double(i.offset) << "\n"
     << "amplitude = " << fmt_double(i.first.amplitude) << "\n"
     << "center = " << fmt_double(i.first.center) << "\n"
     << "width = " << fmt_double(i.first.width) << "\n"
     << "velocity = " << fmt_double(i.first.velocity) << "\n"
     << "amplitude2 = " << fmt_double(i.second.amplitude) << "\n"
     << "center2 = " << fmt_double(i.second.center) << "\n"
     << "width2 = " << fmt_double(i.second.width) << "\n"
     << "velocity2 = " << fmt_double(i.second.velocity) << "\n";
  if (!i.file.empty()) os << "file = " << i.file << "\n";
  os << "mollify_cells = " << fmt_double(i.mollify_cells) << "\n\n";
  const auto& d = c.diagnostics;
  os << "[diagnostics]\n"
     << "window_lo = " << fmt_double(d.window_lo) << "\n"
     << "window_hi = " << fmt_double(d.window_hi) << "\n"
     << "holder_alpha = " << fmt_double(d.holder_alpha) << "\n"
     << "test_count = " << d.test_count << "\n"
     << "seed = " << d.seed << "\n"
     << "sweep_eps = " << list_d(d.sweep_eps) << "\n"
     << "refine_cells = " << list_n(d.refine_cells) << "\n"
     << "energy_tolerance = " << fmt_double(d.energy_tolerance) << "\n";
  return os.str();
}

std::string extract_config_echo(const std::string& report_text) {
  std::istringstream in(report_text);
  std::string line, out;
  bool inside = false;
  while (std::getline(in, line)) {
    if (line == "# --- config ---") {
      inside = !inside;
      if (!inside) break;
      continue;
    }
    if (inside && line.rfind("# ", 0) == 0) out += line.substr(2) + "\n";
    else if (inside && line == "#") out += "\n";
  }
  return out;
}

}  // namespace obstacle
