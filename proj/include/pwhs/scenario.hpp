#pragma once

// Flat key-value scenario files with [section] headers.  Grammar:
//   file     := line*
//   line     := '[' name ']' | key '=' value | comment | blank
//   comment  := '#' ...
// Keys are scoped by the current section ("section.key").  Values are free
// text; numeric getters parse decimal with exponent notation, complex values
// are two numbers "re im".

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pwhs/complex_field.hpp"
#include "pwhs/errors.hpp"
#include "pwhs/switching.hpp"

namespace pwhs {

struct Scenario {
  std::map<std::string, std::string> kv;
  std::string path;

  bool has(const std::string& key) const { return kv.count(key) > 0; }

  const std::string& get(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ScenarioError("missing key '" + key + "' in scenario " + path);
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& dflt) const {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
  }

  double get_double(const std::string& key) const {
    std::istringstream ss(get(key));
    double v;
    if (!(ss >> v)) throw ScenarioError("key '" + key + "' is not a number");
    return v;
  }

  double get_double_or(const std::string& key, double dflt) const {
    return has(key) ? get_double(key) : dflt;
  }

  int get_int(const std::string& key) const {
    std::istringstream ss(get(key));
    int v;
    if (!(ss >> v)) throw ScenarioError("key '" + key + "' is not an integer");
    return v;
  }

  int get_int_or(const std::string& key, int dflt) const {
    return has(key) ? get_int(key) : dflt;
  }

  Complex get_complex(const std::string& key) const {
    std::istringstream ss(get(key));
    double re, im;
    if (!(ss >> re >> im))
      throw ScenarioError("key '" + key + "' is not a complex value 're im'");
    return {re, im};
  }

  std::vector<double> get_list(const std::string& key) const {
    std::istringstream ss(get(key));
    std::vector<double> out;
    double v;
    while (ss >> v) out.push_back(v);
    if (out.empty()) throw ScenarioError("key '" + key + "' is an empty list");
    return out;
  }
};

namespace detail {
inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace detail

inline Scenario parse_scenario_text(const std::string& text, const std::string& path = "<string>") {
  Scenario sc;
  sc.path = path;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ScenarioError(path + ":" + std::to_string(lineno) + ": unterminated section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ScenarioError(path + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ScenarioError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ScenarioError(path + ":" + std::to_string(lineno) + ": empty key");
    sc.kv[section.empty() ? key : section + "." + key] = val;
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

/// Build a FieldSpec from keys "<prefix>" (variant name) and "<prefix>.*".
inline FieldSpec scenario_field(const Scenario& sc, const std::string& prefix) {
  std::string kind = sc.get(prefix);
  FieldSpec f;
  if (kind == "constant") {
    f = Constant{sc.get_complex(prefix + ".value")};
  } else if (kind == "linear") {
    f = Linear{sc.get_complex(prefix + ".coeff"), sc.get_complex(prefix + ".center")};
  } else if (kind == "power") {
    f = Power{sc.get_int(prefix + ".n"), sc.get_complex(prefix + ".center"),
              sc.get_int_or(prefix + ".m", 0)};
  } else if (kind == "pole") {
    f = Pole{sc.get_int(prefix + ".n"), sc.get_complex(prefix + ".center"),
             sc.get_int_or(prefix + ".m", 0)};
  } else if (kind == "rational") {
    f = Rational{sc.get_double(prefix + ".gamma"), sc.get_int(prefix + ".n"),
                 sc.get_complex(prefix + ".center")};
  } else if (kind == "laurent") {
    Laurent l;
    l.center = sc.get_complex(prefix + ".center");
    for (int k = 1; sc.has(prefix + ".b" + std::to_string(k)); ++k)
      l.principal.push_back(sc.get_complex(prefix + ".b" + std::to_string(k)));
    for (int k = 0; sc.has(prefix + ".a" + std::to_string(k)); ++k)
      l.analytic.push_back(sc.get_complex(prefix + ".a" + std::to_string(k)));
    f = l;
  } else if (kind == "essential") {
    f = EssentialExp{sc.get_int(prefix + ".m"), sc.get_int(prefix + ".n")};
  } else {
    throw ScenarioError("unknown field kind '" + kind + "' for " + prefix);
  }
  try {
    validate(f);
  } catch (const InvalidFieldSpec& e) {
    throw ScenarioError(std::string("invalid field ") + prefix + ": " + e.what());
  }
  return f;
}

inline PWSystem scenario_system(const Scenario& sc) {
  PWSystem sys;
  std::string orient = sc.get_or("system.line", "vertical");
  if (orient == "vertical")
    sys.line.orientation = LineOrientation::Vertical;
  else if (orient == "horizontal")
    sys.line.orientation = LineOrientation::Horizontal;
  else
    throw ScenarioError("system.line must be 'vertical' or 'horizontal'");
  sys.line.offset = sc.get_double_or("system.offset", 0.0);
  sys.plus = scenario_field(sc, "system.plus");
  sys.minus = scenario_field(sc, "system.minus");
  return sys;
}

}  // namespace pwhs
