#pragma once

// Text formats.
//
// Every CSV file starts with a header block of '#' lines
//
//   # trirg <kind>
//   # version <semver>
//   # config_hash fnv1a64:<16 hex digits>
//   # base <2|e>
//
// followed by one column-name line and the data rows. Numbers are written
// with printf "%.12g"; missing values as "nan".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "trirg/error.hpp"
#include "trirg/experiment.hpp"
#include "trirg/scaling.hpp"

#ifndef TRIRG_VERSION
#define TRIRG_VERSION "0.0.0"
#endif

namespace trirg::io {

inline constexpr const char* kVersion = TRIRG_VERSION;

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of a canonical key=value rendering (keys sorted by std::map).
inline std::string config_hash(const std::map<std::string, std::string>& config) {
  std::string canon;
  for (const auto& [k, v] : config) canon += k + "=" + v + "\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

inline std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct Header {
  std::string kind;
  std::string hash;
  std::string base = "2";
};

inline void write_header(std::ostream& os, const Header& h) {
  os << "# trirg " << h.kind << "\n"
     << "# version " << kVersion << "\n"
     << "# config_hash " << h.hash << "\n"
     << "# base " << h.base << "\n";
}

inline void write_scan(std::ostream& os, const Header& h, const std::vector<experiment::ScanRow>& rows) {
  write_header(os, h);
  os << "u0,level,N,E_bb,E_b7,E_avg,E_single,gap,base,status\n";
  for (const auto& r : rows) {
    os << num(r.u0) << ',' << r.level << ',' << num(r.N) << ',' << num(r.E_bb) << ',' << num(r.E_b7) << ','
       << num(r.E_avg) << ',' << num(r.E_single) << ',' << num(r.gap) << ',' << h.base << ',' << r.status << '\n';
  }
}

inline void write_curves(std::ostream& os, const Header& h, const std::vector<experiment::ScanRow>& rows,
                         experiment::Observable o) {
  write_header(os, h);
  os << "observable,u,N,E\n";
  for (const auto& r : rows) {
    if (!r.ok()) continue;
    os << experiment::to_string(o) << ',' << num(r.u0) << ',' << num(r.N) << ',' << num(r.value(o)) << '\n';
  }
}

inline void write_block_size(std::ostream& os, const Header& h, const std::vector<experiment::BlockSizeRow>& rows) {
  write_header(os, h);
  os << "u0,total_level,block_level,block_size,E,base,status\n";
  for (const auto& r : rows) {
    os << num(r.u0) << ',' << r.total_level << ',' << r.block_level << ',' << num(r.block_size) << ',' << num(r.E)
       << ',' << h.base << ',' << r.status << '\n';
  }
}

inline void write_master_curve(std::ostream& os, const Header& h, const std::vector<scaling::EntanglementCurve>& curves,
                               const scaling::CollapseParams& p) {
  write_header(os, h);
  os << "observable,N,x,y\n";
  for (const auto& m : scaling::master_curve(curves, p)) {
    os << curves[m.curve].observable << ',' << num(m.N) << ',' << num(m.x) << ',' << num(m.y) << '\n';
  }
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_double(const std::string& s, std::size_t line, const char* field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("line " + std::to_string(line) + ": cannot parse " + field + " '" + s + "'");
  }
}

/// Reads an "observable,u,N,E" file into one curve per (observable, N).
/// Only rows whose observable matches `observable` are kept (all rows if
/// it is empty).
inline std::vector<scaling::EntanglementCurve> read_curves(std::istream& is, const std::string& observable = "") {
  std::string line;
  std::size_t lineno = 0;
  bool have_columns = false;
  std::vector<scaling::EntanglementCurve> curves;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!have_columns) {
      if (split(line) != std::vector<std::string>{"observable", "u", "N", "E"}) {
        throw ValidationError("line " + std::to_string(lineno) + ": expected column header 'observable,u,N,E'");
      }
      have_columns = true;
      continue;
    }
    const auto f = split(line);
    if (f.size() != 4) {
      throw ValidationError("line " + std::to_string(lineno) + ": expected 4 fields, got " + std::to_string(f.size()));
    }
    if (!observable.empty() && f[0] != observable) continue;
    const double u = parse_double(f[1], lineno, "u");
    const double N = parse_double(f[2], lineno, "N");
    const double E = parse_double(f[3], lineno, "E");
    if (!(N > 0.0)) throw ValidationError("line " + std::to_string(lineno) + ": N must be positive");
    if (!std::isfinite(u) || !std::isfinite(E)) {
      throw ValidationError("line " + std::to_string(lineno) + ": non-finite value");
    }
    auto it = std::find_if(curves.begin(), curves.end(),
                           [&](const auto& c) { return c.observable == f[0] && c.N == N; });
    if (it == curves.end()) {
      scaling::EntanglementCurve c;
      c.observable = f[0];
      c.N = N;
      const long long lv = std::llround(std::log(N) / std::log(7.0)) - 1;
      c.level = lv > 0 ? static_cast<std::size_t>(lv) : 0;
      curves.push_back(c);
      it = std::prev(curves.end());
    }
    if (std::find(it->u.begin(), it->u.end(), u) != it->u.end()) {
      throw ValidationError("line " + std::to_string(lineno) + ": repeated u within a curve");
    }
    it->u.push_back(u);
    it->E.push_back(E);
  }
  if (!have_columns) throw ValidationError("curves file: missing column header");
  std::sort(curves.begin(), curves.end(), [](const auto& a, const auto& b) { return a.N < b.N; });
  for (auto& c : curves) c.sort_by_u();
  return curves;
}

inline std::vector<scaling::EntanglementCurve> read_curves_file(const std::string& path,
                                                                const std::string& observable = "") {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_curves(in, observable);
}

/// Minimal key=value config reader: '#' starts a comment, blank lines are
/// ignored, whitespace around keys and values is trimmed.
inline std::map<std::string, std::string> read_key_values(std::istream& is) {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace trirg::io
