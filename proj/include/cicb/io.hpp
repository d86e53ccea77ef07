#pragma once

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cicb/channel.hpp"
#include "cicb/constraints.hpp"
#include "cicb/det_oracle.hpp"
#include "cicb/errors.hpp"
#include "cicb/gap.hpp"
#include "cicb/polytope.hpp"

namespace cicb {

// All numeric text output uses nine significant digits so identical runs give
// byte-identical files.
inline std::string fmt_g9(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace detail {

struct Token {
  std::string text;
  int col = 0;
};

inline std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
           line[j] != '#')
      ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

inline std::string at(int line, int col) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + ": ";
}

inline double parse_real(const Token& tok, int line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tok.text.c_str(), &end);
  if (tok.text.empty() || end != tok.text.c_str() + tok.text.size() || errno == ERANGE)
    throw parse_error(at(line, tok.col) + "expected a number, got '" + tok.text + "'");
  return v;
}

inline int parse_int(const Token& tok, int line) {
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(tok.text.c_str(), &end, 10);
  if (tok.text.empty() || end != tok.text.c_str() + tok.text.size() || errno == ERANGE ||
      v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw parse_error(at(line, tok.col) + "expected an integer, got '" + tok.text + "'");
  return static_cast<int>(v);
}

inline void need_values(const std::vector<Token>& toks, size_t count, int line) {
  if (toks.size() - 1 != count)
    throw parse_error("line " + std::to_string(line) + ": key '" + toks[0].text + "' takes " +
                      std::to_string(count) + " values, got " +
                      std::to_string(toks.size() - 1));
}

}  // namespace detail

// Gaussian channel file: one key per line, '#' starts a comment.
//   p1 <real>                                   transmit power, user 1
//   p2 <real>                                   transmit power, user 2
//   rx1_state <h11_re> <h11_im> <h21_re> <h21_im>   one receiver-1 state
//   rx2_state <h22_re> <h22_im> <h12_re> <h12_im>   one receiver-2 state
//   joint_state <h11_re> <h11_im> <h21_re> <h21_im> <h12_re> <h12_im> <h22_re> <h22_im>
// Either per-receiver state lines or joint_state lines, not both. The result
// is validated but not canonicalized.
inline CompoundChannel parse_channel(std::istream& in) {
  CompoundChannel ch;
  std::vector<GainState> joint;
  bool have_p1 = false, have_p2 = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0].text;
    if (key == "p1" || key == "p2") {
      detail::need_values(toks, 1, lineno);
      bool& have = key == "p1" ? have_p1 : have_p2;
      if (have)
        throw parse_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      (key == "p1" ? ch.p1 : ch.p2) = detail::parse_real(toks[1], lineno);
      have = true;
    } else if (key == "rx1_state" || key == "rx2_state") {
      detail::need_values(toks, 4, lineno);
      ReceiverState st;
      st.direct = {detail::parse_real(toks[1], lineno), detail::parse_real(toks[2], lineno)};
      st.cross = {detail::parse_real(toks[3], lineno), detail::parse_real(toks[4], lineno)};
      (key == "rx1_state" ? ch.rx1 : ch.rx2).push_back(st);
    } else if (key == "joint_state") {
      detail::need_values(toks, 8, lineno);
      GainState g;
      g.h11 = {detail::parse_real(toks[1], lineno), detail::parse_real(toks[2], lineno)};
      g.h21 = {detail::parse_real(toks[3], lineno), detail::parse_real(toks[4], lineno)};
      g.h12 = {detail::parse_real(toks[5], lineno), detail::parse_real(toks[6], lineno)};
      g.h22 = {detail::parse_real(toks[7], lineno), detail::parse_real(toks[8], lineno)};
      joint.push_back(g);
    } else {
      throw parse_error(detail::at(lineno, toks[0].col) + "unknown key '" + key + "'");
    }
  }
  if (!have_p1) throw parse_error("missing required key 'p1'");
  if (!have_p2) throw parse_error("missing required key 'p2'");
  if (!joint.empty()) {
    if (!ch.rx1.empty() || !ch.rx2.empty())
      throw parse_error("joint_state lines cannot be mixed with per-receiver state lines");
    return from_joint(joint, ch.p1, ch.p2);
  }
  validate_channel(ch);
  return ch;
}

inline std::string write_channel(const CompoundChannel& ch) {
  std::string out;
  out += "p1 " + fmt_g9(ch.p1) + "\n";
  out += "p2 " + fmt_g9(ch.p2) + "\n";
  auto states = [&out](const char* key, const std::vector<ReceiverState>& list) {
    for (const auto& st : list)
      out += std::string(key) + " " + fmt_g9(st.direct.real()) + " " + fmt_g9(st.direct.imag()) +
             " " + fmt_g9(st.cross.real()) + " " + fmt_g9(st.cross.imag()) + "\n";
  };
  states("rx1_state", ch.rx1);
  states("rx2_state", ch.rx2);
  return out;
}

// Deterministic channel plus the input distributions it is evaluated under.
struct DetSpec {
  DetChannel channel;
  DiscreteDist dist;
};

// Deterministic channel file: alphabet sizes first, then the lookup tables.
//   n_states / x1_size / x2_size / s1_size / s2_size / y1_size / y2_size <int>
//   s1_map <x1_size ints>                 interference symbol per own input
//   s2_map <x2_size ints>
//   s1_degrade <s1_size ints>             one line per extra state, in order
//   s2_degrade <s2_size ints>
//   y1_row <state> <x1> <s2_size ints>    output row, states numbered from 0
//   y2_row <state> <x2> <s1_size ints>
//   p1_dist <x1_size reals>               optional, defaults to uniform
//   p2_dist <x2_size reals>
// Structure only; semantic validation stays with validate().
inline DetSpec parse_det_channel(std::istream& in) {
  DetSpec spec;
  DetChannel& ch = spec.channel;
  std::map<std::string, std::pair<int*, bool>> sizes = {
      {"n_states", {&ch.n_states, false}}, {"x1_size", {&ch.nx1, false}},
      {"x2_size", {&ch.nx2, false}},       {"s1_size", {&ch.ns1, false}},
      {"s2_size", {&ch.ns2, false}},       {"y1_size", {&ch.ny1, false}},
      {"y2_size", {&ch.ny2, false}},
  };
  bool tables_open = false;
  std::vector<std::vector<bool>> y1_seen, y2_seen;
  std::string line;
  int lineno = 0;

  auto open_tables = [&](int at_line) {
    if (tables_open) return;
    for (const auto& [key, slot] : sizes) {
      if (!slot.second)
        throw parse_error("line " + std::to_string(at_line) + ": table data before key '" +
                          key + "'");
      if (*slot.first < 1)
        throw parse_error("line " + std::to_string(at_line) + ": key '" + key +
                          "' must be positive");
    }
    ch.y1.assign(ch.n_states, std::vector<std::vector<int>>(ch.nx1, std::vector<int>(ch.ns2, 0)));
    ch.y2.assign(ch.n_states, std::vector<std::vector<int>>(ch.nx2, std::vector<int>(ch.ns1, 0)));
    y1_seen.assign(ch.n_states, std::vector<bool>(ch.nx1, false));
    y2_seen.assign(ch.n_states, std::vector<bool>(ch.nx2, false));
    tables_open = true;
  };
  auto int_list = [&](const std::vector<detail::Token>& toks, size_t first) {
    std::vector<int> vals;
    for (size_t i = first; i < toks.size(); ++i)
      vals.push_back(detail::parse_int(toks[i], lineno));
    return vals;
  };
  auto real_list = [&](const std::vector<detail::Token>& toks, size_t first) {
    std::vector<double> vals;
    for (size_t i = first; i < toks.size(); ++i)
      vals.push_back(detail::parse_real(toks[i], lineno));
    return vals;
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0].text;
    if (auto it = sizes.find(key); it != sizes.end()) {
      if (tables_open)
        throw parse_error("line " + std::to_string(lineno) + ": key '" + key +
                          "' after table data");
      detail::need_values(toks, 1, lineno);
      if (it->second.second)
        throw parse_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      *it->second.first = detail::parse_int(toks[1], lineno);
      it->second.second = true;
    } else if (key == "s1_map" || key == "s2_map") {
      open_tables(lineno);
      auto& map = key == "s1_map" ? ch.s1_of_x1 : ch.s2_of_x2;
      if (!map.empty())
        throw parse_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      detail::need_values(toks, static_cast<size_t>(key == "s1_map" ? ch.nx1 : ch.nx2), lineno);
      map = int_list(toks, 1);
    } else if (key == "s1_degrade" || key == "s2_degrade") {
      open_tables(lineno);
      auto& stages = key == "s1_degrade" ? ch.s1_degrade : ch.s2_degrade;
      if (static_cast<int>(stages.size()) >= ch.n_states - 1)
        throw parse_error("line " + std::to_string(lineno) + ": too many '" + key + "' lines");
      detail::need_values(toks, static_cast<size_t>(key == "s1_degrade" ? ch.ns1 : ch.ns2),
                          lineno);
      stages.push_back(int_list(toks, 1));
    } else if (key == "y1_row" || key == "y2_row") {
      open_tables(lineno);
      const bool first_user = key == "y1_row";
      const int nx = first_user ? ch.nx1 : ch.nx2;
      const int ns = first_user ? ch.ns2 : ch.ns1;
      detail::need_values(toks, static_cast<size_t>(2 + ns), lineno);
      const int state = detail::parse_int(toks[1], lineno);
      const int x = detail::parse_int(toks[2], lineno);
      if (state < 0 || state >= ch.n_states)
        throw parse_error(detail::at(lineno, toks[1].col) + "state index out of range");
      if (x < 0 || x >= nx)
        throw parse_error(detail::at(lineno, toks[2].col) + "input symbol out of range");
      auto& seen = first_user ? y1_seen : y2_seen;
      if (seen[state][x])
        throw parse_error("line " + std::to_string(lineno) + ": duplicate '" + key +
                          "' for state " + std::to_string(state) + ", symbol " +
                          std::to_string(x));
      seen[state][x] = true;
      (first_user ? ch.y1 : ch.y2)[state][x] = int_list(toks, 3);
    } else if (key == "p1_dist" || key == "p2_dist") {
      open_tables(lineno);
      auto& dist = key == "p1_dist" ? spec.dist.p1 : spec.dist.p2;
      if (!dist.empty())
        throw parse_error("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      detail::need_values(toks, static_cast<size_t>(key == "p1_dist" ? ch.nx1 : ch.nx2), lineno);
      dist = real_list(toks, 1);
    } else {
      throw parse_error(detail::at(lineno, toks[0].col) + "unknown key '" + key + "'");
    }
  }
  if (!tables_open) throw parse_error("missing lookup tables");
  if (ch.s1_of_x1.empty()) throw parse_error("missing required key 's1_map'");
  if (ch.s2_of_x2.empty()) throw parse_error("missing required key 's2_map'");
  for (const auto* key : {"s1_degrade", "s2_degrade"}) {
    const auto& stages = std::string(key) == "s1_degrade" ? ch.s1_degrade : ch.s2_degrade;
    if (static_cast<int>(stages.size()) != ch.n_states - 1)
      throw parse_error(std::string("expected ") + std::to_string(ch.n_states - 1) + " '" + key +
                        "' lines, got " + std::to_string(stages.size()));
  }
  for (int state = 0; state < ch.n_states; ++state) {
    for (int x = 0; x < ch.nx1; ++x)
      if (!y1_seen[state][x])
        throw parse_error("y1 table incomplete: missing row for state " + std::to_string(state) +
                          ", symbol " + std::to_string(x));
    for (int x = 0; x < ch.nx2; ++x)
      if (!y2_seen[state][x])
        throw parse_error("y2 table incomplete: missing row for state " + std::to_string(state) +
                          ", symbol " + std::to_string(x));
  }
  if (spec.dist.p1.empty())
    spec.dist.p1.assign(static_cast<size_t>(ch.nx1), 1.0 / ch.nx1);
  if (spec.dist.p2.empty())
    spec.dist.p2.assign(static_cast<size_t>(ch.nx2), 1.0 / ch.nx2);
  return spec;
}

inline std::string write_det_channel(const DetSpec& spec) {
  const DetChannel& ch = spec.channel;
  std::string out;
  auto line_int = [&out](const char* key, const std::vector<int>& vals,
                         const std::vector<int>& prefix = {}) {
    out += key;
    for (int v : prefix) out += " " + std::to_string(v);
    for (int v : vals) out += " " + std::to_string(v);
    out += "\n";
  };
  out += "n_states " + std::to_string(ch.n_states) + "\n";
  out += "x1_size " + std::to_string(ch.nx1) + "\n";
  out += "x2_size " + std::to_string(ch.nx2) + "\n";
  out += "s1_size " + std::to_string(ch.ns1) + "\n";
  out += "s2_size " + std::to_string(ch.ns2) + "\n";
  out += "y1_size " + std::to_string(ch.ny1) + "\n";
  out += "y2_size " + std::to_string(ch.ny2) + "\n";
  line_int("s1_map", ch.s1_of_x1);
  line_int("s2_map", ch.s2_of_x2);
  for (const auto& stage : ch.s1_degrade) line_int("s1_degrade", stage);
  for (const auto& stage : ch.s2_degrade) line_int("s2_degrade", stage);
  for (const auto* key : {"p1_dist", "p2_dist"}) {
    const auto& dist = std::string(key) == "p1_dist" ? spec.dist.p1 : spec.dist.p2;
    out += key;
    for (double v : dist) out += " " + fmt_g9(v);
    out += "\n";
  }
  for (int state = 0; state < ch.n_states; ++state)
    for (int x = 0; x < ch.nx1; ++x) line_int("y1_row", ch.y1[state][x], {state, x});
  for (int state = 0; state < ch.n_states; ++state)
    for (int x = 0; x < ch.nx2; ++x) line_int("y2_row", ch.y2[state][x], {state, x});
  return out;
}

// A deterministic file opens with alphabet sizes; a Gaussian one with powers
// or states. Decided by the first meaningful key.
inline bool is_det_channel_text(std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    return toks[0].text == "n_states";
  }
  throw parse_error("channel file holds no keys");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input_error("cannot open file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input_error("cannot open file " + path + " for writing");
  out << text;
  if (!out.flush()) throw invalid_input_error("failed writing file " + path);
}

// Region CSV: support samples as a,b,c_star rows, then the extracted polygon
// vertices under a '# vertices' section.
inline std::string region_csv(const Region2D& region) {
  std::string out = "a,b,c_star\n";
  for (size_t i = 0; i < region.dirs.size(); ++i)
    out += fmt_g9(region.dirs[i][0]) + "," + fmt_g9(region.dirs[i][1]) + "," +
           fmt_g9(region.support[i]) + "\n";
  out += "# vertices\nR1,R2\n";
  for (const auto& v : region.vertices) out += fmt_g9(v[0]) + "," + fmt_g9(v[1]) + "\n";
  return out;
}

// Same layout with a leading bound column so one file carries both bounds.
inline std::string bounds_csv(const Region2D& inner, const Region2D& outer) {
  std::string out = "bound,a,b,c_star\n";
  auto rows = [&out](const char* bound, const Region2D& region) {
    for (size_t i = 0; i < region.dirs.size(); ++i)
      out += std::string(bound) + "," + fmt_g9(region.dirs[i][0]) + "," +
             fmt_g9(region.dirs[i][1]) + "," + fmt_g9(region.support[i]) + "\n";
  };
  rows("inner", inner);
  rows("outer", outer);
  out += "# vertices\nbound,R1,R2\n";
  auto verts = [&out](const char* bound, const Region2D& region) {
    for (const auto& v : region.vertices)
      out += std::string(bound) + "," + fmt_g9(v[0]) + "," + fmt_g9(v[1]) + "\n";
  };
  verts("inner", inner);
  verts("outer", outer);
  return out;
}

inline std::string write_gap_report(const GapReport& report) {
  char buf[64];
  std::string out;
  auto line = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s %.6f\n", key, v);
    out += buf;
  };
  line("delta1", report.delta1);
  line("delta2", report.delta2);
  line("per_direction_max_gap", report.per_direction_max_gap);
  out += std::string("certified ") + (report.certified ? "true" : "false") + "\n";
  out += "# summary\ndelta1,delta2,per_direction_max_gap,certified\n";
  out += fmt_g9(report.delta1) + "," + fmt_g9(report.delta2) + "," +
         fmt_g9(report.per_direction_max_gap) + "," + (report.certified ? "true" : "false") +
         "\n";
  return out;
}

// Structured dump of a constraint system for golden tests: header lines, then
// one row per constraint carrying the tag, the guard sum, and the rendered
// inequality.
inline std::string dump_constraints(const ConstraintSystem& sys) {
  std::string out = "n_states " + std::to_string(sys.n_states) + "\n";
  out += std::string("form ") +
         (sys.form == RegionForm::projected ? "projected" : "conditional") + "\n";
  for (const auto& row : sys.rows) {
    out += "row " + row.tag + " guard ";
    if (row.guard.empty()) {
      out += "-";
    } else {
      for (size_t i = 0; i < row.guard.size(); ++i) {
        if (i) out += "+";
        out += comp_name(row.guard[i]);
      }
    }
    out += " : " + describe(row) + "\n";
  }
  return out;
}

namespace detail {

inline std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

// Overlay plot of both bounds as polygons. Pure rendering: axis ranges come
// from the outer region extent and nothing computed here feeds back into any
// bound. Degenerate regions (fewer than three vertices) are drawn as dots.
inline std::string region_svg(const Region2D& inner, const Region2D& outer) {
  double ext = 0.0;
  for (const auto* region : {&outer, &inner})
    for (const auto& v : region->vertices) ext = std::max({ext, v[0], v[1]});
  if (ext <= 0.0) ext = 1.0;
  ext *= 1.05;

  const double width = 640.0, height = 520.0;
  const double left = 64.0, right = 24.0, top = 24.0, bottom = 56.0;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto px = [&](double x) { return left + x / ext * plot_w; };
  auto py = [&](double y) { return top + plot_h - y / ext * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt_px(width) +
         "\" height=\"" + detail::fmt_px(height) + "\" viewBox=\"0 0 " + detail::fmt_px(width) +
         " " + detail::fmt_px(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto polygon = [&](const Region2D& region, const char* stroke, const char* fill) {
    if (region.vertices.size() < 3) {
      for (const auto& v : region.vertices)
        out += "<circle cx=\"" + detail::fmt_px(px(v[0])) + "\" cy=\"" +
               detail::fmt_px(py(v[1])) + "\" r=\"3\" fill=\"" + stroke + "\"/>\n";
      return;
    }
    std::string path;
    for (size_t i = 0; i < region.vertices.size(); ++i) {
      path += i ? " L " : "M ";
      path += detail::fmt_px(px(region.vertices[i][0])) + " " +
              detail::fmt_px(py(region.vertices[i][1]));
    }
    path += " Z";
    out += "<path d=\"" + path + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
           "\" stroke-width=\"1.5\"/>\n";
  };
  polygon(outer, "#c0392b", "#f5d0cb");
  polygon(inner, "#2471a3", "#d4e6f1");

  out += "<line x1=\"" + detail::fmt_px(left) + "\" y1=\"" + detail::fmt_px(top + plot_h) +
         "\" x2=\"" + detail::fmt_px(left + plot_w) + "\" y2=\"" + detail::fmt_px(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::fmt_px(left) + "\" y1=\"" + detail::fmt_px(top) + "\" x2=\"" +
         detail::fmt_px(left) + "\" y2=\"" + detail::fmt_px(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = ext * i / 4.0;
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", v);
    out += "<text x=\"" + detail::fmt_px(px(v)) + "\" y=\"" + detail::fmt_px(top + plot_h + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + label + "</text>\n";
    out += "<text x=\"" + detail::fmt_px(left - 8) + "\" y=\"" + detail::fmt_px(py(v) + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + label + "</text>\n";
  }
  out += "<text x=\"" + detail::fmt_px(left + plot_w / 2) + "\" y=\"" +
         detail::fmt_px(height - 12) +
         "\" font-size=\"13\" text-anchor=\"middle\">R1 [bits]</text>\n";
  out += "<text x=\"16\" y=\"" + detail::fmt_px(top + plot_h / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         detail::fmt_px(top + plot_h / 2) + ")\">R2 [bits]</text>\n";
  out += "<rect x=\"" + detail::fmt_px(left + plot_w - 130) + "\" y=\"" + detail::fmt_px(top + 8) +
         "\" width=\"12\" height=\"12\" fill=\"#f5d0cb\" stroke=\"#c0392b\"/>\n";
  out += "<text x=\"" + detail::fmt_px(left + plot_w - 112) + "\" y=\"" +
         detail::fmt_px(top + 18) + "\" font-size=\"12\">outer bound</text>\n";
  out += "<rect x=\"" + detail::fmt_px(left + plot_w - 130) + "\" y=\"" + detail::fmt_px(top + 28) +
         "\" width=\"12\" height=\"12\" fill=\"#d4e6f1\" stroke=\"#2471a3\"/>\n";
  out += "<text x=\"" + detail::fmt_px(left + plot_w - 112) + "\" y=\"" +
         detail::fmt_px(top + 38) + "\" font-size=\"12\">inner bound</text>\n";
  out += "</svg>\n";
  return out;
}

}  // namespace cicb
