#pragma once

// Deterministic CSV and SVG output.  All numbers are formatted with "%.12g"
// via snprintf so repeated runs produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "pwhs/errors.hpp"
#include "pwhs/flow.hpp"
#include "pwhs/switching.hpp"

namespace pwhs {

inline std::string fmt_num(double v) {
  char buf[40];
  if (v == 0.0) v = 0.0;  // normalize -0
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline const char* to_string(OrbitMode m) {
  switch (m) {
    case OrbitMode::RegularPlus: return "plus";
    case OrbitMode::RegularMinus: return "minus";
    case OrbitMode::Sliding: return "sliding";
  }
  return "?";
}

using CsvRow = std::vector<std::string>;

inline void write_csv(const std::string& path, const CsvRow& header,
                      const std::vector<CsvRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open output file " + path);
  auto emit = [&](const CsvRow& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  emit(header);
  for (const CsvRow& r : rows) emit(r);
  if (!out) throw IoFailure("write failed for " + path);
}

inline std::vector<CsvRow> region_rows(const RegionReport& rep) {
  std::vector<CsvRow> rows;
  for (const RegionSegment& s : rep.segments)
    rows.push_back({"segment", fmt_num(s.lo), fmt_num(s.hi), to_string(s.cls)});
  for (double t : rep.tangency_points)
    rows.push_back({"tangency", fmt_num(t), fmt_num(t), "tangency"});
  for (double t : rep.singular_points)
    rows.push_back({"singular", fmt_num(t), fmt_num(t), "singular"});
  return rows;
}

inline void write_region_csv(const std::string& path, const RegionReport& rep) {
  write_csv(path, {"kind", "lo", "hi", "class"}, region_rows(rep));
}

inline void write_trajectories_csv(const std::string& path,
                                   const std::vector<Trajectory>& trajs) {
  std::vector<CsvRow> rows;
  for (size_t i = 0; i < trajs.size(); ++i)
    for (const TrajectoryPoint& p : trajs[i].points)
      rows.push_back({std::to_string(i), fmt_num(p.t), fmt_num(p.z.real()),
                      fmt_num(p.z.imag()), to_string(p.mode)});
  write_csv(path, {"orbit", "t", "x", "y", "mode"}, rows);
}

inline void write_polyline_csv(const std::string& path, const std::vector<Complex>& pts) {
  std::vector<CsvRow> rows;
  for (const Complex& z : pts) rows.push_back({fmt_num(z.real()), fmt_num(z.imag())});
  write_csv(path, {"x", "y"}, rows);
}

// ---------------------------------------------------------------------------
// SVG.  Mathematical orientation: y grows upward.  The viewbox is the data
// bounding box padded by 5% per side.

namespace detail {

struct SvgBounds {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  bool empty = true;
  void add(Complex z) {
    if (empty) {
      x_lo = x_hi = z.real();
      y_lo = y_hi = z.imag();
      empty = false;
    } else {
      x_lo = std::min(x_lo, z.real());
      x_hi = std::max(x_hi, z.real());
      y_lo = std::min(y_lo, z.imag());
      y_hi = std::max(y_hi, z.imag());
    }
  }
  void pad() {
    double dx = x_hi - x_lo, dy = y_hi - y_lo;
    if (dx <= 0) dx = 1;
    if (dy <= 0) dy = 1;
    x_lo -= 0.05 * dx;
    x_hi += 0.05 * dx;
    y_lo -= 0.05 * dy;
    y_hi += 0.05 * dy;
  }
};

inline const char* region_color(RegionClass c) {
  switch (c) {
    case RegionClass::Sewing: return "#999999";
    case RegionClass::SlidingAttract: return "#1f77b4";
    case RegionClass::SlidingRepel: return "#d62728";
    case RegionClass::Tangency: return "#000000";
  }
  return "#000000";
}

}  // namespace detail

/// Phase portrait: orbit polylines plus the classified switching line.  The
/// y axis is flipped into SVG coordinates so the picture is y-up.
inline void write_portrait_svg(const std::string& path, const PWSystem& sys,
                               const std::vector<Trajectory>& trajs,
                               const RegionReport* regions = nullptr) {
  detail::SvgBounds b;
  for (const Trajectory& tr : trajs)
    for (const TrajectoryPoint& p : tr.points) b.add(p.z);
  if (regions) {
    for (const RegionSegment& s : regions->segments) {
      b.add(sys.line.point_at(s.lo));
      b.add(sys.line.point_at(s.hi));
    }
  }
  if (b.empty) b.add({0, 0});
  b.pad();

  const double W = 800.0;
  double H = W * (b.y_hi - b.y_lo) / (b.x_hi - b.x_lo);
  auto X = [&](double x) { return (x - b.x_lo) / (b.x_hi - b.x_lo) * W; };
  auto Y = [&](double y) { return (b.y_hi - y) / (b.y_hi - b.y_lo) * H; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open output file " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_num(W)
      << "\" height=\"" << fmt_num(H) << "\" viewBox=\"0 0 " << fmt_num(W) << " "
      << fmt_num(H) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (regions) {
    for (const RegionSegment& s : regions->segments) {
      Complex p0 = sys.line.point_at(s.lo);
      Complex p1 = sys.line.point_at(s.hi);
      out << "<line x1=\"" << fmt_num(X(p0.real())) << "\" y1=\"" << fmt_num(Y(p0.imag()))
          << "\" x2=\"" << fmt_num(X(p1.real())) << "\" y2=\"" << fmt_num(Y(p1.imag()))
          << "\" stroke=\"" << detail::region_color(s.cls)
          << "\" stroke-width=\"3\"/>\n";
    }
    for (double tpt : regions->tangency_points) {
      Complex p = sys.line.point_at(tpt);
      out << "<circle cx=\"" << fmt_num(X(p.real())) << "\" cy=\"" << fmt_num(Y(p.imag()))
          << "\" r=\"4\" fill=\"black\"/>\n";
    }
    for (double spt : regions->singular_points) {
      Complex p = sys.line.point_at(spt);
      out << "<circle cx=\"" << fmt_num(X(p.real())) << "\" cy=\"" << fmt_num(Y(p.imag()))
          << "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
    }
  }

  static const char* orbit_colors[] = {"#2ca02c", "#ff7f0e", "#9467bd",
                                       "#8c564b", "#17becf", "#e377c2"};
  for (size_t i = 0; i < trajs.size(); ++i) {
    out << "<polyline fill=\"none\" stroke=\"" << orbit_colors[i % 6]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const TrajectoryPoint& p : trajs[i].points)
      out << fmt_num(X(p.z.real())) << "," << fmt_num(Y(p.z.imag())) << " ";
    out << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoFailure("write failed for " + path);
}

/// Closed curve (cycle or homoclinic loop) as a standalone SVG.
inline void write_curve_svg(const std::string& path, const std::vector<Complex>& pts,
                            const PWSystem* sys = nullptr) {
  std::vector<Trajectory> trajs(1);
  for (const Complex& z : pts) trajs[0].points.push_back({0.0, z, OrbitMode::RegularPlus});
  PWSystem dummy;
  write_portrait_svg(path, sys ? *sys : dummy, trajs, nullptr);
}

}  // namespace pwhs
