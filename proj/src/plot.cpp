#include "frontier/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

namespace frontier {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_estimate(const FrontierEstimate& est, const Dataset& ds) {
  if (est.spec.ddf || est.gamma) throw Error(ErrorKind::unsupported, "plot data is not defined for directional models");
  if (est.n() != ds.n() || est.beta.rows() != ds.n() || est.beta.cols() != ds.m()) {
    throw Error(ErrorKind::invalid_argument, "estimate does not match the dataset");
  }
}

void check_column(const Dataset& ds, Index c) {
  if (c < 0 || c >= ds.m()) {
    throw Error(ErrorKind::invalid_argument, "input column " + std::to_string(c) + " out of range [0, " +
                                                 std::to_string(ds.m()) + ")");
  }
}

struct Tri {
  Index a, b, c;
  double cx, cy, r2;
};

Tri make_tri(const std::vector<std::array<double, 2>>& p, Index a, Index b, Index c) {
  const double ax = p[a][0], ay = p[a][1];
  const double bx = p[b][0] - ax, by = p[b][1] - ay;
  const double cx = p[c][0] - ax, cy = p[c][1] - ay;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const double ux = (cy * b2 - by * c2) / d;
  const double uy = (bx * c2 - cx * b2) / d;
  return {a, b, c, ax + ux, ay + uy, ux * ux + uy * uy};
}

}  // namespace

double envelope_value(const FrontierEstimate& est, const VectorXd& x) {
  if (est.spec.ddf || est.gamma) throw Error(ErrorKind::unsupported, "envelope is not defined for directional models");
  if (x.size() != est.beta.cols()) throw Error(ErrorKind::invalid_argument, "envelope point has the wrong dimension");
  const VectorXd planes = est.alpha + est.beta * x;
  return est.spec.fun == FunctionType::production ? planes.minCoeff() : planes.maxCoeff();
}

CurveData emit_curve_2d(const FrontierEstimate& est, const Dataset& ds, Index column) {
  check_estimate(est, ds);
  check_column(ds, column);
  CurveData out;
  std::map<double, std::pair<double, int>> merged;
  for (Index i = 0; i < ds.n(); ++i) {
    const double xv = ds.x(i, column);
    const double fv = envelope_value(est, ds.x.row(i).transpose());
    auto& slot = merged[xv];
    slot.first += fv;
    slot.second += 1;
    out.obs_x.push_back(xv);
    out.obs_y.push_back(ds.y(i, 0));
  }
  for (const auto& [xv, acc] : merged) {
    out.x.push_back(xv);
    out.fitted.push_back(acc.first / acc.second);
  }
  return out;
}

std::vector<std::array<double, 2>> envelope_grid(const FrontierEstimate& est, const Dataset& ds, Index column,
                                                 Index points) {
  check_estimate(est, ds);
  check_column(ds, column);
  if (points < 2) throw Error(ErrorKind::invalid_argument, "envelope grid needs at least 2 points");
  VectorXd at = ds.x.colwise().mean().transpose();
  const double lo = ds.x.col(column).minCoeff(), hi = ds.x.col(column).maxCoeff();
  std::vector<std::array<double, 2>> rows;
  for (Index k = 0; k < points; ++k) {
    at[column] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    rows.push_back({at[column], envelope_value(est, at)});
  }
  return rows;
}

std::vector<std::array<Index, 3>> delaunay(const std::vector<std::array<double, 2>>& input) {
  const Index n = static_cast<Index>(input.size());
  if (n < 3) throw Error(ErrorKind::geometry, "triangulation needs at least 3 distinct points");
  double minx = input[0][0], maxx = minx, miny = input[0][1], maxy = miny;
  for (const auto& q : input) {
    minx = std::min(minx, q[0]);
    maxx = std::max(maxx, q[0]);
    miny = std::min(miny, q[1]);
    maxy = std::max(maxy, q[1]);
  }
  const double scale = std::max(maxx - minx, maxy - miny);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorKind::geometry, "points are coincident");
  std::vector<std::array<double, 2>> p(static_cast<std::size_t>(n) + 3);
  for (Index i = 0; i < n; ++i) p[i] = {(input[i][0] - minx) / scale, (input[i][1] - miny) / scale};

  // Collinearity: every point on the line through p0 and the farthest point.
  Index far = 0;
  double best = -1.0;
  for (Index i = 1; i < n; ++i) {
    const double d = std::hypot(p[i][0] - p[0][0], p[i][1] - p[0][1]);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  double area = 0.0;
  for (Index i = 1; i < n; ++i) {
    area = std::max(area, std::abs((p[far][0] - p[0][0]) * (p[i][1] - p[0][1]) -
                                   (p[far][1] - p[0][1]) * (p[i][0] - p[0][0])));
  }
  if (area <= 1e-12) throw Error(ErrorKind::geometry, "points are collinear; no triangle can be formed");

  const double big = 1e3;
  p[n] = {0.5 - big, 0.5 - big};
  p[n + 1] = {0.5 + big, 0.5 - big};
  p[n + 2] = {0.5, 0.5 + big};
  std::vector<Tri> tris{make_tri(p, n, n + 1, n + 2)};
  for (Index i = 0; i < n; ++i) {
    std::vector<std::array<Index, 2>> edges;
    std::vector<Tri> keep;
    keep.reserve(tris.size());
    for (const Tri& t : tris) {
      const double dx = p[i][0] - t.cx, dy = p[i][1] - t.cy;
      if (dx * dx + dy * dy < t.r2) {
        edges.push_back({t.a, t.b});
        edges.push_back({t.b, t.c});
        edges.push_back({t.c, t.a});
      } else {
        keep.push_back(t);
      }
    }
    // Boundary of the cavity: edges not shared by two removed triangles.
    for (std::size_t e = 0; e < edges.size(); ++e) {
      bool shared = false;
      for (std::size_t f = 0; f < edges.size() && !shared; ++f) {
        shared = f != e && edges[f][0] == edges[e][1] && edges[f][1] == edges[e][0];
      }
      if (!shared) keep.push_back(make_tri(p, edges[e][0], edges[e][1], i));
    }
    tris.swap(keep);
  }

  std::vector<std::array<Index, 3>> out;
  for (const Tri& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    std::array<Index, 3> tri{t.a, t.b, t.c};
    const double cross = (p[t.b][0] - p[t.a][0]) * (p[t.c][1] - p[t.a][1]) -
                         (p[t.b][1] - p[t.a][1]) * (p[t.c][0] - p[t.a][0]);
    if (cross == 0.0) continue;
    if (cross < 0.0) std::swap(tri[1], tri[2]);
    // Canonical order: smallest index first, rotation preserves orientation.
    std::rotate(tri.begin(), std::min_element(tri.begin(), tri.end()), tri.end());
    out.push_back(tri);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SurfaceData emit_surface_3d(const FrontierEstimate& est, const Dataset& ds, Index column1, Index column2,
                            Index grid_n) {
  check_estimate(est, ds);
  check_column(ds, column1);
  check_column(ds, column2);
  if (column1 == column2) throw Error(ErrorKind::invalid_argument, "surface needs two distinct input columns");
  if (grid_n < 0 || grid_n == 1) throw Error(ErrorKind::invalid_argument, "grid size must be 0 or at least 2");

  SurfaceData out;
  std::map<std::pair<double, double>, Index> seen;
  std::vector<std::array<double, 2>> pts;
  for (Index i = 0; i < ds.n(); ++i) {
    const double a = ds.x(i, column1), b = ds.x(i, column2);
    out.observations.push_back({a, b, ds.y(i, 0)});
    if (!seen.emplace(std::pair(a, b), static_cast<Index>(pts.size())).second) continue;
    pts.push_back({a, b});
    out.vertices.push_back({a, b, envelope_value(est, ds.x.row(i).transpose())});
  }
  out.triangles = delaunay(pts);
  if (grid_n >= 2) {
    double lo1 = pts[0][0], hi1 = lo1, lo2 = pts[0][1], hi2 = lo2;
    for (const auto& q : pts) {
      lo1 = std::min(lo1, q[0]);
      hi1 = std::max(hi1, q[0]);
      lo2 = std::min(lo2, q[1]);
      hi2 = std::max(hi2, q[1]);
    }
    for (Index a = 0; a < grid_n; ++a) {
      for (Index b = 0; b < grid_n; ++b) {
        const double g1 = lo1 + (hi1 - lo1) * static_cast<double>(a) / static_cast<double>(grid_n - 1);
        const double g2 = lo2 + (hi2 - lo2) * static_cast<double>(b) / static_cast<double>(grid_n - 1);
        if (const auto z = interpolate(out, g1, g2)) out.grid.push_back({g1, g2, *z});
      }
    }
  }
  return out;
}

std::optional<double> interpolate(const SurfaceData& s, double x1, double x2) {
  for (const auto& t : s.triangles) {
    const auto& a = s.vertices[t[0]];
    const auto& b = s.vertices[t[1]];
    const auto& c = s.vertices[t[2]];
    const double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if (det == 0.0) continue;
    const double l1 = ((x1 - a[0]) * (c[1] - a[1]) - (x2 - a[1]) * (c[0] - a[0])) / det;
    const double l2 = ((b[0] - a[0]) * (x2 - a[1]) - (b[1] - a[1]) * (x1 - a[0])) / det;
    const double l0 = 1.0 - l1 - l2;
    const double eps = -1e-12;
    if (l0 >= eps && l1 >= eps && l2 >= eps) return l0 * a[2] + l1 * b[2] + l2 * c[2];
  }
  return std::nullopt;
}

void write_curve_csv(std::ostream& out, const CurveData& c) {
  out << "x,fitted\n";
  for (std::size_t k = 0; k < c.x.size(); ++k) out << fmt(c.x[k]) << ',' << fmt(c.fitted[k]) << '\n';
}

void write_curve_scatter_csv(std::ostream& out, const CurveData& c) {
  out << "x,y\n";
  for (std::size_t k = 0; k < c.obs_x.size(); ++k) out << fmt(c.obs_x[k]) << ',' << fmt(c.obs_y[k]) << '\n';
}

void write_envelope_csv(std::ostream& out, const std::vector<std::array<double, 2>>& rows) {
  out << "x,envelope\n";
  for (const auto& r : rows) out << fmt(r[0]) << ',' << fmt(r[1]) << '\n';
}

void write_vertices_csv(std::ostream& out, const SurfaceData& s) {
  out << "vertex,x1,x2,z\n";
  for (std::size_t k = 0; k < s.vertices.size(); ++k) {
    out << k << ',' << fmt(s.vertices[k][0]) << ',' << fmt(s.vertices[k][1]) << ',' << fmt(s.vertices[k][2]) << '\n';
  }
}

void write_triangles_csv(std::ostream& out, const SurfaceData& s) {
  out << "triangle,v0,v1,v2\n";
  for (std::size_t k = 0; k < s.triangles.size(); ++k) {
    out << k << ',' << s.triangles[k][0] << ',' << s.triangles[k][1] << ',' << s.triangles[k][2] << '\n';
  }
}

void write_surface_scatter_csv(std::ostream& out, const SurfaceData& s) {
  out << "x1,x2,y\n";
  for (const auto& o : s.observations) out << fmt(o[0]) << ',' << fmt(o[1]) << ',' << fmt(o[2]) << '\n';
}

void write_grid_csv(std::ostream& out, const SurfaceData& s) {
  out << "x1,x2,z\n";
  for (const auto& g : s.grid) out << fmt(g[0]) << ',' << fmt(g[1]) << ',' << fmt(g[2]) << '\n';
}

void write_gnuplot_script(std::ostream& out, const std::string& prefix, bool surface) {
  out << "set datafile separator ','\n"
      << "set key top left\n";
  if (!surface) {
    out << "set xlabel 'x'\nset ylabel 'y'\n"
        << "plot '" << prefix << "_curve_scatter.csv' skip 1 using 1:2 with points pt 7 ps 0.5 title 'observed', \\\n"
        << "     '" << prefix << "_curve.csv' skip 1 using 1:2 with lines lw 2 title 'estimated'\n";
  } else {
    out << "set xlabel 'x1'\nset ylabel 'x2'\nset zlabel 'y'\n"
        << "splot '" << prefix << "_surface_scatter.csv' skip 1 using 1:2:3 with points pt 7 ps 0.5 title 'observed', \\\n"
        << "      '" << prefix << "_vertices.csv' skip 1 using 2:3:4 with points pt 1 ps 0.5 title 'estimated'\n";
  }
  out << "pause -1\n";
}

}  // namespace frontier
