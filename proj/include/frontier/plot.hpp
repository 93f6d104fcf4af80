#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frontier/dataset.hpp"
#include "frontier/model.hpp"

namespace frontier {

/// Fitted curve over one input. Observations sharing the same input value
/// are merged (mean of their fitted values) so that x is strictly increasing.
struct CurveData {
  std::vector<double> x;
  std::vector<double> fitted;
  std::vector<double> obs_x;  // scatter, observation order
  std::vector<double> obs_y;
};

struct SurfaceData {
  std::vector<std::array<double, 3>> vertices;  // x1, x2, fitted height
  std::vector<std::array<Index, 3>> triangles;  // counter-clockwise
  std::vector<std::array<double, 3>> observations;  // x1, x2, y
  std::vector<std::array<double, 3>> grid;          // interpolated x1, x2, z inside the hull
};

/// Lower (production) or upper (cost) envelope of the estimated hyperplanes
/// at an input point. Not defined for directional models.
double envelope_value(const FrontierEstimate& est, const VectorXd& x);

CurveData emit_curve_2d(const FrontierEstimate& est, const Dataset& ds, Index column);

/// Envelope along `points` equally spaced values of one input, the other
/// inputs held at their sample means. Rows: input value, envelope.
std::vector<std::array<double, 2>> envelope_grid(const FrontierEstimate& est, const Dataset& ds, Index column,
                                                 Index points);

/// Delaunay triangulation (Bowyer-Watson) of the distinct observed
/// (x1, x2) points. Duplicated points keep the first observation.
std::vector<std::array<Index, 3>> delaunay(const std::vector<std::array<double, 2>>& points);

/// Triangulated surface of fitted values over two inputs plus a
/// grid_n x grid_n grid of linear interpolants (grid_n = 0 skips the grid).
SurfaceData emit_surface_3d(const FrontierEstimate& est, const Dataset& ds, Index column1, Index column2,
                            Index grid_n);

/// Linear interpolation inside the triangulation; empty outside the hull.
std::optional<double> interpolate(const SurfaceData& s, double x1, double x2);

// CSV writers. Column orders:
//   curve:     x,fitted
//   scatter:   x,y               (curve) or x1,x2,y (surface)
//   vertices:  vertex,x1,x2,z
//   triangles: triangle,v0,v1,v2
//   grid:      x1,x2,z
void write_curve_csv(std::ostream& out, const CurveData& c);
void write_curve_scatter_csv(std::ostream& out, const CurveData& c);
void write_envelope_csv(std::ostream& out, const std::vector<std::array<double, 2>>& rows);
void write_vertices_csv(std::ostream& out, const SurfaceData& s);
void write_triangles_csv(std::ostream& out, const SurfaceData& s);
void write_surface_scatter_csv(std::ostream& out, const SurfaceData& s);
void write_grid_csv(std::ostream& out, const SurfaceData& s);

/// Generic gnuplot script plotting the files written next to it.
void write_gnuplot_script(std::ostream& out, const std::string& prefix, bool surface);

}  // namespace frontier
