#pragma once

#include <optional>

#include "nlac/grid.hpp"
#include "nlac/potential.hpp"

namespace nlac {

/// A circle (2D) or sphere (3D) on the torus with its tubular half-width.
struct InterfaceSpec {
  int dim = 2;
  Point center{0.0, 0.0, 0.0};
  double radius0 = 1.0;
  double delta0 = 0.45;
};

/// delta0 = 0.45 min(R0, pi - R0), the largest round default that keeps the
/// 2 delta0 tube strictly inside one fundamental domain.
double default_delta0(double radius0);

/// Validates and builds an interface. Throws InvalidArgument unless the center
/// lies in (-pi, pi)^dim, R0 lies in (0, pi) and 2 delta0 < min(R0, pi - R0).
InterfaceSpec make_interface(int dim, double radius0, std::optional<double> delta0 = std::nullopt,
                             Point center = {0.0, 0.0, 0.0});

/// Periodic displacement x - center wrapped into (-pi, pi] per axis.
Point wrapped_offset(const Point& x, const InterfaceSpec& spec);

/// |x - center| - radius, positive outside.
double signed_distance(const Point& x, const InterfaceSpec& spec, double radius);

/// Cutoff that is 1 on |s| <= 1, 0 on |s| >= 2, with a quintic smoothstep between.
double tube_cutoff(double s);

/// Leading-order diffuse interface zeta(r/delta0) theta0(r/eps) + (1 - zeta(r/delta0)) sign(r)
/// around a circle or sphere of the given radius.
///
/// Throws InvalidArgument if eps > delta0 / 4, if the grid dimension differs
/// from the interface's, or if radius + 2 delta0 >= pi.
Field approximate_solution(const TorusGrid& grid, const InterfaceSpec& spec, double radius,
                           double epsilon, const PotentialSpec& potential);

/// Time at which the mean curvature flow shrinks the interface to a point:
/// R0^2 / (2 (dim - 1)).
double mcf_collapse_time(const InterfaceSpec& spec);

/// R(t) = sqrt(R0^2 - 2 (dim - 1) t), mean curvature taken as the sum of
/// principal curvatures. Throws InvalidArgument for t < 0 or t at/after collapse.
double mcf_radius(const InterfaceSpec& spec, double t);

/// Mean zero-crossing distance of `field` along rays from the center: 360
/// rays in 2D, the 26 lattice directions in 3D. Rays are sampled every grid
/// spacing with periodic cubic interpolation and the crossing is located
/// linearly between samples. Throws NumericalError naming the first ray with
/// no sign change.
double extract_radius(const Field& field, const InterfaceSpec& spec);

}  // namespace nlac
