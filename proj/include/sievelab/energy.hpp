#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "sievelab/mesh.hpp"

namespace sievelab {

// Bulk integrand f(xi) = (xi . A xi)^{p/2} with A symmetric positive
// definite. Then lambda*|xi|^p <= f(xi) <= Lambda*|xi|^p with
// lambda = eig_min(A)^{p/2}, Lambda = eig_max(A)^{p/2}.
struct BulkConfig {
  double p = 2.0;
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();

  double lambda() const;
  double Lambda() const;
  double f(Vec2 xi) const;
  // Exact for p >= 2; for 1 < p < 2 the degenerate point is regularized:
  // df = p*(eps^2 + xi.A xi)^{(p-2)/2} * A xi with eps = 1e-8.
  Vec2 df(Vec2 xi) const;
  void validate() const;
};

// Lower-order integrand g(x, s) = |s - h(x)|^q. The datum h is either a
// closed form of (x, y) or a nodal field on the mesh (exactly one set).
struct LowerOrderConfig {
  double q = 2.0;
  std::function<double(double, double)> h;
  std::vector<double> h_nodal;

  void validate() const;
};

// Finite arc-length measure description on the interface: weighted arcs
// plus a default for uncovered parameter ranges. Weights are 0 (free),
// finite positive (penalized) or +infinity (tied).
struct WeightedArc {
  ArcInterval span;
  double weight = 0.0;
};

struct InterfaceMeasure {
  double default_weight = std::numeric_limits<double>::infinity();
  std::vector<WeightedArc> pieces;

  double weight_at(double s) const;
  void validate(double interface_length) const;
};

// Sum over active triangles of area * f(grad u).
double bulk_energy(const Field& u, const BulkConfig& bulk);

// Sum over edges of weight * edge-quadrature of [u]^p, where [u] is the
// linear interpolant of the nodewise jumps (2-point Gauss, exact for p=2).
// Returns nullopt (INFEASIBLE) if an infinite-weight edge is not tied by
// the field's coupling. Zero-weight edges contribute nothing.
std::optional<double> jump_energy(const Field& u, const InterfaceMeasure& mu, double p);

// Sum over active triangles of the 3-point edge-midpoint rule applied to
// |u - h|^q (exact for q = 2 with piecewise-linear u and h).
double lower_order_energy(const Field& u, const LowerOrderConfig& low);

struct EnergyGradient {
  double value = 0.0;
  Eigen::VectorXd grad;
};

// Total energy bulk + jump + lower with its exact gradient with respect to
// the active coefficients. mu may be null (perforated problems: no jump
// term). Returns nullopt when the jump term is infeasible.
std::optional<EnergyGradient> total_energy_and_gradient(const Field& u, const BulkConfig& bulk,
                                                        const InterfaceMeasure* mu,
                                                        const LowerOrderConfig& low);

// L^q distance between two fields on the same mesh (edge-midpoint rule),
// over triangles active in both couplings.
double lq_distance(const Field& a, const Field& b, double q);

}  // namespace sievelab
