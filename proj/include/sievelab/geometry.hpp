#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sievelab/util.hpp"

namespace sievelab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::sqrt(dot(v, v)); }

// Axis-aligned bounding rectangle of the computational domain.
struct Domain {
  double xmin = 0.0, xmax = 1.0;
  double ymin = 0.0, ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  void validate() const {
    if (!(xmax > xmin) || !(ymax > ymin)) throw GeometryError("domain: empty rectangle");
  }
};

// Scale law for sieve parameters: c*j^-a (power) or c*exp(-a*j) (exp).
// Positive and nonincreasing in j.
struct DecayLaw {
  enum class Form { Power, Exp };
  double c = 0.0;
  double a = 0.0;
  Form form = Form::Power;

  double at(int j) const {
    if (j < 1) throw GeometryError("decay law: index j must be >= 1");
    return form == Form::Power ? c * std::pow(static_cast<double>(j), -a)
                               : c * std::exp(-a * static_cast<double>(j));
  }
  void validate(const std::string& key) const {
    if (!(c > 0.0)) throw GeometryError("decay law " + key + ".c must be positive");
    if (!(a >= 0.0)) throw GeometryError("decay law " + key + ".a must be nonnegative");
  }
};

// Interface M: piecewise-linear graph over a straight base segment.
// The base segment has center x0, half-width r0, unit tangent and unit
// normal nu0; the profile phi is sampled at uniform stations along the base
// and offsets points by phi*nu0. Orientation is canonical: nu0 is the left
// normal of the oriented base flipped so that nu0.y > 0, or nu0.y == 0 and
// nu0.x > 0; the tangent is rot(nu0, -90deg) and the stored endpoints satisfy
// b - a || tangent. The plus side of the interface is the side nu0 points to.
struct Interface {
  Vec2 a, b;                    // canonical base segment endpoints
  Vec2 center;                  // x0 (after profile re-centering)
  Vec2 tangent, normal;         // unit vectors, right-handed pair
  double half_width = 0.0;      // r0
  std::vector<double> profile;  // phi at uniform base stations, phi(center)=0
  std::vector<Vec2> points;     // polyline vertices of M
  std::vector<double> arclen;   // cumulative arc length, arclen[0]=0
  bool test_mode = false;       // endpoints allowed on the domain boundary

  double length() const { return arclen.back(); }
  bool flat() const;
  // Point on M at arc-length coordinate s in [0, length()].
  Vec2 point_at(double s) const;
  // Base coordinate beta in [0, 2*r0] -> arc-length coordinate.
  double arc_of_base(double beta) const;
  // phi evaluated at base coordinate beta (clamped to [0, 2*r0]).
  double profile_at_base(double beta) const;
};

// profile: phi samples at uniform stations along the base, including both
// endpoints (empty or {0,...,0} means flat). Values must stay in
// (-r0/4, r0/4), also after the re-centering that enforces phi(center)=0.
Interface build_interface(Vec2 a, Vec2 b, const std::vector<double>& profile = {},
                          bool test_mode = false);

// Open strip S_rho = { xbar + r*nu0 : |r - phi(xbar)| < rho } together with
// its boundary translates Sigma_rho^{+-} = M +- rho*nu0.
struct StripRegion {
  double rho = 0.0;
  std::vector<Vec2> plus;     // Sigma_rho^+ polyline
  std::vector<Vec2> minus;    // Sigma_rho^- polyline
  std::vector<Vec2> polygon;  // closed boundary of S_rho (CCW)
  double area() const;
};

// Requires 0 < rho < r0/2.
StripRegion strip(const Interface& itf, double rho);

enum class SieveKind { Empty, FullSlab, CrackSieve, PerforatedSlab };

// Obstacle family K_j. CrackSieve/PerforatedSlab carve periodic gaps of
// width delta_j at period eps_j (one gap at the trailing end of each full
// period); slabs have thickness t_j.
struct SieveSpec {
  SieveKind kind = SieveKind::Empty;
  DecayLaw period;     // eps_j (crack kinds)
  DecayLaw gap;        // delta_j (crack kinds)
  DecayLaw thickness;  // t_j (slab kinds)

  // Bound rho_j on dist(K_j, M): t_j/2 for slabs, 0 for crack subsets.
  double max_distance_law(int j) const;
  void validate() const;
};

struct ArcInterval {
  double s0 = 0.0, s1 = 0.0;  // s0 < s1, arc-length coordinates on M
  double len() const { return s1 - s0; }
};

// Realized obstacle K_j: either a closed subset of M given as disjoint
// arc-length intervals (the "wall"), or a closed polygonal region (possibly
// several components) inside the r0-cylinder.
struct CompactSet {
  enum class Kind { CrackSubset, Polygon };
  Kind kind = Kind::CrackSubset;
  std::vector<ArcInterval> intervals;       // CrackSubset: wall intervals
  std::vector<std::vector<Vec2>> polygons;  // Polygon: region components (CCW)
  int j = 0;
  double max_distance = 0.0;  // realized max dist(K_j, M)
};

CompactSet sieve_at(const SieveSpec& spec, const Interface& itf, int j);

// Shoelace area (positive for CCW simple polygons).
double polygon_area(const std::vector<Vec2>& poly);
// Even-odd rule; points on the boundary are classified by the crossing count.
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly);

}  // namespace sievelab
