#include "sievelab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sievelab {

namespace {

constexpr double kTol = 1e-12;

// Band polygon around the arc-length range [s0,s1] of M at offset +-w:
// the polyline M|[s0,s1] translated by +w*nu0, then by -w*nu0 reversed.
std::vector<Vec2> band_polygon(const Interface& itf, double s0, double s1, double w) {
  std::vector<Vec2> pts;
  pts.push_back(itf.point_at(s0));
  for (std::size_t i = 0; i < itf.points.size(); ++i)
    if (itf.arclen[i] > s0 + kTol && itf.arclen[i] < s1 - kTol) pts.push_back(itf.points[i]);
  pts.push_back(itf.point_at(s1));

  std::vector<Vec2> poly;
  poly.reserve(2 * pts.size());
  for (const Vec2& p : pts) poly.push_back(p - w * itf.normal);
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) poly.push_back(*it + w * itf.normal);
  return poly;
}

}  // namespace

bool Interface::flat() const {
  for (double v : profile)
    if (std::abs(v) > kTol) return false;
  return true;
}

Vec2 Interface::point_at(double s) const {
  if (s < -kTol || s > arclen.back() + kTol)
    throw GeometryError(strfmt("interface: arc coordinate %g out of [0, %g]", s, arclen.back()));
  s = std::clamp(s, 0.0, arclen.back());
  auto it = std::upper_bound(arclen.begin(), arclen.end(), s);
  std::size_t k = std::min<std::size_t>(arclen.size() - 2, it == arclen.begin() ? 0 : (it - arclen.begin() - 1));
  double ds = arclen[k + 1] - arclen[k];
  double t = ds > 0.0 ? (s - arclen[k]) / ds : 0.0;
  return points[k] + t * (points[k + 1] - points[k]);
}

double Interface::arc_of_base(double beta) const {
  double total = 2.0 * half_width;
  beta = std::clamp(beta, 0.0, total);
  double step = total / static_cast<double>(points.size() - 1);
  double u = beta / step;
  std::size_t k = std::min<std::size_t>(points.size() - 2, static_cast<std::size_t>(u));
  double t = u - static_cast<double>(k);
  return arclen[k] + t * (arclen[k + 1] - arclen[k]);
}

double Interface::profile_at_base(double beta) const {
  double total = 2.0 * half_width;
  beta = std::clamp(beta, 0.0, total);
  double step = total / static_cast<double>(profile.size() - 1);
  double u = beta / step;
  std::size_t k = std::min<std::size_t>(profile.size() - 2, static_cast<std::size_t>(u));
  double t = u - static_cast<double>(k);
  return profile[k] + t * (profile[k + 1] - profile[k]);
}

Interface build_interface(Vec2 a, Vec2 b, const std::vector<double>& profile, bool test_mode) {
  Vec2 d = b - a;
  double len = norm(d);
  if (len < kTol) throw GeometryError("interface: degenerate base segment");
  Vec2 t0 = (1.0 / len) * d;

  // Canonical normal: left normal of the oriented base, flipped into the
  // upper half plane (ties broken toward +x).
  Vec2 nu{-t0.y, t0.x};
  if (nu.y < -kTol || (std::abs(nu.y) <= kTol && nu.x < 0.0)) nu = -1.0 * nu;
  Vec2 tang{nu.y, -nu.x};  // rot(nu, -90): (t, nu) right-handed

  Interface itf;
  itf.normal = nu;
  itf.tangent = tang;
  itf.half_width = len / 2.0;
  itf.test_mode = test_mode;

  std::vector<double> phi = profile;
  if (phi.empty()) phi = {0.0, 0.0};
  if (phi.size() < 2) throw GeometryError("interface: profile needs at least 2 samples");

  // Store endpoints so that b - a points along the canonical tangent;
  // reverse the profile if the input orientation was opposite.
  if (dot(d, tang) < 0.0) {
    std::swap(a, b);
    std::reverse(phi.begin(), phi.end());
  }
  itf.a = a;
  itf.b = b;

  double bound = itf.half_width / 4.0;
  for (double v : phi)
    if (!(std::abs(v) < bound))
      throw GeometryError(strfmt("interface: profile value %g out of (-r0/4, r0/4) = (-%g, %g)", v, bound, bound));

  // Re-center so that phi vanishes at the cylinder center: shift the base
  // line by phi(mid)*nu0 and subtract phi(mid) from the profile. The curve
  // itself is unchanged.
  double mid = 0.0;
  {
    double total = len;
    double step = total / static_cast<double>(phi.size() - 1);
    double u = (total / 2.0) / step;
    std::size_t k = std::min<std::size_t>(phi.size() - 2, static_cast<std::size_t>(u));
    double tt = u - static_cast<double>(k);
    mid = phi[k] + tt * (phi[k + 1] - phi[k]);
  }
  if (std::abs(mid) > 0.0) {
    for (double& v : phi) v -= mid;
    itf.a = itf.a + mid * nu;
    itf.b = itf.b + mid * nu;
    for (double v : phi)
      if (!(std::abs(v) < bound))
        throw GeometryError("interface: re-centered profile exceeds the r0/4 amplitude bound");
  }
  itf.center = 0.5 * (itf.a + itf.b);
  itf.profile = phi;

  // Polyline vertices and strictly increasing arc-length table.
  std::size_t n = phi.size();
  itf.points.resize(n);
  itf.arclen.resize(n);
  double step = len / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    itf.points[i] = itf.a + (static_cast<double>(i) * step) * tang + phi[i] * nu;
  itf.arclen[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    double ds = norm(itf.points[i] - itf.points[i - 1]);
    if (!(ds > 0.0)) throw GeometryError("interface: arc-length table not strictly increasing");
    itf.arclen[i] = itf.arclen[i - 1] + ds;
  }
  return itf;
}

double StripRegion::area() const { return std::abs(polygon_area(polygon)); }

StripRegion strip(const Interface& itf, double rho) {
  if (!(rho > 0.0) || !(rho < itf.half_width / 2.0))
    throw GeometryError(strfmt("strip: rho=%g out of (0, r0/2)=(0, %g)", rho, itf.half_width / 2.0));
  StripRegion s;
  s.rho = rho;
  for (const Vec2& p : itf.points) s.plus.push_back(p + rho * itf.normal);
  for (const Vec2& p : itf.points) s.minus.push_back(p - rho * itf.normal);
  s.polygon = band_polygon(itf, 0.0, itf.length(), rho);
  return s;
}

double SieveSpec::max_distance_law(int j) const {
  switch (kind) {
    case SieveKind::FullSlab:
    case SieveKind::PerforatedSlab:
      return thickness.at(j) / 2.0;
    default:
      return 0.0;
  }
}

void SieveSpec::validate() const {
  switch (kind) {
    case SieveKind::Empty:
      break;
    case SieveKind::FullSlab:
      thickness.validate("sieve.thickness");
      break;
    case SieveKind::CrackSieve:
      period.validate("sieve.period");
      gap.validate("sieve.gap");
      break;
    case SieveKind::PerforatedSlab:
      period.validate("sieve.period");
      gap.validate("sieve.gap");
      thickness.validate("sieve.thickness");
      break;
  }
}

namespace {

// Periodic gap pattern on [0, L]: one open gap of width delta at the
// trailing end of each full period of width eps (so interval ends land on
// multiples of eps - delta and eps, which meshes resolve exactly whenever
// h divides them). Returns the closed wall intervals.
std::vector<ArcInterval> wall_intervals(double L, double eps, double delta) {
  if (delta > eps + kTol)
    throw GeometryError(strfmt("sieve: gap width %g exceeds period %g", delta, eps));
  std::vector<ArcInterval> wall;
  double cursor = 0.0;
  int k = 0;
  while (true) {
    double lo = static_cast<double>(k) * eps;
    double hi = lo + eps;
    if (hi > L + kTol) break;  // only full periods carry a gap
    double g0 = hi - delta;
    if (g0 > cursor + kTol) wall.push_back({cursor, g0});
    cursor = hi;
    ++k;
  }
  if (cursor < L - kTol) wall.push_back({cursor, L});
  return wall;
}

double max_vertex_distance(const std::vector<std::vector<Vec2>>& polys, const Interface& itf) {
  double best = 0.0;
  for (const auto& poly : polys)
    for (const Vec2& v : poly) {
      double d = 1e300;
      for (std::size_t i = 0; i + 1 < itf.points.size(); ++i) {
        Vec2 p = itf.points[i], q = itf.points[i + 1];
        Vec2 pq = q - p;
        double t = std::clamp(dot(v - p, pq) / dot(pq, pq), 0.0, 1.0);
        d = std::min(d, norm(v - (p + t * pq)));
      }
      best = std::max(best, d);
    }
  return best;
}

}  // namespace

CompactSet sieve_at(const SieveSpec& spec, const Interface& itf, int j) {
  spec.validate();
  if (j < 1) throw GeometryError("sieve_at: j must be >= 1");
  double L = itf.length();
  CompactSet k;
  k.j = j;

  switch (spec.kind) {
    case SieveKind::Empty: {
      k.kind = CompactSet::Kind::CrackSubset;
      break;
    }
    case SieveKind::CrackSieve: {
      k.kind = CompactSet::Kind::CrackSubset;
      k.intervals = wall_intervals(L, spec.period.at(j), spec.gap.at(j));
      break;
    }
    case SieveKind::FullSlab: {
      k.kind = CompactSet::Kind::Polygon;
      double t = spec.thickness.at(j);
      double room = itf.half_width;
      for (double v : itf.profile)
        if (std::abs(v) + t / 2.0 >= room)
          throw GeometryError("sieve_at: slab spills outside the r0-cylinder");
      k.polygons.push_back(band_polygon(itf, 0.0, L, t / 2.0));
      k.max_distance = max_vertex_distance(k.polygons, itf);
      break;
    }
    case SieveKind::PerforatedSlab: {
      k.kind = CompactSet::Kind::Polygon;
      double t = spec.thickness.at(j);
      double room = itf.half_width;
      for (double v : itf.profile)
        if (std::abs(v) + t / 2.0 >= room)
          throw GeometryError("sieve_at: slab spills outside the r0-cylinder");
      for (const ArcInterval& w : wall_intervals(L, spec.period.at(j), spec.gap.at(j)))
        k.polygons.push_back(band_polygon(itf, w.s0, w.s1, t / 2.0));
      k.max_distance = max_vertex_distance(k.polygons, itf);
      break;
    }
  }
  return k;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    s += cross(p, q);
  }
  return s / 2.0;
}

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  bool in = false;
  std::size_t n = poly.size();
  for (std::size_t i = 0, jj = n - 1; i < n; jj = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[jj];
    if ((a.y > p.y) != (b.y > p.y)) {
      double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
      if (p.x < xint) in = !in;
    }
  }
  return in;
}

}  // namespace sievelab
