#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "acrom/error.hpp"
#include "acrom/mesh.hpp"
#include "mesh/delaunay.hpp"

namespace acrom {

namespace {

using detail::Delaunay;

constexpr double kPi = std::numbers::pi;
constexpr int kHelperVertex = Delaunay::kSuperVertices;  // hole centre
constexpr std::uint64_t kJitterSeed = 0x5eed'ac70'0d15'c0deULL;

struct Segment {
  int a, b;
  BoundaryTag tag;
};

class Generator {
 public:
  Generator(const OffsetCylinderGeometry& g, double h)
      : g_(g), h_(h), h_in_(0.5 * h), band_(3.0 * h),
        dt_({-g.r1 * 1.05, -g.r1 * 1.05}, {g.r1 * 1.05, g.r1 * 1.05}) {}

  Mesh run() {
    seed_points();
    refine();
    return extract();
  }

 private:
  double inner_distance(const Point2& p) const {
    return std::max(0.0, std::hypot(p.x - g_.c1, p.y - g_.c2) - g_.r2);
  }

  double size_at(const Point2& p) const {
    const double t = std::clamp(inner_distance(p) / band_, 0.0, 1.0);
    return h_in_ + (h_ - h_in_) * t;
  }

  bool accept(const Point2& p, double min_dist) {
    const auto cell = [&](double v) { return static_cast<long>(std::floor(v / bucket_)); };
    const long cx = cell(p.x), cy = cell(p.y);
    const long reach = static_cast<long>(std::ceil(min_dist / bucket_));
    for (long i = cx - reach; i <= cx + reach; ++i)
      for (long j = cy - reach; j <= cy + reach; ++j) {
        auto it = buckets_.find(key(i, j));
        if (it == buckets_.end()) continue;
        for (int q : it->second) {
          const Point2& o = candidates_[q];
          if (std::hypot(o.x - p.x, o.y - p.y) < min_dist) return false;
        }
      }
    candidates_.push_back(p);
    buckets_[key(cx, cy)].push_back(static_cast<int>(candidates_.size()) - 1);
    return true;
  }

  static std::int64_t key(long i, long j) { return (static_cast<std::int64_t>(i) << 32) ^ (j & 0xffffffffL); }

  void seed_points() {
    bucket_ = h_in_;
    const Point2 centre{g_.c1, g_.c2};

    // Boundary loops first; they are never rejected.
    const int n_outer = std::max(16, static_cast<int>(std::ceil(2.0 * kPi * g_.r1 / h_)));
    const int n_inner = std::max(12, static_cast<int>(std::ceil(2.0 * kPi * g_.r2 / h_in_)));
    std::vector<Point2> outer(n_outer), inner(n_inner);
    for (int i = 0; i < n_outer; ++i) {
      const double th = 2.0 * kPi * i / n_outer;
      outer[i] = g_.snap({g_.r1 * std::cos(th), g_.r1 * std::sin(th)}, BoundaryTag::OuterCylinder);
      candidates_.push_back(outer[i]);
      buckets_[key(static_cast<long>(std::floor(outer[i].x / bucket_)),
                   static_cast<long>(std::floor(outer[i].y / bucket_)))]
          .push_back(static_cast<int>(candidates_.size()) - 1);
    }
    for (int i = 0; i < n_inner; ++i) {
      const double th = 2.0 * kPi * i / n_inner;
      inner[i] = g_.snap({g_.c1 + g_.r2 * std::cos(th), g_.c2 + g_.r2 * std::sin(th)},
                         BoundaryTag::InnerCylinder);
      candidates_.push_back(inner[i]);
      buckets_[key(static_cast<long>(std::floor(inner[i].x / bucket_)),
                   static_cast<long>(std::floor(inner[i].y / bucket_)))]
          .push_back(static_cast<int>(candidates_.size()) - 1);
    }
    const std::size_t n_boundary = candidates_.size();

    const auto inside = [&](const Point2& p, double margin) {
      return std::hypot(p.x, p.y) < g_.r1 - margin &&
             std::hypot(p.x - centre.x, p.y - centre.y) > g_.r2 + margin;
    };

    // Graded rings around the inner cylinder.
    double rho = g_.r2;
    double spacing = 2.0 * kPi * g_.r2 / n_inner;
    const double centre_offset = std::hypot(g_.c1, g_.c2);
    for (int ring = 1;; ++ring) {
      rho += 0.5 * std::sqrt(3.0) * spacing;
      if (rho - g_.r2 > band_ || rho + centre_offset > g_.r1 - 1.5 * h_) break;
      const double s = size_at({centre.x + rho, centre.y});
      const int n = std::max(12, static_cast<int>(std::ceil(2.0 * kPi * rho / s)));
      spacing = 2.0 * kPi * rho / n;
      const double shift = (ring % 2) ? 0.5 : 0.0;
      for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * (i + shift) / n;
        const Point2 p{centre.x + rho * std::cos(th), centre.y + rho * std::sin(th)};
        if (inside(p, 0.5 * size_at(p))) accept(p, 0.75 * size_at(p));
      }
    }

    // One layer inside the outer circle.
    {
      const double s = 2.0 * kPi * g_.r1 / n_outer;
      const double r = g_.r1 - 0.5 * std::sqrt(3.0) * s;
      for (int i = 0; i < n_outer; ++i) {
        const double th = 2.0 * kPi * (i + 0.5) / n_outer;
        const Point2 p{r * std::cos(th), r * std::sin(th)};
        if (inside(p, 0.5 * size_at(p))) accept(p, 0.75 * size_at(p));
      }
    }

    // Jittered hexagonal lattice for the bulk.
    std::mt19937_64 rng(kJitterSeed);
    std::uniform_real_distribution<double> jitter(-0.15 * h_, 0.15 * h_);
    const double dy = 0.5 * std::sqrt(3.0) * h_;
    const int ny = static_cast<int>(std::ceil(g_.r1 / dy)) + 1;
    const int nx = static_cast<int>(std::ceil(g_.r1 / h_)) + 1;
    for (int j = -ny; j <= ny; ++j) {
      for (int i = -nx; i <= nx; ++i) {
        const double jx = jitter(rng), jy = jitter(rng);
        const Point2 p{(i + 0.5 * (j & 1)) * h_ + jx, j * dy + jy};
        const double s = size_at(p);
        if (inside(p, 0.6 * s)) accept(p, 0.75 * s);
      }
    }

    // Insert: hole centre, interior points, then the boundary loops.
    dt_.insert(centre);
    for (std::size_t i = n_boundary; i < candidates_.size(); ++i) dt_.insert(candidates_[i]);
    std::vector<int> outer_ids(n_outer), inner_ids(n_inner);
    for (int i = 0; i < n_outer; ++i) outer_ids[i] = dt_.insert(outer[i]);
    for (int i = 0; i < n_inner; ++i) inner_ids[i] = dt_.insert(inner[i]);
    for (int i = 0; i < n_outer; ++i)
      segments_.push_back({outer_ids[i], outer_ids[(i + 1) % n_outer], BoundaryTag::OuterCylinder});
    for (int i = 0; i < n_inner; ++i)
      segments_.push_back({inner_ids[i], inner_ids[(i + 1) % n_inner], BoundaryTag::InnerCylinder});
  }

  bool is_domain(const Delaunay::Tri& t) const {
    return t.alive && t.v[0] > kHelperVertex && t.v[1] > kHelperVertex && t.v[2] > kHelperVertex;
  }

  bool encroaches(const Segment& s, const Point2& p) const {
    const Point2& a = dt_.points()[s.a];
    const Point2& b = dt_.points()[s.b];
    const Point2 m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    const double r2 = 0.25 * ((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
    const double d2 = (p.x - m.x) * (p.x - m.x) + (p.y - m.y) * (p.y - m.y);
    return d2 < r2 * (1.0 - 1e-12);
  }

  void split(std::size_t si) {
    const Segment s = segments_[si];
    const Point2& a = dt_.points()[s.a];
    const Point2& b = dt_.points()[s.b];
    const Point2 mid = g_.snap({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}, s.tag);
    const int m = dt_.insert(mid);
    segments_[si] = {s.a, m, s.tag};
    segments_.push_back({m, s.b, s.tag});
  }

  // Splits every missing or encroached segment; returns true if any was split.
  bool recover_segments() {
    std::unordered_map<std::uint64_t, std::array<int, 2>> edges;
    const auto& tris = dt_.tris();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      for (int i = 0; i < 3; ++i) {
        auto& slot = edges.try_emplace(Delaunay::edge_key(tris[t].v[(i + 1) % 3], tris[t].v[(i + 2) % 3]),
                                       std::array<int, 2>{-1, -1}).first->second;
        (slot[0] < 0 ? slot[0] : slot[1]) = t;
      }
    }
    std::vector<std::size_t> bad;
    for (std::size_t si = 0; si < segments_.size(); ++si) {
      const Segment& s = segments_[si];
      auto it = edges.find(Delaunay::edge_key(s.a, s.b));
      if (it == edges.end()) {
        bad.push_back(si);
        continue;
      }
      for (int t : it->second) {
        if (t < 0) continue;
        for (int v : tris[t].v) {
          if (v == s.a || v == s.b || v < Delaunay::kSuperVertices) continue;
          if (encroaches(s, dt_.points()[v])) {
            bad.push_back(si);
            goto next;
          }
        }
      }
    next:;
    }
    for (std::size_t si : bad) split(si);
    return !bad.empty();
  }

  bool is_bad(const Delaunay::Tri& t) const {
    const Point2& a = dt_.points()[t.v[0]];
    const Point2& b = dt_.points()[t.v[1]];
    const Point2& c = dt_.points()[t.v[2]];
    const double la = std::hypot(b.x - c.x, b.y - c.y);
    const double lb = std::hypot(c.x - a.x, c.y - a.y);
    const double lc = std::hypot(a.x - b.x, a.y - b.y);
    const double lmax = std::max({la, lb, lc}), lmin = std::min({la, lb, lc});
    const Point2 centroid{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
    if (lmax > 1.45 * size_at(centroid)) return true;
    const double area2 = std::abs(detail::orient2d(a, b, c));
    const double circumradius = la * lb * lc / (2.0 * area2);
    return circumradius / lmin > std::sqrt(2.0);
  }

  bool outside_domain(const Point2& p) const {
    return std::hypot(p.x, p.y) >= g_.r1 || std::hypot(p.x - g_.c1, p.y - g_.c2) <= g_.r2;
  }

  void refine() {
    const std::size_t budget = 200 * (candidates_.size() + 100);
    for (std::size_t pass = 0;; ++pass) {
      if (dt_.points().size() > budget) throw Error("mesh: refinement did not converge");
      if (recover_segments()) continue;
      std::vector<int> bad;
      const auto& tris = dt_.tris();
      for (int t = 0; t < static_cast<int>(tris.size()); ++t)
        if (is_domain(tris[t]) && is_bad(tris[t])) bad.push_back(t);
      if (bad.empty()) return;
      for (int t : bad) {
        const Delaunay::Tri tri = dt_.tris()[t];
        if (!tri.alive) continue;
        const auto& P = dt_.points();
        const Point2 cc = detail::circumcenter(P[tri.v[0]], P[tri.v[1]], P[tri.v[2]]);
        std::vector<std::size_t> hit;
        for (std::size_t si = 0; si < segments_.size(); ++si)
          if (encroaches(segments_[si], cc)) hit.push_back(si);
        if (hit.empty() && outside_domain(cc)) {
          std::size_t best = 0;
          double best_d = 1e300;
          for (std::size_t si = 0; si < segments_.size(); ++si) {
            const Point2& a = P[segments_[si].a];
            const Point2& b = P[segments_[si].b];
            const double d = std::hypot(0.5 * (a.x + b.x) - cc.x, 0.5 * (a.y + b.y) - cc.y);
            if (d < best_d) best_d = d, best = si;
          }
          hit.push_back(best);
        }
        if (!hit.empty()) {
          for (std::size_t si : hit) split(si);
          break;  // segment splits invalidate the batch
        }
        dt_.insert(cc);
      }
    }
  }

  Mesh extract() const {
    Mesh mesh;
    mesh.geometry = g_;
    const auto& P = dt_.points();
    std::vector<int> remap(P.size(), -1);
    for (int v = kHelperVertex + 1; v < static_cast<int>(P.size()); ++v) {
      remap[v] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(P[v]);
    }
    std::unordered_map<std::uint64_t, int> owner;
    for (const auto& t : dt_.tris()) {
      if (!is_domain(t)) continue;
      const std::array<int, 3> tri{remap[t.v[0]], remap[t.v[1]], remap[t.v[2]]};
      for (int i = 0; i < 3; ++i)
        owner[Delaunay::edge_key(tri[i], tri[(i + 1) % 3])] = static_cast<int>(mesh.triangles.size());
      mesh.triangles.push_back(tri);
    }
    for (const Segment& s : segments_) {
      const int a = remap[s.a], b = remap[s.b];
      auto it = owner.find(Delaunay::edge_key(a, b));
      if (it == owner.end()) throw Error("mesh: boundary segment lost during extraction");
      // Orient along the owning triangle so the domain lies to the left.
      const auto& tri = mesh.triangles[it->second];
      int ia = 0;
      while (tri[ia] != a) ++ia;
      const bool forward = tri[(ia + 1) % 3] == b;
      mesh.boundary_edges.push_back({forward ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a}, s.tag});
    }
    return mesh;
  }

  OffsetCylinderGeometry g_;
  double h_, h_in_, band_;
  Delaunay dt_;
  std::vector<Segment> segments_;
  std::vector<Point2> candidates_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
  double bucket_ = 1.0;
};

}  // namespace

Mesh generate_offset_cylinder_mesh(const OffsetCylinderGeometry& g, double target_h) {
  if (!(g.r2 > 0.0) || !(g.r1 > g.r2 + std::hypot(g.c1, g.c2))) {
    std::ostringstream os;
    os << "mesh: inner disk (r2=" << g.r2 << ", centre=(" << g.c1 << "," << g.c2
       << ")) is not strictly inside the outer disk (r1=" << g.r1 << ")";
    throw GeometryError(os.str());
  }
  if (!(target_h > 0.0)) throw ResolutionError("mesh: target_h must be positive");
  if (target_h > g.r2) {
    std::ostringstream os;
    os << "mesh: target_h=" << target_h << " exceeds inner radius r2=" << g.r2
       << "; the inner cylinder cannot be resolved";
    throw ResolutionError(os.str());
  }
  Mesh mesh = Generator(g, target_h).run();
  mesh.validate();
  return mesh;
}

Mesh generate_offset_cylinder_mesh(double r1, double r2, double c1, double c2, double target_h) {
  return generate_offset_cylinder_mesh(OffsetCylinderGeometry{r1, r2, c1, c2}, target_h);
}

}  // namespace acrom
