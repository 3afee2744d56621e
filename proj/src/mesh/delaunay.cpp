#include "mesh/delaunay.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "acrom/error.hpp"

namespace acrom::detail {

double orient2d(const Point2& a, const Point2& b, const Point2& c) {
  const long double acx = (long double)a.x - c.x, bcx = (long double)b.x - c.x;
  const long double acy = (long double)a.y - c.y, bcy = (long double)b.y - c.y;
  return static_cast<double>(acx * bcy - acy * bcx);
}

double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const long double adx = (long double)a.x - d.x, ady = (long double)a.y - d.y;
  const long double bdx = (long double)b.x - d.x, bdy = (long double)b.y - d.y;
  const long double cdx = (long double)c.x - d.x, cdy = (long double)c.y - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                          ad * (bdx * cdy - bdy * cdx);
  return static_cast<double>(det);
}

Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c) {
  const double bx = b.x - a.x, by = b.y - a.y;
  const double cx = c.x - a.x, cy = c.y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

std::uint64_t Delaunay::edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

Delaunay::Delaunay(Point2 lo, Point2 hi) {
  const double cx = 0.5 * (lo.x + hi.x), cy = 0.5 * (lo.y + hi.y);
  const double span = std::max(hi.x - lo.x, hi.y - lo.y);
  const double r = 20.0 * span;
  pts_.push_back({cx - r * std::sqrt(3.0), cy - r});
  pts_.push_back({cx + r * std::sqrt(3.0), cy - r});
  pts_.push_back({cx, cy + 2.0 * r});
  tris_.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
  mark_.push_back(0);
}

int Delaunay::locate(const Point2& p) const {
  int t = last_;
  if (!tris_[t].alive) {
    t = static_cast<int>(tris_.size()) - 1;
    while (t > 0 && !tris_[t].alive) --t;
  }
  // Visibility walk; terminates on Delaunay triangulations.
  for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
    const Tri& tr = tris_[t];
    int next = -1;
    for (int i = 0; i < 3; ++i) {
      const Point2& a = pts_[tr.v[(i + 1) % 3]];
      const Point2& b = pts_[tr.v[(i + 2) % 3]];
      if (orient2d(a, b, p) < 0.0) {
        next = tr.nb[i];
        break;
      }
    }
    if (next == -1) return t;
    t = next;
  }
  throw Error("delaunay: point location did not terminate");
}

int Delaunay::insert(const Point2& p) {
  const int t0 = locate(p);
  for (int i = 0; i < 3; ++i) {
    const Point2& q = pts_[tris_[t0].v[i]];
    if (std::hypot(q.x - p.x, q.y - p.y) < 1e-13)
      throw Error("delaunay: duplicate point inserted");
  }

  ++stamp_;
  cavity_.clear();
  cavity_.push_back(t0);
  mark_[t0] = stamp_;
  for (std::size_t head = 0; head < cavity_.size(); ++head) {
    const Tri& tr = tris_[cavity_[head]];
    for (int i = 0; i < 3; ++i) {
      const int n = tr.nb[i];
      if (n < 0 || mark_[n] == stamp_) continue;
      const Tri& tn = tris_[n];
      if (incircle(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], p) > 0.0) {
        mark_[n] = stamp_;
        cavity_.push_back(n);
      }
    }
  }

  const int pv = static_cast<int>(pts_.size());
  pts_.push_back(p);

  struct Rim { int a, b, outer, old; };
  std::vector<Rim> rim;
  for (int c : cavity_) {
    const Tri& tr = tris_[c];
    for (int i = 0; i < 3; ++i) {
      const int n = tr.nb[i];
      if (n >= 0 && mark_[n] == stamp_) continue;
      rim.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], n, c});
    }
  }
  for (int c : cavity_) tris_[c].alive = false;

  std::unordered_map<int, int> starts, ends;
  starts.reserve(rim.size() * 2);
  ends.reserve(rim.size() * 2);
  const int first_new = static_cast<int>(tris_.size());
  for (const Rim& e : rim) {
    if (orient2d(pts_[e.a], pts_[e.b], p) <= 0.0)
      throw Error("delaunay: cavity is not star-shaped (degenerate input near vertex " +
                  std::to_string(pv) + ")");
    const int nt = static_cast<int>(tris_.size());
    tris_.push_back(Tri{{e.a, e.b, pv}, {-1, -1, e.outer}, true});
    mark_.push_back(0);
    if (e.outer >= 0) {
      Tri& o = tris_[e.outer];
      for (int j = 0; j < 3; ++j)
        if (o.nb[j] == e.old) o.nb[j] = nt;
    }
    starts[e.a] = nt;
    ends[e.b] = nt;
  }
  for (int nt = first_new; nt < static_cast<int>(tris_.size()); ++nt) {
    Tri& tr = tris_[nt];
    tr.nb[0] = starts.at(tr.v[1]);  // edge (b, p)
    tr.nb[1] = ends.at(tr.v[0]);    // edge (p, a)
  }
  last_ = first_new;
  return pv;
}

}  // namespace acrom::detail
