#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>

#include "acrom/error.hpp"
#include "acrom/mesh.hpp"

namespace acrom {

namespace {

constexpr int kMeshFormatVersion = 1;
constexpr double kBoundaryTolerance = 1e-8;

std::uint64_t undirected(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Tokens {
 public:
  explicit Tokens(std::istream& in) : in_(in) {}

  std::string word(const char* what) {
    std::string s;
    if (!(in_ >> s)) throw FormatError(std::string("mesh file truncated while reading ") + what);
    return s;
  }
  void expect(const std::string& w) {
    const std::string got = word(w.c_str());
    if (got != w) throw FormatError("mesh file: expected '" + w + "', found '" + got + "'");
  }
  double real(const char* what) {
    const std::string s = word(what);
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw FormatError(std::string("mesh file: bad number '") + s + "' in " + what);
    return v;
  }
  long integer(const char* what) {
    const std::string s = word(what);
    long v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw FormatError(std::string("mesh file: bad integer '") + s + "' in " + what);
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

double OffsetCylinderGeometry::circle_residual(const Point2& p, BoundaryTag tag) const {
  if (tag == BoundaryTag::OuterCylinder) return p.x * p.x + p.y * p.y - r1 * r1;
  const double dx = p.x - c1, dy = p.y - c2;
  return dx * dx + dy * dy - r2 * r2;
}

Point2 OffsetCylinderGeometry::snap(const Point2& p, BoundaryTag tag) const {
  const double cx = tag == BoundaryTag::OuterCylinder ? 0.0 : c1;
  const double cy = tag == BoundaryTag::OuterCylinder ? 0.0 : c2;
  const double r = tag == BoundaryTag::OuterCylinder ? r1 : r2;
  const double th = std::atan2(p.y - cy, p.x - cx);
  return {cx + r * std::cos(th), cy + r * std::sin(th)};
}

double OffsetCylinderGeometry::domain_area() const {
  return std::numbers::pi * (r1 * r1 - r2 * r2);
}

double Mesh::signed_area(int tri) const {
  const auto& t = triangles[tri];
  const Point2& a = vertices[t[0]];
  const Point2& b = vertices[t[1]];
  const Point2& c = vertices[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double Mesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += signed_area(t);
  return s;
}

double Mesh::max_diameter() const {
  double d = 0.0;
  for (const auto& t : triangles)
    for (int i = 0; i < 3; ++i) {
      const Point2& a = vertices[t[i]];
      const Point2& b = vertices[t[(i + 1) % 3]];
      d = std::max(d, std::hypot(a.x - b.x, a.y - b.y));
    }
  return d;
}

void Mesh::validate() const {
  const int nv = static_cast<int>(vertices.size());
  // directed edge -> count
  std::unordered_map<std::uint64_t, int> uses;
  std::unordered_map<std::uint64_t, std::array<int, 2>> first_dir;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    for (int v : triangles[t])
      if (v < 0 || v >= nv)
        throw InvariantError("mesh: triangle " + std::to_string(t) + " references missing vertex " + std::to_string(v));
    if (!(signed_area(t) > 0.0))
      throw InvariantError("mesh: triangle " + std::to_string(t) + " has non-positive signed area " +
                           fmt_double(signed_area(t)));
    for (int i = 0; i < 3; ++i) {
      const int a = triangles[t][i], b = triangles[t][(i + 1) % 3];
      const auto k = undirected(a, b);
      const int n = ++uses[k];
      if (n == 1) {
        first_dir[k] = {a, b};
      } else if (n == 2) {
        if (first_dir[k][0] == a)
          throw InvariantError("mesh: edge (" + std::to_string(a) + "," + std::to_string(b) +
                               ") traversed in the same direction by two triangles");
      } else {
        throw InvariantError("mesh: edge (" + std::to_string(a) + "," + std::to_string(b) +
                             ") shared by more than two triangles");
      }
    }
  }
  for (const auto& e : boundary_edges) {
    auto it = uses.find(undirected(e.v[0], e.v[1]));
    if (it == uses.end() || it->second != 1)
      throw InvariantError("mesh: boundary edge (" + std::to_string(e.v[0]) + "," + std::to_string(e.v[1]) +
                           ") does not belong to exactly one triangle");
    if (geometry) {
      for (int v : e.v) {
        const double res = std::abs(geometry->circle_residual(vertices[v], e.tag));
        if (res > kBoundaryTolerance)
          throw InvariantError("mesh: boundary vertex " + std::to_string(v) + " is " + fmt_double(res) +
                               " off its circle");
      }
    }
  }
}

std::string mesh_to_string(const Mesh& mesh) {
  std::ostringstream os;
  os << "acrom-mesh " << kMeshFormatVersion << "\n";
  if (mesh.geometry) {
    const auto& g = *mesh.geometry;
    os << "geometry " << fmt_double(g.r1) << ' ' << fmt_double(g.r2) << ' ' << fmt_double(g.c1) << ' '
       << fmt_double(g.c2) << "\n";
  } else {
    os << "geometry none\n";
  }
  os << "vertices " << mesh.vertices.size() << "\n";
  for (const auto& p : mesh.vertices) os << fmt_double(p.x) << ' ' << fmt_double(p.y) << "\n";
  os << "triangles " << mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << "\n";
  os << "boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    os << e.v[0] << ' ' << e.v[1] << ' ' << (e.tag == BoundaryTag::OuterCylinder ? "outer" : "inner") << "\n";
  os << "end\n";
  return os.str();
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  const std::string s = mesh_to_string(mesh);
  f.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open mesh file " + path.string());
  Tokens in(f);
  in.expect("acrom-mesh");
  const long version = in.integer("version");
  if (version != kMeshFormatVersion)
    throw VersionError("mesh file " + path.string() + ": unsupported format version " + std::to_string(version));
  Mesh mesh;
  in.expect("geometry");
  {
    const std::string first = in.word("geometry");
    if (first != "none") {
      OffsetCylinderGeometry g;
      double r1 = 0.0;
      auto r = std::from_chars(first.data(), first.data() + first.size(), r1);
      if (r.ec != std::errc()) throw FormatError("mesh file: bad geometry");
      g.r1 = r1;
      g.r2 = in.real("geometry");
      g.c1 = in.real("geometry");
      g.c2 = in.real("geometry");
      mesh.geometry = g;
    }
  }
  in.expect("vertices");
  const long nv = in.integer("vertex count");
  if (nv < 0) throw FormatError("mesh file: negative vertex count");
  mesh.vertices.resize(nv);
  for (auto& p : mesh.vertices) {
    p.x = in.real("vertices");
    p.y = in.real("vertices");
  }
  in.expect("triangles");
  const long nt = in.integer("triangle count");
  if (nt < 0) throw FormatError("mesh file: negative triangle count");
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles)
    for (int& v : t) v = static_cast<int>(in.integer("triangles"));
  in.expect("boundary_edges");
  const long ne = in.integer("boundary edge count");
  if (ne < 0) throw FormatError("mesh file: negative boundary edge count");
  mesh.boundary_edges.resize(ne);
  for (auto& e : mesh.boundary_edges) {
    e.v[0] = static_cast<int>(in.integer("boundary_edges"));
    e.v[1] = static_cast<int>(in.integer("boundary_edges"));
    const std::string tag = in.word("boundary tag");
    if (tag == "outer") e.tag = BoundaryTag::OuterCylinder;
    else if (tag == "inner") e.tag = BoundaryTag::InnerCylinder;
    else throw FormatError("mesh file: unknown boundary tag '" + tag + "'");
    for (int v : e.v)
      if (v < 0 || v >= nv) throw FormatError("mesh file: boundary edge references missing vertex");
  }
  in.expect("end");
  mesh.validate();
  return mesh;
}

std::vector<BoundaryEdge> inner_boundary_edges(const Mesh& mesh) {
  std::vector<BoundaryEdge> edges;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == BoundaryTag::InnerCylinder) edges.push_back(e);
  if (edges.empty()) throw TopologyError("mesh: no InnerCylinder boundary edges");

  std::map<int, std::vector<int>> incident;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i)
    for (int v : edges[i].v) incident[v].push_back(i);
  for (const auto& [v, list] : incident)
    if (list.size() != 2)
      throw TopologyError("mesh: inner boundary vertex " + std::to_string(v) + " has " +
                          std::to_string(list.size()) + " incident edges");

  std::vector<BoundaryEdge> loop;
  loop.reserve(edges.size());
  std::vector<char> used(edges.size(), 0);
  int cur = 0;
  int tail = edges[0].v[0];
  for (std::size_t k = 0; k < edges.size(); ++k) {
    used[cur] = 1;
    BoundaryEdge e = edges[cur];
    if (e.v[0] != tail) std::swap(e.v[0], e.v[1]);
    loop.push_back(e);
    tail = e.v[1];
    int next = -1;
    for (int cand : incident[tail])
      if (!used[cand]) next = cand;
    if (next < 0) break;
    cur = next;
  }
  if (loop.size() != edges.size() || loop.back().v[1] != loop.front().v[0])
    throw TopologyError("mesh: inner boundary is not a single closed loop");

  // Winding about the inner centre decides orientation.
  Point2 c{0.0, 0.0};
  if (mesh.geometry) {
    c = {mesh.geometry->c1, mesh.geometry->c2};
  } else {
    for (const auto& e : loop) c.x += mesh.vertices[e.v[0]].x, c.y += mesh.vertices[e.v[0]].y;
    c.x /= static_cast<double>(loop.size());
    c.y /= static_cast<double>(loop.size());
  }
  double twice_area = 0.0;
  for (const auto& e : loop) {
    const Point2& a = mesh.vertices[e.v[0]];
    const Point2& b = mesh.vertices[e.v[1]];
    twice_area += (a.x - c.x) * (b.y - c.y) - (a.y - c.y) * (b.x - c.x);
  }
  if (twice_area < 0.0) {
    std::reverse(loop.begin(), loop.end());
    for (auto& e : loop) std::swap(e.v[0], e.v[1]);
  }
  return loop;
}

}  // namespace acrom
