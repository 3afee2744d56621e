#include <algorithm>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "acrom/error.hpp"
#include "acrom/fem.hpp"

namespace acrom::fem {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

int DofMap::dirichlet_count() const {
  return static_cast<int>(std::count(dirichlet_mask.begin(), dirichlet_mask.end(), 1));
}

DofMap build_dofmap(const Mesh& mesh) {
  DofMap d;
  d.n_vertices = static_cast<int>(mesh.vertices.size());
  const int nt = static_cast<int>(mesh.triangles.size());
  d.p2_nodes.resize(nt);
  d.p1_nodes.resize(nt);

  std::unordered_map<std::uint64_t, int> edge_index;
  edge_index.reserve(3 * nt);
  const int local_edge[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      d.p2_nodes[t][i] = tri[i];
      d.p1_nodes[t][i] = tri[i];
    }
    for (int e = 0; e < 3; ++e) {
      const int a = tri[local_edge[e][0]], b = tri[local_edge[e][1]];
      auto [it, fresh] = edge_index.try_emplace(edge_key(a, b), static_cast<int>(d.edges.size()));
      if (fresh) d.edges.push_back({std::min(a, b), std::max(a, b)});
      d.p2_nodes[t][3 + e] = d.n_vertices + it->second;
    }
  }
  d.n_edges = static_cast<int>(d.edges.size());
  d.n_scalar = d.n_vertices + d.n_edges;
  d.n_u = 2 * d.n_scalar;
  d.n_p = d.n_vertices;

  d.node_coords.resize(d.n_scalar);
  for (int v = 0; v < d.n_vertices; ++v) d.node_coords[v] = mesh.vertices[v];
  for (int e = 0; e < d.n_edges; ++e) {
    const Point2& a = mesh.vertices[d.edges[e][0]];
    const Point2& b = mesh.vertices[d.edges[e][1]];
    d.node_coords[d.n_vertices + e] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  }

  d.dirichlet_mask.assign(d.n_u, 0);
  for (const auto& be : mesh.boundary_edges) {
    auto it = edge_index.find(edge_key(be.v[0], be.v[1]));
    if (it == edge_index.end())
      throw InvariantError("dofmap: boundary edge (" + std::to_string(be.v[0]) + "," + std::to_string(be.v[1]) +
                           ") is not a mesh edge");
    const int mid = d.n_vertices + it->second;
    for (int node : {be.v[0], be.v[1], mid})
      for (int c = 0; c < 2; ++c) d.dirichlet_mask[c * d.n_scalar + node] = 1;
    if (mesh.geometry) d.node_coords[mid] = mesh.geometry->snap(d.node_coords[mid], be.tag);
  }
  return d;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ACROM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace acrom::fem
