#include "spike/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <unordered_map>

#include "spike/errors.hpp"

namespace spike {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& a, const Point& b, const Point& c) { return 0.5 * cross(b - a, c - a); }

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> triangles, std::vector<char> boundary_flags)
    : nodes_(std::move(nodes)), triangles_(std::move(triangles)), boundary_(std::move(boundary_flags)) {
  const int n = static_cast<int>(nodes_.size());
  if (n == 0 || triangles_.empty()) throw Error(ErrorKind::InvalidParameter, "mesh is empty");
  if (boundary_.size() != nodes_.size())
    throw Error(ErrorKind::InvalidParameter, "boundary flag count differs from node count");
  for (const Point& p : nodes_)
    if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
      throw Error(ErrorKind::InvalidParameter, "non-finite node coordinate");

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return nodes_[a].x() < nodes_[b].x(); });
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n && nodes_[order[b]].x() - nodes_[order[a]].x() <= 1e-12; ++b)
      if ((nodes_[order[a]] - nodes_[order[b]]).norm() <= 1e-12)
        throw Error(ErrorKind::InvalidParameter,
                    "duplicate nodes " + std::to_string(order[a]) + " and " + std::to_string(order[b]));

  neighbors_.assign(n, {});
  node_tris_.assign(n, {});
  h_max_ = 0;
  h_min_ = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const Triangle& tri = triangles_[t];
    for (int v : tri)
      if (v < 0 || v >= n)
        throw Error(ErrorKind::InvalidParameter, "triangle " + std::to_string(t) + " has index out of range");
    if (!(signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]) > 0))
      throw Error(ErrorKind::InvalidParameter, "triangle " + std::to_string(t) + " has nonpositive area");
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      double len = (nodes_[a] - nodes_[b]).norm();
      h_max_ = std::max(h_max_, len);
      h_min_ = std::min(h_min_, len);
      neighbors_[a].push_back(b);
      neighbors_[b].push_back(a);
      node_tris_[tri[k]].push_back(static_cast<int>(t));
    }
  }
  for (auto& nb : neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

std::vector<int> Mesh::boundary_nodes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    if (boundary_[i]) out.push_back(static_cast<int>(i));
  return out;
}

double Mesh::triangle_area(int t) const {
  const Triangle& tri = triangles_[t];
  return signed_area(nodes_[tri[0]], nodes_[tri[1]], nodes_[tri[2]]);
}

double Mesh::area() const {
  double a = 0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) a += triangle_area(static_cast<int>(t));
  return a;
}

double Mesh::local_h(const Point& x, double radius) const {
  double h = 0;
  for (const Triangle& tri : triangles_) {
    double dmin = std::numeric_limits<double>::infinity();
    double lmax = 0;
    for (int k = 0; k < 3; ++k) {
      dmin = std::min(dmin, (nodes_[tri[k]] - x).norm());
      lmax = std::max(lmax, (nodes_[tri[k]] - nodes_[tri[(k + 1) % 3]]).norm());
    }
    if (dmin <= radius) h = std::max(h, lmax);
  }
  return h;
}

namespace {

class Refiner {
 public:
  Refiner(const Mesh& mesh, const SnapFunction& snap)
      : nodes_(mesh.nodes()), boundary_(mesh.boundary_flags()), snap_(snap) {
    for (const Triangle& t : mesh.triangles()) add(t);
  }

  void run(const SizeFunction& size) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::size_t n = tris_.size();
      for (std::size_t t = 0; t < n; ++t) {
        if (!alive_[t]) continue;
        const Triangle& tri = tris_[t];
        Point centroid = (nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]]) / 3.0;
        auto [a, b] = longest(static_cast<int>(t));
        if ((nodes_[a] - nodes_[b]).norm() > size(centroid)) {
          refine(static_cast<int>(t));
          changed = true;
        }
      }
    }
  }

  Mesh finish() const {
    std::vector<Triangle> out;
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (alive_[t]) out.push_back(tris_[t]);
    return Mesh(nodes_, std::move(out), boundary_);
  }

 private:
  // Strict total order on edges: length, then key.
  bool edge_less(int a, int b, int c, int d) const {
    double l1 = (nodes_[a] - nodes_[b]).squaredNorm();
    double l2 = (nodes_[c] - nodes_[d]).squaredNorm();
    if (l1 != l2) return l1 < l2;
    return edge_key(a, b) < edge_key(c, d);
  }

  std::pair<int, int> longest(int t) const {
    const Triangle& tri = tris_[t];
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (edge_less(tri[best], tri[(best + 1) % 3], tri[k], tri[(k + 1) % 3])) best = k;
    return {tri[best], tri[(best + 1) % 3]};
  }

  int neighbor(int t, int a, int b) const {
    const auto& e = edges_.at(edge_key(a, b));
    return e[0] == t ? e[1] : e[0];
  }

  void add(const Triangle& tri) {
    int t = static_cast<int>(tris_.size());
    tris_.push_back(tri);
    alive_.push_back(1);
    for (int k = 0; k < 3; ++k) {
      auto it = edges_.try_emplace(edge_key(tri[k], tri[(k + 1) % 3]), std::array<int, 2>{-1, -1}).first;
      if (it->second[0] < 0)
        it->second[0] = t;
      else
        it->second[1] = t;
    }
  }

  void remove(int t) {
    alive_[t] = 0;
    const Triangle& tri = tris_[t];
    for (int k = 0; k < 3; ++k) {
      auto it = edges_.find(edge_key(tri[k], tri[(k + 1) % 3]));
      if (it->second[0] == t) it->second[0] = -1;
      if (it->second[1] == t) it->second[1] = -1;
      if (it->second[0] < 0 && it->second[1] >= 0) std::swap(it->second[0], it->second[1]);
      if (it->second[0] < 0) edges_.erase(it);
    }
  }

  void refine(int t) {
    while (alive_[t]) {
      auto [a, b] = longest(t);
      int nb = neighbor(t, a, b);
      if (nb < 0) {
        split(a, b);
        return;
      }
      auto [c, d] = longest(nb);
      if (edge_key(a, b) == edge_key(c, d)) {
        split(a, b);
        return;
      }
      refine(nb);
    }
  }

  void split(int a, int b) {
    std::array<int, 2> adj = edges_.at(edge_key(a, b));
    Point mid = 0.5 * (nodes_[a] + nodes_[b]);
    bool on_boundary = adj[1] < 0;
    if (on_boundary) mid = snap_(mid);
    int m = static_cast<int>(nodes_.size());
    nodes_.push_back(mid);
    boundary_.push_back(on_boundary ? 1 : 0);
    for (int t : adj) {
      if (t < 0) continue;
      Triangle tri = tris_[t];
      int k = 0;
      while (!((tri[k] == a && tri[(k + 1) % 3] == b) || (tri[k] == b && tri[(k + 1) % 3] == a))) ++k;
      int p = tri[k], q = tri[(k + 1) % 3], c = tri[(k + 2) % 3];
      remove(t);
      add({p, m, c});
      add({m, q, c});
    }
  }

  std::vector<Point> nodes_;
  std::vector<char> boundary_;
  std::vector<Triangle> tris_;
  std::vector<char> alive_;
  std::unordered_map<std::uint64_t, std::array<int, 2>> edges_;
  const SnapFunction& snap_;
};

// Ring mesh of the unit disk with the given number of rings; the outermost
// ring carries twice the usual node count.
Mesh unit_ring_mesh(int rings) {
  const double theta0 = -0.5 * std::numbers::pi;
  std::vector<Point> nodes{Point(0, 0)};
  std::vector<char> flags{static_cast<char>(rings == 0)};
  std::vector<int> start{0};
  for (int k = 1; k <= rings; ++k) {
    start.push_back(static_cast<int>(nodes.size()));
    int n = k == rings ? 12 * k : 6 * k;
    double r = static_cast<double>(k) / rings;
    for (int j = 0; j < n; ++j) {
      double th = theta0 + 2 * std::numbers::pi * j / n;
      nodes.emplace_back(r * std::cos(th), r * std::sin(th));
      flags.push_back(k == rings ? 1 : 0);
    }
  }
  std::vector<Triangle> tris;
  auto push = [&](int a, int b, int c) {
    if (signed_area(nodes[a], nodes[b], nodes[c]) < 0) std::swap(b, c);
    tris.push_back({a, b, c});
  };
  const int n1 = rings == 1 ? 12 : 6;
  for (int j = 0; j < n1; ++j) push(0, start[1] + j, start[1] + (j + 1) % n1);
  // Zipper over the right half (angles -pi/2 .. pi/2), then mirror it so the
  // triangulation is symmetric about the vertical axis.
  for (int k = 1; k < rings; ++k) {
    int ni = 6 * k, no = k + 1 == rings ? 12 * (k + 1) : 6 * (k + 1);
    int hi = ni / 2, ho = no / 2;
    int i = 0, j = 0;
    auto mirror_in = [&](int a) { return start[k] + (ni - a) % ni; };
    auto mirror_out = [&](int a) { return start[k + 1] + (no - a) % no; };
    while (i < hi || j < ho) {
      double next_in = static_cast<double>(i + 1) / ni;
      double next_out = static_cast<double>(j + 1) / no;
      if (j < ho && (i == hi || next_out <= next_in)) {
        push(start[k] + i, start[k + 1] + j, start[k + 1] + j + 1);
        push(mirror_in(i), mirror_out(j), mirror_out(j + 1));
        ++j;
      } else {
        push(start[k] + i, start[k + 1] + j, start[k] + i + 1);
        push(mirror_in(i), mirror_out(j), mirror_in(i + 1));
        ++i;
      }
    }
  }
  return Mesh(std::move(nodes), std::move(tris), std::move(flags));
}

Mesh scaled(const Mesh& m, double radius) {
  std::vector<Point> nodes = m.nodes();
  for (Point& p : nodes) p *= radius;
  return Mesh(std::move(nodes), m.triangles(), m.boundary_flags());
}

void check_disk_args(double radius, double h_target) {
  if (!(radius > 0)) throw Error(ErrorKind::InvalidParameter, "radius must be positive");
  if (!(h_target > 0)) throw Error(ErrorKind::InvalidParameter, "h_target must be positive");
  if (h_target > radius) throw Error(ErrorKind::InvalidResolution, "h_target exceeds the radius");
}

}  // namespace

Mesh refine_mesh(const Mesh& mesh, const SizeFunction& size, const SnapFunction& snap) {
  Refiner r(mesh, snap);
  r.run(size);
  return r.finish();
}

Mesh build_disk_mesh(double radius, double h_target, std::optional<Point> refine_point, int refine_levels) {
  check_disk_args(radius, h_target);
  if (refine_levels < 0) throw Error(ErrorKind::InvalidParameter, "refine_levels must be nonnegative");
  int rings = std::max(1, static_cast<int>(std::ceil(radius / h_target)));
  Mesh base = scaled(unit_ring_mesh(rings), radius);
  if (!refine_point || refine_levels == 0) return base;
  const Point p = *refine_point;
  const double fine = h_target / std::ldexp(1.0, refine_levels);
  const double reach = 11.5 * h_target;
  return refine_mesh(
      base, [=](const Point& x) { return (x - p).norm() <= reach ? fine : 10 * h_target; },
      [radius](const Point& x) -> Point { return x * (radius / x.norm()); });
}

Mesh build_graded_disk_mesh(double radius, double h_far, const Point& centre, double h_near, double r_near,
                            double slope) {
  check_disk_args(radius, h_far);
  if (!(h_near > 0) || h_near > h_far || !(slope > 0))
    throw Error(ErrorKind::InvalidParameter, "graded mesh needs 0 < h_near <= h_far and slope > 0");
  int rings = std::max(1, static_cast<int>(std::ceil(radius / h_far)));
  Mesh base = scaled(unit_ring_mesh(rings), radius);
  return refine_mesh(
      base,
      [=](const Point& x) {
        double r = (x - centre).norm();
        return std::min(h_far, h_near + slope * std::max(0.0, r - r_near));
      },
      [radius](const Point& x) -> Point { return x * (radius / x.norm()); });
}

Mesh build_domain_mesh(const Domain& domain, double h_target) {
  if (!(h_target > 0)) throw Error(ErrorKind::InvalidParameter, "h_target must be positive");
  if (domain.kind() == Domain::Kind::UnitDisk) return build_disk_mesh(1.0, h_target);

  const int ns = 4096;
  const double L = domain.perimeter();
  std::vector<Point> samples(ns);
  Point c0(0, 0);
  for (int i = 0; i < ns; ++i) {
    samples[i] = domain.point(L * i / ns);
    c0 += samples[i] / ns;
  }
  std::vector<double> ang(ns + 1);
  double rmax = 0;
  for (int i = 0; i <= ns; ++i) {
    Point v = samples[i % ns] - c0;
    rmax = std::max(rmax, v.norm());
    double a = std::atan2(v.y(), v.x());
    if (i > 0) {
      while (a < ang[i - 1] - std::numbers::pi) a += 2 * std::numbers::pi;
      while (a > ang[i - 1] + std::numbers::pi) a -= 2 * std::numbers::pi;
      if (!(a > ang[i - 1])) throw Error(ErrorKind::InvalidParameter, "domain is not star-shaped about its centroid");
    }
    ang[i] = a;
  }
  if (h_target > rmax) throw Error(ErrorKind::InvalidResolution, "h_target exceeds the domain size");

  auto angle_of = [&](double s) {
    Point v = domain.point(s) - c0;
    return std::atan2(v.y(), v.x());
  };
  auto boundary_in_direction = [&](double theta) -> Point {
    double t = ang[0] + std::fmod(std::fmod(theta - ang[0], 2 * std::numbers::pi) + 2 * std::numbers::pi,
                                  2 * std::numbers::pi);
    auto it = std::upper_bound(ang.begin(), ang.end(), t);
    int j = std::clamp(static_cast<int>(it - ang.begin()) - 1, 0, ns - 1);
    double lo = L * j / ns, hi = L * (j + 1) / ns;
    double base = ang[j];
    for (int k = 0; k < 60; ++k) {
      double mid = 0.5 * (lo + hi);
      double a = angle_of(mid);
      while (a < base - std::numbers::pi) a += 2 * std::numbers::pi;
      while (a > base + std::numbers::pi) a -= 2 * std::numbers::pi;
      if (a < t) lo = mid; else hi = mid;
    }
    return domain.point(0.5 * (lo + hi));
  };

  int rings = std::max(1, static_cast<int>(std::ceil(rmax / h_target)));
  Mesh unit = unit_ring_mesh(rings);
  std::vector<Point> nodes;
  nodes.reserve(unit.num_nodes());
  for (std::size_t i = 0; i < unit.num_nodes(); ++i) {
    const Point& u = unit.node(static_cast<int>(i));
    double rho = u.norm();
    if (rho == 0) {
      nodes.push_back(c0);
      continue;
    }
    Point b = boundary_in_direction(std::atan2(u.y(), u.x()));
    nodes.push_back(unit.is_boundary(static_cast<int>(i)) ? b : Point(c0 + rho * (b - c0)));
  }
  return Mesh(std::move(nodes), unit.triangles(), unit.boundary_flags());
}

Mesh build_rectangle_mesh(double x0, double x1, double y0, double y1, double h_target) {
  if (!(x1 > x0) || !(y1 > y0) || !(h_target > 0))
    throw Error(ErrorKind::InvalidParameter, "rectangle mesh needs a nonempty box and positive h");
  int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / h_target)));
  int ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / h_target)));
  std::vector<Point> nodes;
  std::vector<char> flags;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      nodes.emplace_back(x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny);
      flags.push_back(i == 0 || j == 0 || i == nx || j == ny);
    }
  std::vector<Triangle> tris;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh(std::move(nodes), std::move(tris), std::move(flags));
}

Mesh build_graded_rectangle_mesh(double x0, double x1, double y0, double y1, double h_far, const Point& centre,
                                 double h_near, double r_near, double slope) {
  if (!(h_near > 0) || h_near > h_far || !(slope > 0))
    throw Error(ErrorKind::InvalidParameter, "graded mesh needs 0 < h_near <= h_far and slope > 0");
  return refine_mesh(
      build_rectangle_mesh(x0, x1, y0, y1, h_far),
      [=](const Point& x) {
        double r = (x - centre).norm();
        return std::min(h_far, h_near + slope * std::max(0.0, r - r_near));
      },
      [](const Point& x) { return x; });
}

MeshLocator::MeshLocator(const Mesh& mesh) : mesh_(&mesh) {
  Point lo = mesh.node(0), hi = mesh.node(0);
  for (const Point& p : mesh.nodes()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double span = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  int n = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(mesh.num_triangles()) / 2.0)), 1, 2048);
  cell_ = span / n * (1 + 1e-9) + 1e-300;
  lo_ = lo;
  nx_ = static_cast<int>((hi.x() - lo.x()) / cell_) + 1;
  ny_ = static_cast<int>((hi.y() - lo.y()) / cell_) + 1;
  cell_tris_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  cell_nodes_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tri = mesh.triangles()[t];
    Point a = mesh.node(tri[0]).cwiseMin(mesh.node(tri[1])).cwiseMin(mesh.node(tri[2]));
    Point b = mesh.node(tri[0]).cwiseMax(mesh.node(tri[1])).cwiseMax(mesh.node(tri[2]));
    auto [i0, j0] = cell_of(a);
    auto [i1, j1] = cell_of(b);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) cell_tris_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(t));
  }
  for (std::size_t v = 0; v < mesh.num_nodes(); ++v) {
    auto [i, j] = cell_of(mesh.node(static_cast<int>(v)));
    cell_nodes_[static_cast<std::size_t>(j) * nx_ + i].push_back(static_cast<int>(v));
  }
}

std::pair<int, int> MeshLocator::cell_of(const Point& x) const {
  int i = std::clamp(static_cast<int>(std::floor((x.x() - lo_.x()) / cell_)), 0, nx_ - 1);
  int j = std::clamp(static_cast<int>(std::floor((x.y() - lo_.y()) / cell_)), 0, ny_ - 1);
  return {i, j};
}

std::array<double, 3> MeshLocator::barycentric(int t, const Point& x) const {
  const Triangle& tri = mesh_->triangles()[t];
  const Point &a = mesh_->node(tri[0]), &b = mesh_->node(tri[1]), &c = mesh_->node(tri[2]);
  double area = cross(b - a, c - a);
  double l1 = cross(c - b, x - b) / area;
  double l2 = cross(a - c, x - c) / area;
  return {l1, l2, 1.0 - l1 - l2};
}

std::optional<int> MeshLocator::find(const Point& x) const {
  auto [i, j] = cell_of(x);
  int best = -1;
  double best_min = -1e-10;
  for (int t : cell_tris_[static_cast<std::size_t>(j) * nx_ + i]) {
    auto l = barycentric(t, x);
    double m = std::min({l[0], l[1], l[2]});
    if (m >= best_min) {
      if (best < 0 || m > best_min) {
        best = t;
        best_min = m;
      }
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

int MeshLocator::nearest_node(const Point& x) const {
  auto [ci, cj] = cell_of(x);
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int ring = 0; ring <= std::max(nx_, ny_); ++ring) {
    for (int j = cj - ring; j <= cj + ring; ++j)
      for (int i = ci - ring; i <= ci + ring; ++i) {
        if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        for (int v : cell_nodes_[static_cast<std::size_t>(j) * nx_ + i]) {
          double dd = (mesh_->node(v) - x).norm();
          if (dd < bd) {
            bd = dd;
            best = v;
          }
        }
      }
    if (best >= 0 && bd < ring * cell_) break;
  }
  return best;
}

double MeshLocator::interpolate(const std::vector<double>& values, const Point& x) const {
  int t;
  std::array<double, 3> l;
  if (auto found = find(x)) {
    t = *found;
    l = barycentric(t, x);
  } else {
    int v = nearest_node(x);
    t = mesh_->node_triangles(v).front();
    double best_min = -std::numeric_limits<double>::infinity();
    for (int cand : mesh_->node_triangles(v)) {
      auto lc = barycentric(cand, x);
      double m = std::min({lc[0], lc[1], lc[2]});
      if (m > best_min) {
        best_min = m;
        t = cand;
      }
    }
    l = barycentric(t, x);
    double sum = 0;
    for (double& w : l) sum += (w = std::max(w, 0.0));
    for (double& w : l) w /= sum;
  }
  const Triangle& tri = mesh_->triangles()[t];
  return l[0] * values[tri[0]] + l[1] * values[tri[1]] + l[2] * values[tri[2]];
}

}  // namespace spike
