#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "perscale/error.hpp"
#include "perscale/filtration.hpp"

namespace perscale {

namespace {

constexpr int kInf = -1;  // the vertex at infinity of ghost triangles

// A predicate whose sign cannot be trusted in double precision.
struct Undecidable {};

// Relative error factor for the filtered predicates. Generous compared with
// the forward error bounds of the determinants: a false alarm only costs a
// jittered rebuild.
constexpr double kPredicateEps = 1e-12;

int orient(const Point& a, const Point& b, const Point& c) {
  const double l = (b[0] - a[0]) * (c[1] - a[1]);
  const double r = (b[1] - a[1]) * (c[0] - a[0]);
  const double det = l - r;
  const double bound = kPredicateEps * (std::abs(l) + std::abs(r));
  if (det > bound) return 1;
  if (det < -bound) return -1;
  throw Undecidable{};
}

int incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a[0] - d[0], ady = a[1] - d[1];
  const double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double bc = bdx * cdy - bdy * cdx;
  const double ca = cdx * ady - cdy * adx;
  const double ab = adx * bdy - ady * bdx;
  const double det = alift * bc + blift * ca + clift * ab;
  const double perm = alift * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                      blift * (std::abs(cdx * ady) + std::abs(cdy * adx)) +
                      clift * (std::abs(adx * bdy) + std::abs(ady * bdx));
  const double bound = kPredicateEps * perm;
  if (det > bound) return 1;
  if (det < -bound) return -1;
  throw Undecidable{};
}

std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << (order - 1); s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;
  bool alive = true;
};

class Triangulator {
 public:
  explicit Triangulator(const std::vector<Point>& pts) : p_(pts) {}

  void run() {
    const int npts = static_cast<int>(p_.size());
    std::vector<int> order = spatial_order();

    // Seed triangle from the first two points and the first point off their line.
    const int a = order[0];
    int b = -1, c = -1;
    std::size_t bi = 0, ci = 0;
    for (std::size_t i = 1; i < order.size() && b < 0; ++i)
      if (p_[order[i]] != p_[a]) b = order[bi = i];
    if (b < 0) throw Undecidable{};
    for (std::size_t i = 1; i < order.size() && c < 0; ++i) {
      if (i == bi) continue;
      try {
        if (orient(p_[a], p_[b], p_[order[i]]) != 0) c = order[ci = i];
      } catch (const Undecidable&) {
      }
    }
    if (c < 0) throw Error("Delaunay triangulation needs points that are not all collinear");
    if (orient(p_[a], p_[b], p_[c]) < 0) std::swap(b, c);

    tris_.reserve(2 * p_.size() + 8);
    const int t0 = new_tri({a, b, c});
    const int g0 = new_tri({b, a, kInf});  // across edge (a, b)
    const int g1 = new_tri({c, b, kInf});  // across edge (b, c)
    const int g2 = new_tri({a, c, kInf});  // across edge (c, a)
    tris_[t0].n = {g1, g2, g0};
    tris_[g0].n = {g2, g1, t0};
    tris_[g1].n = {g0, g2, t0};
    tris_[g2].n = {g1, g0, t0};

    first_of_.assign(static_cast<std::size_t>(npts) + 1, -1);
    second_of_.assign(static_cast<std::size_t>(npts) + 1, -1);
    stamp_.assign(tris_.size(), 0);
    last_ = t0;
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (i == bi || i == ci) continue;
      insert(order[i]);
    }
  }

  DelaunayTriangulation result() const {
    DelaunayTriangulation out;
    out.points = p_;
    std::vector<int> remap(tris_.size(), -1);
    for (std::size_t t = 0; t < tris_.size(); ++t)
      if (tris_[t].alive && !is_ghost(static_cast<int>(t))) {
        remap[t] = static_cast<int>(out.triangles.size());
        out.triangles.push_back(tris_[t].v);
      }
    out.neighbors.resize(out.triangles.size());
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (remap[t] < 0) continue;
      for (int i = 0; i < 3; ++i) out.neighbors[remap[t]][i] = remap[tris_[t].n[i]];
    }
    return out;
  }

 private:
  std::vector<int> spatial_order() const {
    double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
    for (const auto& q : p_)
      for (int i = 0; i < 2; ++i) {
        lo[i] = std::min(lo[i], q[i]);
        hi[i] = std::max(hi[i], q[i]);
      }
    const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-300});
    constexpr int kOrder = 16;
    const double cells = static_cast<double>((1u << kOrder) - 1);
    std::vector<std::pair<std::uint64_t, int>> keys(p_.size());
    for (std::size_t i = 0; i < p_.size(); ++i) {
      const auto x = static_cast<std::uint32_t>((p_[i][0] - lo[0]) / span * cells);
      const auto y = static_cast<std::uint32_t>((p_[i][1] - lo[1]) / span * cells);
      keys[i] = {hilbert_index(x, y, kOrder), static_cast<int>(i)};
    }
    std::sort(keys.begin(), keys.end());
    std::vector<int> order(p_.size());
    for (std::size_t i = 0; i < keys.size(); ++i) order[i] = keys[i].second;
    return order;
  }

  bool is_ghost(int t) const {
    const auto& v = tris_[t].v;
    return v[0] == kInf || v[1] == kInf || v[2] == kInf;
  }

  int new_tri(std::array<int, 3> v) {
    int t;
    if (!free_.empty()) {
      t = free_.back();
      free_.pop_back();
      tris_[t] = Tri{v, {-1, -1, -1}, true};
    } else {
      t = static_cast<int>(tris_.size());
      tris_.push_back(Tri{v, {-1, -1, -1}, true});
      stamp_.push_back(0);
    }
    return t;
  }

  bool conflicts(int t, const Point& q) const {
    const auto& v = tris_[t].v;
    for (int i = 0; i < 3; ++i)
      if (v[i] == kInf) return orient(p_[v[(i + 1) % 3]], p_[v[(i + 2) % 3]], q) > 0;
    return incircle(p_[v[0]], p_[v[1]], p_[v[2]], q) > 0;
  }

  int locate(const Point& q) {
    int t = last_;
    int rot = 0;
    for (std::size_t steps = 0;; ++steps) {
      if (steps > 4 * tris_.size() + 16) throw Undecidable{};
      if (is_ghost(t)) return t;
      const auto& tr = tris_[t];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (k + rot) % 3;
        if (orient(p_[tr.v[(i + 1) % 3]], p_[tr.v[(i + 2) % 3]], q) < 0) {
          t = tr.n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
      rot = (rot + 1) % 3;
    }
  }

  void insert(int pi) {
    const Point& q = p_[pi];
    const int start = locate(q);
    if (!conflicts(start, q)) throw Undecidable{};

    ++epoch_;
    cavity_.clear();
    boundary_.clear();
    cavity_.push_back(start);
    stamp_[start] = epoch_;
    for (std::size_t k = 0; k < cavity_.size(); ++k) {
      const int t = cavity_[k];
      for (int i = 0; i < 3; ++i) {
        const int nb = tris_[t].n[i];
        if (stamp_[nb] == epoch_) continue;
        if (conflicts(nb, q)) {
          stamp_[nb] = epoch_;
          cavity_.push_back(nb);
        } else {
          const auto& v = tris_[t].v;
          boundary_.push_back({v[(i + 1) % 3], v[(i + 2) % 3], nb});
        }
      }
    }
    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }

    auto slot = [&](int vertex) -> std::size_t {
      return vertex == kInf ? p_.size() : static_cast<std::size_t>(vertex);
    };
    created_.clear();
    for (const auto& [a, b, outside] : boundary_) {
      const int t = new_tri({a, b, pi});
      // Tag so the cavity search of later insertions never sees a stale stamp.
      stamp_[t] = 0;
      tris_[t].n[2] = outside;
      auto& on = tris_[outside].n;
      const auto& ov = tris_[outside].v;
      for (int j = 0; j < 3; ++j)
        if (ov[j] != a && ov[j] != b) on[j] = t;
      first_of_[slot(a)] = t;
      second_of_[slot(b)] = t;
      created_.push_back(t);
    }
    for (int t : created_) {
      auto& tr = tris_[t];
      tr.n[0] = first_of_[slot(tr.v[1])];   // across (b, p): the triangle starting at b
      tr.n[1] = second_of_[slot(tr.v[0])];  // across (p, a): the triangle ending at a
      if (!is_ghost(t)) last_ = t;
    }
  }

  std::vector<Point> p_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> stamp_;
  int epoch_ = 0;
  int last_ = 0;
  std::vector<int> cavity_;
  std::vector<std::array<int, 3>> boundary_;
  std::vector<int> created_;
  std::vector<int> first_of_, second_of_;
};

std::vector<Point> jitter(const std::vector<Point>& pts, std::uint64_t seed) {
  double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY};
  for (const auto& q : pts)
    for (int i = 0; i < 2; ++i) {
      lo[i] = std::min(lo[i], q[i]);
      hi[i] = std::max(hi[i], q[i]);
    }
  const double diam = std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
  const double mag = 1e-9 * diam;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-mag, mag);
  std::vector<Point> out = pts;
  for (auto& q : out) {
    q[0] += u(rng);
    q[1] += u(rng);
  }
  return out;
}

void check_not_collinear(const std::vector<Point>& pts) {
  const Point& a = pts[0];
  std::size_t far = 0;
  double best = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = squared_distance(a, pts[i]);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  if (best == 0.0) throw Error("Delaunay triangulation needs at least two distinct points");
  const Point& b = pts[far];
  const double len = std::sqrt(best);
  for (const auto& c : pts) {
    const double cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    if (std::abs(cross) > 1e-12 * len * len) return;
  }
  throw Error("Delaunay triangulation of collinear points");
}

}  // namespace

DelaunayTriangulation delaunay_2d(const PointCloud& cloud) {
  if (cloud.dim != 2) throw Error("Delaunay triangulation is implemented for planar clouds only");
  if (cloud.size() < 3) throw Error(fmt::format("Delaunay triangulation needs >= 3 points, got {}", cloud.size()));
  check_not_collinear(cloud.points);

  std::vector<Point> pts = cloud.points;
  for (int attempt = 0; attempt < 4; ++attempt) {
    try {
      Triangulator tr(pts);
      tr.run();
      DelaunayTriangulation out = tr.result();
      out.jittered = attempt > 0;
      return out;
    } catch (const Undecidable&) {
      pts = jitter(cloud.points, derive_seed(0xde1a0a7ULL, static_cast<std::uint64_t>(cloud.size()),
                                             static_cast<std::uint64_t>(attempt)));
    }
  }
  throw Error("Delaunay triangulation failed: input stays degenerate after jitter");
}

}  // namespace perscale
