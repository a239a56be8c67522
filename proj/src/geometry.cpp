#include "perscale/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "perscale/error.hpp"

namespace perscale {

namespace {

void check_dim(std::size_t n) {
  if (n != 2 && n != 3) throw Error(fmt::format("region dimension must be 2 or 3, got {}", n));
}

Point to_point(const std::vector<double>& v) {
  Point p{};
  std::copy(v.begin(), v.end(), p.begin());
  return p;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double simplex_volume(const std::vector<Point>& v, int dim) {
  Eigen::MatrixXd m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = v[j + 1][i] - v[0][i];
  const double fact = dim == 2 ? 2.0 : 6.0;
  return std::abs(m.determinant()) / fact;
}

double triangle_area_3d(const Point& a, const Point& b, const Point& c) {
  const Point u = b - a, w = c - a;
  const Point x{u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]};
  return 0.5 * std::sqrt(dot(x, x));
}

// Interior dihedral angle of a tetrahedron at edge (a, b), with c and d the
// remaining vertices.
double dihedral_angle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const Point e = b - a;
  const double ee = dot(e, e);
  Point u = c - a, w = d - a;
  u = u - (dot(u, e) / ee) * e;
  w = w - (dot(w, e) / ee) * e;
  const double cosang = dot(u, w) / std::sqrt(dot(u, u) * dot(w, w));
  return std::acos(std::clamp(cosang, -1.0, 1.0));
}

}  // namespace

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Box: return "box";
    case RegionKind::Ball: return "ball";
    case RegionKind::Simplex: return "simplex";
  }
  return "unknown";
}

Region Region::box(const std::vector<double>& lower, const std::vector<double>& upper) {
  check_dim(lower.size());
  if (upper.size() != lower.size()) throw Error("box corners have different dimensions");
  Region r;
  r.kind_ = RegionKind::Box;
  r.dim_ = static_cast<int>(lower.size());
  r.lower_ = to_point(lower);
  r.upper_ = to_point(upper);
  return r;
}

Region Region::ball(const std::vector<double>& center, double radius) {
  check_dim(center.size());
  Region r;
  r.kind_ = RegionKind::Ball;
  r.dim_ = static_cast<int>(center.size());
  r.lower_ = to_point(center);
  r.upper_ = r.lower_;
  r.radius_ = radius;
  return r;
}

Region Region::simplex(const std::vector<std::vector<double>>& vertices) {
  if (vertices.empty()) throw Error("simplex needs vertices");
  check_dim(vertices.front().size());
  const std::size_t n = vertices.front().size();
  if (vertices.size() != n + 1)
    throw Error(fmt::format("a simplex in R^{} needs {} vertices, got {}", n, n + 1, vertices.size()));
  Region r;
  r.kind_ = RegionKind::Simplex;
  r.dim_ = static_cast<int>(n);
  for (const auto& v : vertices) {
    if (v.size() != n) throw Error("simplex vertices have mixed dimensions");
    r.vertices_.push_back(to_point(v));
  }
  return r;
}

bool Region::is_degenerate() const {
  switch (kind_) {
    case RegionKind::Box:
      for (int i = 0; i < dim_; ++i)
        if (!(upper_[i] > lower_[i])) return true;
      return false;
    case RegionKind::Ball: return !(radius_ > 0.0);
    case RegionKind::Simplex: {
      // Relative to the scale of the simplex, so that tiny but proper
      // simplices are not rejected.
      double scale = 0.0;
      for (const auto& v : vertices_) scale = std::max(scale, distance(v, vertices_[0]));
      if (scale == 0.0) return true;
      return simplex_volume(vertices_, dim_) <= 1e-12 * std::pow(scale, dim_);
    }
  }
  return true;
}

bool Region::contains(const Point& p) const {
  switch (kind_) {
    case RegionKind::Box:
      for (int i = 0; i < dim_; ++i)
        if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
      return true;
    case RegionKind::Ball: return squared_distance(p, lower_) <= radius_ * radius_;
    case RegionKind::Simplex: {
      Eigen::MatrixXd m(dim_, dim_);
      Eigen::VectorXd rhs(dim_);
      for (int j = 0; j < dim_; ++j)
        for (int i = 0; i < dim_; ++i) m(i, j) = vertices_[j + 1][i] - vertices_[0][i];
      for (int i = 0; i < dim_; ++i) rhs(i) = p[i] - vertices_[0][i];
      const Eigen::VectorXd lam = m.partialPivLu().solve(rhs);
      const double tol = 1e-14;
      double sum = 0.0;
      for (int i = 0; i < dim_; ++i) {
        if (lam(i) < -tol) return false;
        sum += lam(i);
      }
      return sum <= 1.0 + tol;
    }
  }
  return false;
}

std::pair<Point, Point> Region::bounding_box() const {
  switch (kind_) {
    case RegionKind::Box: return {lower_, upper_};
    case RegionKind::Ball: {
      Point lo{}, hi{};
      for (int i = 0; i < dim_; ++i) {
        lo[i] = lower_[i] - radius_;
        hi[i] = lower_[i] + radius_;
      }
      return {lo, hi};
    }
    case RegionKind::Simplex: {
      Point lo = vertices_[0], hi = vertices_[0];
      for (const auto& v : vertices_)
        for (int i = 0; i < dim_; ++i) {
          lo[i] = std::min(lo[i], v[i]);
          hi[i] = std::max(hi[i], v[i]);
        }
      return {lo, hi};
    }
  }
  return {};
}

Point Region::reference_point() const {
  switch (kind_) {
    case RegionKind::Box: return 0.5 * (lower_ + upper_);
    case RegionKind::Ball: return lower_;
    case RegionKind::Simplex: {
      Point c{};
      for (const auto& v : vertices_) c = c + v;
      return (1.0 / static_cast<double>(vertices_.size())) * c;
    }
  }
  return {};
}

Region Region::scaled(double factor, const Point& about) const {
  Region r = *this;
  auto map = [&](const Point& x) { return about + factor * (x - about); };
  switch (kind_) {
    case RegionKind::Box:
      r.lower_ = map(lower_);
      r.upper_ = map(upper_);
      if (factor < 0) std::swap(r.lower_, r.upper_);
      break;
    case RegionKind::Ball:
      r.lower_ = map(lower_);
      r.upper_ = r.lower_;
      r.radius_ = std::abs(factor) * radius_;
      break;
    case RegionKind::Simplex:
      for (auto& v : r.vertices_) v = map(v);
      break;
  }
  for (int i = dim_; i < 3; ++i) {
    r.lower_[i] = 0.0;
    r.upper_[i] = 0.0;
  }
  return r;
}

Region Region::stretched(double factor, const Point& about, const std::vector<int>& axes) const {
  if (kind_ != RegionKind::Box) throw Error("per-axis scaling is only supported for boxes");
  Region r = *this;
  for (int a : axes) {
    if (a < 0 || a >= dim_) throw Error(fmt::format("axis {} out of range for dimension {}", a, dim_));
    r.lower_[a] = about[a] + factor * (lower_[a] - about[a]);
    r.upper_[a] = about[a] + factor * (upper_[a] - about[a]);
  }
  return r;
}

std::string Region::describe() const {
  auto pt = [this](const Point& p) {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) s += fmt::format("{}{:.12g}", i ? "," : "", p[i]);
    return s + ")";
  };
  switch (kind_) {
    case RegionKind::Box: return fmt::format("box {}-{}", pt(lower_), pt(upper_));
    case RegionKind::Ball: return fmt::format("ball center {} radius {:.12g}", pt(lower_), radius_);
    case RegionKind::Simplex: {
      std::string s = "simplex";
      for (const auto& v : vertices_) s += " " + pt(v);
      return s;
    }
  }
  return "region";
}

double unit_ball_volume(int j) {
  switch (j) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw Error(fmt::format("unit ball volume requested for dimension {}", j));
  }
}

double volume(const Region& region) {
  if (region.is_degenerate()) throw Error("degenerate region has zero volume: " + region.describe());
  return intrinsic_volumes(region).back();
}

std::vector<double> intrinsic_volumes(const Region& region) {
  const int n = region.dim();
  std::vector<double> v(n + 1, 0.0);
  switch (region.kind()) {
    case RegionKind::Box: {
      // Elementary symmetric polynomials of the side lengths.
      v[0] = 1.0;
      for (int i = 0; i < n; ++i) {
        const double a = region.upper()[i] - region.lower()[i];
        for (int j = i + 1; j >= 1; --j) v[j] += a * v[j - 1];
      }
      break;
    }
    case RegionKind::Ball: {
      const double r = region.radius();
      for (int i = 0; i <= n; ++i)
        v[i] = binomial(n, i) * unit_ball_volume(n) / unit_ball_volume(n - i) * std::pow(r, i);
      break;
    }
    case RegionKind::Simplex: {
      const auto& p = region.vertices();
      v[0] = 1.0;
      v[n] = simplex_volume(p, n);
      if (n == 2) {
        v[1] = 0.5 * (distance(p[0], p[1]) + distance(p[1], p[2]) + distance(p[2], p[0]));
      } else {
        double surface = 0.0;
        for (int skip = 0; skip < 4; ++skip) {
          std::vector<Point> f;
          for (int i = 0; i < 4; ++i)
            if (i != skip) f.push_back(p[i]);
          surface += triangle_area_3d(f[0], f[1], f[2]);
        }
        v[2] = 0.5 * surface;
        double mean_width_sum = 0.0;
        for (int a = 0; a < 4; ++a)
          for (int b = a + 1; b < 4; ++b) {
            int others[2], m = 0;
            for (int i = 0; i < 4; ++i)
              if (i != a && i != b) others[m++] = i;
            const double theta = dihedral_angle(p[a], p[b], p[others[0]], p[others[1]]);
            mean_width_sum += distance(p[a], p[b]) * (std::numbers::pi - theta);
          }
        v[1] = mean_width_sum / (2.0 * std::numbers::pi);
      }
      break;
    }
  }
  return v;
}

double quermassintegral(const Region& region, int i) {
  const int n = region.dim();
  if (i < 0 || i > n) throw Error(fmt::format("quermassintegral index {} outside [0, {}]", i, n));
  const auto v = intrinsic_volumes(region);
  return unit_ball_volume(i) * v[n - i] / binomial(n, i);
}

double steiner_volume(const Region& region, double delta) {
  if (delta < 0) throw Error("Steiner dilation radius must be >= 0");
  const int n = region.dim();
  const auto v = intrinsic_volumes(region);
  // sum_i binom(n,i) W_i delta^i == sum_i kappa_i V_{n-i} delta^i
  double total = 0.0;
  for (int i = n; i >= 0; --i) total = total * delta + unit_ball_volume(i) * v[n - i];
  return total;
}

AveragingSequence::AveragingSequence(Region base_region, std::vector<double> scale_factors,
                                     std::vector<int> scaled_axes)
    : base(std::move(base_region)),
      scales(std::move(scale_factors)),
      axes(std::move(scaled_axes)),
      about(base.reference_point()) {
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (!(scales[k] > 0)) throw Error("averaging sequence scales must be positive");
    if (k > 0 && !(scales[k] > scales[k - 1]))
      throw Error("averaging sequence scales must be strictly increasing");
  }
  if (!axes.empty() && base.kind() != RegionKind::Box)
    throw Error("per-axis averaging sequences require a box base shape");
}

Region AveragingSequence::at(std::size_t k) const {
  if (k >= scales.size()) throw Error(fmt::format("averaging sequence index {} out of range", k));
  if (axes.empty()) return base.scaled(scales[k], about);
  return base.stretched(scales[k], about, axes);
}

ConditionIvResult check_condition_iv(const AveragingSequence& seq, double bound) {
  ConditionIvResult out;
  const int n = seq.base.dim();
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const Region a = seq.at(k);
    out.ratio_trace.push_back(quermassintegral(a, n - 1) / std::pow(volume(a), 1.0 / n));
  }
  if (out.ratio_trace.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.ratio_trace.begin(), out.ratio_trace.end());
  out.bounded = *hi / *lo <= bound;
  return out;
}

}  // namespace perscale
