#include "nlfb/grid.hpp"

#include <algorithm>
#include <cmath>

namespace nlfb {

ExteriorSide ExteriorSide::constant(double c) {
  if (c < 0.0) throw std::invalid_argument("exterior: constant must be >= 0");
  ExteriorSide e;
  e.kind = Kind::Constant;
  e.value = c;
  return e;
}

ExteriorSide ExteriorSide::power(double A, double beta) {
  if (A < 0.0) throw std::invalid_argument("exterior: amplitude must be >= 0");
  ExteriorSide e;
  e.kind = Kind::Power;
  e.amplitude = A;
  e.exponent = beta;
  return e;
}

ExteriorSide ExteriorSide::sampled(std::vector<double> xs,
                                   std::vector<double> vals, double tail_A,
                                   double tail_beta) {
  if (xs.size() != vals.size() || xs.size() < 2)
    throw std::invalid_argument("exterior: bad sampled descriptor");
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw std::invalid_argument("exterior: sampled abscissae must increase");
  ExteriorSide e;
  e.kind = Kind::Sampled;
  e.xs = std::move(xs);
  e.vals = std::move(vals);
  e.amplitude = tail_A;
  e.exponent = tail_beta;
  return e;
}

double ExteriorSide::eval(double r) const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return value;
    case Kind::Power: return amplitude * std::pow(r, exponent);
    case Kind::Sampled: {
      if (r >= xs.back()) return amplitude * std::pow(r, exponent);
      if (r <= xs.front()) return vals.front();
      auto it = std::upper_bound(xs.begin(), xs.end(), r);
      const std::size_t j = static_cast<std::size_t>(it - xs.begin());
      const double t = (r - xs[j - 1]) / (xs[j] - xs[j - 1]);
      return (1.0 - t) * vals[j - 1] + t * vals[j];
    }
  }
  return 0.0;
}

double ExteriorSide::growth_exponent() const {
  switch (kind) {
    case Kind::Zero:
    case Kind::Constant: return 0.0;
    case Kind::Power:
    case Kind::Sampled: return amplitude == 0.0 ? 0.0 : exponent;
  }
  return 0.0;
}

double ExteriorSide::growth_amplitude() const {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return value;
    case Kind::Power: return amplitude;
    case Kind::Sampled: {
      double m = amplitude;
      for (double v : vals) m = std::max(m, std::abs(v));
      return m;
    }
  }
  return 0.0;
}

void validate_exterior(const ExteriorSide& side, double s) {
  if (side.growth_amplitude() > 0.0 && side.growth_exponent() >= 2.0 * s)
    throw std::invalid_argument(
        "exterior: power growth >= 2s, not in L^1_{2s}");
}

GridFunction::GridFunction(Grid g, Eigen::VectorXd values, ExteriorSide left,
                           ExteriorSide right)
    : grid_(g), v_(std::move(values)), left_(std::move(left)),
      right_(std::move(right)) {
  if (v_.size() != grid_.n)
    throw std::invalid_argument("grid function: value count mismatch");
  if (!v_.allFinite())
    throw std::invalid_argument("grid function: non-finite nodal value");
}

GridFunction GridFunction::constant(const Grid& g, double c) {
  return GridFunction(g, Eigen::VectorXd::Constant(g.n, c),
                      ExteriorSide::constant(std::max(c, 0.0)),
                      ExteriorSide::constant(std::max(c, 0.0)));
}

GridFunction GridFunction::sample(const Grid& g,
                                  const std::function<double(double)>& f,
                                  ExteriorSide left, ExteriorSide right) {
  Eigen::VectorXd v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = f(g.x(i));
  return GridFunction(g, std::move(v), std::move(left), std::move(right));
}

double GridFunction::eval(double x) const {
  if (x < grid_.min) return left_.eval(std::abs(x));
  if (x > grid_.max) return right_.eval(std::abs(x));
  const double t = (x - grid_.min) / grid_.h();
  int i = static_cast<int>(std::floor(t));
  i = std::max(0, std::min(grid_.n - 2, i));
  const double frac = t - i;
  return (1.0 - frac) * v_[i] + frac * v_[i + 1];
}

double GridFunction::node(long long i) const {
  if (i >= 0 && i < grid_.n) return v_[static_cast<int>(i)];
  const double x = grid_.min + static_cast<double>(i) * grid_.h();
  return (i < 0) ? left_.eval(std::abs(x)) : right_.eval(std::abs(x));
}

Region::Region(std::vector<Interval> parts) : parts_(std::move(parts)) {
  std::sort(parts_.begin(), parts_.end(),
            [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    if (parts_[k].end <= parts_[k].begin)
      throw std::invalid_argument("region: empty interval");
    if (k > 0 && parts_[k].begin < parts_[k - 1].end)
      throw std::invalid_argument("region: overlapping intervals");
  }
}

Region Region::interval(int begin, int end) {
  return Region({Interval{begin, end}});
}

Region Region::open_interval(const Grid& g, double a, double b) {
  const double eps = 1e-12 * (g.max - g.min);
  int lo = static_cast<int>(std::ceil((a + eps - g.min) / g.h()));
  int hi = static_cast<int>(std::floor((b - eps - g.min) / g.h()));
  // nodes exactly on a or b are boundary, not interior
  while (lo < g.n && g.x(lo) <= a + eps) ++lo;
  while (hi >= 0 && g.x(hi) >= b - eps) --hi;
  lo = std::max(lo, 0);
  hi = std::min(hi, g.n - 1);
  if (lo > hi) return Region();
  return interval(lo, hi + 1);
}

Region Region::ball(const Grid& g, double x0, double r) {
  const double eps = 1e-12 * (g.max - g.min);
  int lo = std::max(0, static_cast<int>(std::ceil((x0 - r - g.min) / g.h() - eps)));
  int hi = std::min(g.n - 1,
                    static_cast<int>(std::floor((x0 + r - g.min) / g.h() + eps)));
  if (lo > hi) return Region();
  return interval(lo, hi + 1);
}

Region Region::from_mask(const std::vector<bool>& mask) {
  std::vector<Interval> parts;
  int i = 0;
  const int n = static_cast<int>(mask.size());
  while (i < n) {
    if (mask[i]) {
      int j = i;
      while (j < n && mask[j]) ++j;
      parts.push_back({i, j});
      i = j;
    } else {
      ++i;
    }
  }
  return Region(std::move(parts));
}

bool Region::contains(int i) const {
  for (const auto& p : parts_)
    if (i >= p.begin && i < p.end) return true;
  return false;
}

int Region::count() const {
  int c = 0;
  for (const auto& p : parts_) c += p.end - p.begin;
  return c;
}

std::vector<int> Region::indices() const {
  std::vector<int> out;
  out.reserve(count());
  for (const auto& p : parts_)
    for (int i = p.begin; i < p.end; ++i) out.push_back(i);
  return out;
}

Region Region::complement(int n) const {
  std::vector<bool> mask(n, true);
  for (int i : indices())
    if (i >= 0 && i < n) mask[i] = false;
  return from_mask(mask);
}

Region Region::intersect(const Region& other) const {
  int n = 0;
  for (const auto& p : parts_) n = std::max(n, p.end);
  for (const auto& p : other.parts_) n = std::max(n, p.end);
  std::vector<bool> mask(n, false);
  for (int i : indices()) mask[i] = other.contains(i);
  return from_mask(mask);
}

}  // namespace nlfb
