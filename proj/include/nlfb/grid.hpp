#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nlfb {

/// Uniform 1D grid: nodes x_i = min + i h, i = 0..n-1, h = (max-min)/(n-1).
/// All solver machinery in this project is 1D; dimension 2 appears only in
/// kernel reduction and the polar cross-check quadrature.
struct Grid {
  double min = 0.0;
  double max = 1.0;
  int n = 0;

  Grid() = default;
  Grid(double min_, double max_, int n_) : min(min_), max(max_), n(n_) {
    if (!(min < max)) throw std::invalid_argument("grid: min < max required");
    if (n < 8) throw std::invalid_argument("grid: need at least 8 nodes");
  }

  double h() const { return (max - min) / (n - 1); }
  double x(int i) const { return min + i * h(); }
  /// Index of the node nearest to x (clamped).
  int nearest(double x_) const {
    int i = static_cast<int>(std::lround((x_ - min) / h()));
    return std::max(0, std::min(n - 1, i));
  }
  bool contains(double x_) const { return x_ >= min && x_ <= max; }
};

/// Analytic description of a grid function on one side of the grid window.
/// power means u(x) = A |x - edge_anchor|^beta ... we anchor power growth at
/// the window edge coordinate origin: u(x) = A |x|^beta, evaluated in
/// absolute coordinates, which is what s-homogeneous blow-up data needs.
/// sampled carries values on an increasing abscissa list out to R_max and a
/// power tail beyond.
struct ExteriorSide {
  enum class Kind { Zero, Constant, Power, Sampled };
  Kind kind = Kind::Zero;
  double value = 0.0;          // Constant
  double amplitude = 0.0;      // Power / Sampled tail: A
  double exponent = 0.0;       // Power / Sampled tail: beta
  std::vector<double> xs;      // Sampled: |x| abscissae, increasing
  std::vector<double> vals;    // Sampled: values

  static ExteriorSide zero() { return {}; }
  static ExteriorSide constant(double c);
  static ExteriorSide power(double A, double beta);
  static ExteriorSide sampled(std::vector<double> xs, std::vector<double> vals,
                              double tail_A, double tail_beta);

  /// Evaluate at distance-from-origin coordinate |x| = r (r beyond the grid
  /// window on this side).
  double eval(double r) const;

  /// Largest power exponent governing the far field (0 for zero/constant).
  double growth_exponent() const;
  /// Far-field amplitude bound matching growth_exponent().
  double growth_amplitude() const;
};

/// Membership in L^1_{2s} requires the far-field exponent < 2s.
void validate_exterior(const ExteriorSide& side, double s);

/// Nodal values on a uniform grid plus analytic exterior descriptors.
/// Evaluation is piecewise linear inside the window and descriptor-driven
/// outside; eval() is total on R.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Grid g, Eigen::VectorXd values,
               ExteriorSide left = ExteriorSide::zero(),
               ExteriorSide right = ExteriorSide::zero());

  static GridFunction constant(const Grid& g, double c);
  static GridFunction sample(const Grid& g,
                             const std::function<double(double)>& f,
                             ExteriorSide left = ExteriorSide::zero(),
                             ExteriorSide right = ExteriorSide::zero());

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXd& values() const { return v_; }
  Eigen::VectorXd& values() { return v_; }
  const ExteriorSide& left() const { return left_; }
  const ExteriorSide& right() const { return right_; }

  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }

  /// Piecewise-linear / descriptor evaluation, defined on all of R.
  double eval(double x) const;

  /// Value at virtual lattice node index i (may lie outside [0, n)).
  double node(long long i) const;

 private:
  Grid grid_;
  Eigen::VectorXd v_;
  ExteriorSide left_, right_;
};

/// Union of disjoint half-open index intervals [begin, end) on a 1D grid,
/// stored sorted. Represents Omega, contact sets and balls.
class Region {
 public:
  struct Interval {
    int begin = 0;
    int end = 0;  // exclusive
  };

  Region() = default;
  explicit Region(std::vector<Interval> parts);

  static Region interval(int begin, int end);
  /// Nodes of g strictly inside (a, b).
  static Region open_interval(const Grid& g, double a, double b);
  /// Nodes of g within the closed ball B_r(x0).
  static Region ball(const Grid& g, double x0, double r);
  static Region from_mask(const std::vector<bool>& mask);

  const std::vector<Interval>& parts() const { return parts_; }
  bool contains(int i) const;
  int count() const;
  std::vector<int> indices() const;
  bool empty() const { return parts_.empty(); }

  Region complement(int n) const;
  Region intersect(const Region& other) const;

 private:
  std::vector<Interval> parts_;
};

}  // namespace nlfb
