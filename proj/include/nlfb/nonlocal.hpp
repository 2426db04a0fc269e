#pragma once

#include <Eigen/Dense>
#include <optional>

#include "nlfb/grid.hpp"
#include "nlfb/kernel.hpp"

namespace nlfb {

/// Execution policy for the data-parallel kernels. Serial is the reference
/// implementation kept for testing; Parallel uses OpenMP. Both orders of
/// summation are fixed so results are deterministic and identical.
enum class Exec { Serial, Parallel };

/// Discrete interaction weights of a 1D kernel on a uniform grid.
///
/// The operator Lu(x) = int_R (2u(x) - u(x+h) - u(x-h)) K(h) dh (equal to the
/// factor-2 principal-value form by symmetry of K) is discretized on the
/// positive half-axis as
///   Lu(x_i) = 2 [ sum_k gamma_k d_k + tail_i ],
///   d_k = 2 u_i - u_{i+k} - u_{i-k},
/// where the first cell [0,h] uses the quadratic second-difference model
/// against the kernel second moment, cells [kh,(k+1)h] use linear
/// interpolation of d against exact kernel cell moments, node indices
/// continue onto a virtual lattice evaluated from the exterior descriptor,
/// and tail_i integrates the remaining far field against the descriptor.
///
/// The weights are translation invariant, so the in-grid collocation matrix
/// is symmetric Toeplitz with nonpositive off-diagonal entries and constant
/// diagonal (Z-matrix / discrete maximum principle structure).
struct OperatorWeights {
  Kernel kernel;
  Grid grid;
  double h = 0.0;
  int kmax = 0;        // virtual lattice extent; cells k = 1..kmax
  double T = 0.0;      // (kmax+1) h, start of the analytic tail
  std::vector<double> gamma;  // gamma[k], k = 1..kmax (gamma[0] unused)
  double gamma_sum = 0.0;
  double tail_mass = 0.0;     // int_T^inf K(t) dt
  double tol = 1e-12;

  double diag() const { return 4.0 * (gamma_sum + tail_mass); }
};

/// Builds the weights. ext_factor controls how far the virtual lattice
/// extends beyond the window (in units of the window span).
OperatorWeights make_weights(const Kernel& k, const Grid& g,
                             double ext_factor = 2.0, double tol = 1e-12);

/// Pointwise Lu(x_i) using u's own exterior descriptors.
double apply_node(const OperatorWeights& w, const GridFunction& u, int i);

/// Lu at every node of the region (ordered as region.indices()).
Eigen::VectorXd apply_region(const OperatorWeights& w, const GridFunction& u,
                             const Region& nodes, Exec exec = Exec::Parallel);

/// Independent cross-check route: evaluates the one-sided principal-value
/// form 2 p.v. int (u(x) - u(x+h)) K(h) dh by adaptive quadrature on the
/// callable, with a Taylor model of the second difference near 0. Used as
/// the second quadrature form of the operator and for n = 2 kernels in the
/// dimensional-reduction consistency check.
double apply_callable(const Kernel& k, const std::function<double(double)>& u,
                      double x, double inner_radius = 1e-4,
                      double far_radius = 1e8, double tol = 1e-11);

/// 2D evaluation of Lu for u(y) = f(y . e) by polar quadrature, independent
/// of reduce_to_1d. f must decay (or be extended) so the tail integral
/// converges; only used with rapidly decaying test profiles.
double apply_callable_2d(const Kernel& k2,
                         const std::function<double(double)>& f, double x_dot_e,
                         double tol = 1e-9);

/// Exterior-data term D_i: the contribution of g's values beyond the grid
/// window to Lu(x_i), so that Lu(x_i) = (A u)_i - D_i(g) for the dense
/// matrix below.
double exterior_term(const OperatorWeights& w, const GridFunction& g, int i);

/// Dense collocation matrix over all grid nodes (Toeplitz fill).
Eigen::MatrixXd collocation_matrix(const OperatorWeights& w,
                                   Exec exec = Exec::Parallel);

/// Galerkin-side view of the same weights: A = h * collocation matrix over
/// all grid nodes, so that u^T A v = h sum_i v_i Lu(x_i) for u, v with zero
/// exterior. For v vanishing outside Omega this equals the energy pairing
/// E_{(Omega^c x Omega^c)^c}(u, v); exterior data enters through the load
/// vector of make_energy, not through A. Symmetric positive definite with
/// Z-matrix structure by construction.
struct StiffnessForm {
  Kernel kernel;
  Grid grid;
  Region omega;
  Eigen::MatrixXd A;
  double tol = 0.0;
};

StiffnessForm assemble_stiffness(const Kernel& k, const Grid& g,
                                 const Region& omega,
                                 Exec exec = Exec::Parallel);

/// Discrete Dirichlet energy E_{(Omega^c x Omega^c)^c}(u, u): the pair sum
/// with weights 2 h gamma over node pairs meeting Omega, plus exterior tail
/// terms for Omega nodes against u's descriptor. Returns nullopt when the
/// descriptor growth makes the absolute energy divergent (exponent >= s).
std::optional<double> dirichlet_energy(const OperatorWeights& w,
                                       const GridFunction& u,
                                       const Region& omega,
                                       Exec exec = Exec::Parallel);

/// Quadratic form of the same energy in the unknowns u|Omega with all other
/// values (grid complement and exterior) taken from `data`:
///   E(u) = u^T G u - 2 l^T u + c0.
/// G equals h times the collocation matrix restricted to Omega, so Galerkin
/// minimization and collocation solves coincide exactly (exact discrete
/// summation by parts).
struct QuadraticEnergy {
  Region omega;
  std::vector<int> idx;
  Eigen::MatrixXd G;
  Eigen::VectorXd l;
  double c0 = 0.0;
  bool c0_finite = true;

  double value(const Eigen::VectorXd& u_omega) const {
    return u_omega.dot(G * u_omega) - 2.0 * l.dot(u_omega) + c0;
  }
};

QuadraticEnergy make_energy(const OperatorWeights& w, const Region& omega,
                            const GridFunction& data,
                            Exec exec = Exec::Parallel);

/// Extremal operator M^- u(x_i) = inf over kernels in the envelope class of
/// Lu(x_i). The infimum decouples pointwise in h: the Lambda envelope where
/// the symmetrized second difference is negative, lambda where positive.
double extremal_minus(double lam, double Lam, double s, const GridFunction& u,
                      int i);

/// c_beta = M^-(x_+^beta)(1), evaluated by dedicated high-accuracy
/// quadrature on the closed-form profile.
double extremal_minus_power_profile(double lam, double Lam, double s,
                                    double beta);

/// The unique root beta0 of beta -> c_beta in
/// (max(0, 2s-1), min(1, 2s)); bisection to tol_beta. Throws when the
/// bracket does not change sign.
double beta0(double lam, double Lam, double s, double tol_beta = 1e-3);

}  // namespace nlfb
