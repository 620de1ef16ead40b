// Deterministic ground truth on the rod family (interval domain, finite
// velocity set): characteristic semigroup stepping, the principal eigen
// triple, and the extinction probability.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nbp/cross_sections.hpp"
#include "nbp/geometry.hpp"

namespace nbp {

// Uniform spatial cells over (a, b) with one layer per discrete velocity.
// State vectors are indexed [velocity * n_cells + cell].
struct RodGrid {
  double a = 0.0;
  double b = 1.0;
  std::size_t n_cells = 0;
  double h = 0.0;
  double dt = 0.0;                 // one characteristic step
  std::vector<Vec3> velocities;
  std::vector<int> shifts;         // cells moved per step, signed

  std::size_t size() const { return n_cells * velocities.size(); }
  std::size_t index(std::size_t cell, std::size_t vel) const {
    return vel * n_cells + cell;
  }
  double center(std::size_t cell) const {
    return a + (static_cast<double>(cell) + 0.5) * h;
  }
};

// Validates the rod contract: interval domain, discrete velocities with
// nonzero axial components whose speeds are integer multiples of the
// slowest, n_cells >= 16, and dt * sup(sigma) <= 1. Violations are CFL
// errors.
RodGrid make_rod_grid(const NbpModel& model, std::size_t n_cells);

// Grid function with piecewise-linear interpolation in x per velocity
// (clamped to end-cell values beyond the outermost centers).
class GridField {
 public:
  GridField() = default;
  GridField(RodGrid grid, std::vector<double> values);

  double at(const Vec3& r, std::size_t vgroup) const;
  double at_point(const PhasePoint& x) const;
  double value(std::size_t cell, std::size_t vel) const {
    return values_[grid_.index(cell, vel)];
  }
  const std::vector<double>& values() const { return values_; }
  const RodGrid& grid() const { return grid_; }
  double min_value() const;
  double max_value() const;

 private:
  RodGrid grid_;
  std::vector<double> values_;
};

struct EigenTriple {
  double lambda = 0.0;           // growth rate, log(step ratio)/dt
  GridField phi;                 // right eigenfunction, <phi, phi_tilde> = 1
  GridField phi_tilde;           // left eigenfunction density
  double one_tilde = 0.0;        // <1, phi_tilde>, reported normalization
  std::size_t iterations = 0;
};

struct DenseEigenResult {
  double lambda = 0.0;
  double lambda_second = 0.0;    // next-largest real part, reported only
};

struct SurvivalField {
  GridField w;
  GridField p;                   // 1 - w
  bool certainly_extinct = false;  // w == 1 reported (lambda* <= 0 regime)
  double stationary_residual = 0.0;
  std::size_t iterations = 0;

  // Constant field over a fresh 16-cell grid; serves spaceless instances.
  static SurvivalField constant(const NbpModel& model, double w_value);
};

// One application of the characteristic step operator (exact shift followed
// by the collision update) to a grid vector; inflow boundary value 0.
std::vector<double> apply_step(const RodGrid& grid, const NbpModel& model,
                               const std::vector<double>& g);

// The step operator assembled column-by-column from apply_step; power
// iteration and the dense cross-check consume this same matrix.
std::vector<std::vector<double>> assemble_step_matrix(const RodGrid& grid,
                                                      const NbpModel& model);

// psi_t[g] on the grid; t must be an integer number of grid steps.
std::vector<double> step_psi(const RodGrid& grid, const NbpModel& model,
                             std::vector<double> g, double t);

// Two-sided power iteration with renormalization; stops when the Rayleigh
// estimate of the growth rate changes by less than tol. Throws after
// max_iterations with the last residual.
EigenTriple power_iteration(const RodGrid& grid, const NbpModel& model,
                            double tol, std::size_t max_iterations = 2000000);

DenseEigenResult dense_principal_eigenvalue(const RodGrid& grid,
                                            const NbpModel& model);

// Extinction probability by monotone implicit time-stepping of u_t[0];
// the fixed point satisfies L w + G[w] = 0 for the discrete upwind
// transport+scatter generator L exactly, and the final residual is the
// reported certificate. Iteration must be monotone or an error is raised.
SurvivalField solve_w(const RodGrid& grid, const NbpModel& model, double horizon,
                      double tol);

// Residual ||L w + G[w]||_inf over interior cells for a given field.
double stationary_residual(const RodGrid& grid, const NbpModel& model,
                           const std::vector<double>& w);

// Minimal root of G[w] = 0 for a spatially homogeneous instance (monotone
// pgf iteration from zero); the zero-transport reduction of solve_w.
double spaceless_extinction(const FissionLaw& law, std::size_t vin, double tol);

// Grid quadrature <f, g> = h * sum f g.
double grid_inner(const RodGrid& grid, const std::vector<double>& f,
                  const std::vector<double>& g);

}  // namespace nbp
