#include "nbp/rod_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nbp {

RodGrid make_rod_grid(const NbpModel& model, std::size_t n_cells) {
  if (!model.domain.is_interval())
    throw std::invalid_argument("rod grid: interval domain required");
  if (!model.velocity_space.is_discrete())
    throw std::invalid_argument("rod grid: discrete velocity set required");
  if (n_cells < 16) throw std::invalid_argument("rod grid: n_cells >= 16 required");

  const auto& d = std::get<IntervalDomain>(model.domain.variant());
  RodGrid grid;
  grid.a = d.a;
  grid.b = d.b;
  grid.n_cells = n_cells;
  grid.h = (d.b - d.a) / static_cast<double>(n_cells);
  grid.velocities = model.velocity_space.velocities();

  double min_speed = std::numeric_limits<double>::infinity();
  for (const auto& v : grid.velocities) {
    if (v[0] == 0.0)
      throw std::invalid_argument("rod grid: zero axial velocity component");
    min_speed = std::min(min_speed, std::abs(v[0]));
  }
  // CFL contract: each speed advects an integer number of cells per step.
  grid.dt = grid.h / min_speed;
  for (const auto& v : grid.velocities) {
    const double cells = v[0] * grid.dt / grid.h;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 || rounded == 0.0)
      throw std::invalid_argument(
          "rod grid: CFL violation (speeds must be integer multiples of the slowest)");
    grid.shifts.push_back(static_cast<int>(rounded));
  }
  const double sup_sigma = model.sigma_s.sup() + model.sigma_f.sup();
  if (grid.dt * sup_sigma > 1.0)
    throw std::invalid_argument("rod grid: CFL violation (dt * sup sigma > 1)");
  return grid;
}

GridField::GridField(RodGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("grid field: value vector size mismatch");
}

double GridField::at(const Vec3& r, std::size_t vgroup) const {
  const double x = r[0];
  const std::size_t n = grid_.n_cells;
  const double first = grid_.center(0);
  const double last = grid_.center(n - 1);
  if (x <= first) return value(0, vgroup);
  if (x >= last) return value(n - 1, vgroup);
  const double s = (x - first) / grid_.h;
  const auto i = static_cast<std::size_t>(s);
  const double frac = s - static_cast<double>(i);
  return (1.0 - frac) * value(i, vgroup) + frac * value(i + 1, vgroup);
}

double GridField::at_point(const PhasePoint& x) const {
  std::size_t vg = 0;
  for (std::size_t j = 0; j < grid_.velocities.size(); ++j) {
    const auto& u = grid_.velocities[j];
    if (std::abs(u[0] - x.v[0]) <= 1e-9 && std::abs(u[1] - x.v[1]) <= 1e-9 &&
        std::abs(u[2] - x.v[2]) <= 1e-9) {
      vg = j;
      return at(x.r, vg);
    }
  }
  throw std::invalid_argument("grid field: velocity not on grid");
}

double GridField::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}
double GridField::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

SurvivalField SurvivalField::constant(const NbpModel& model, double w_value) {
  RodGrid grid = make_rod_grid(model, 16);
  std::vector<double> wv(grid.size(), w_value);
  std::vector<double> pv(grid.size(), 1.0 - w_value);
  SurvivalField f;
  f.w = GridField(grid, std::move(wv));
  f.p = GridField(grid, std::move(pv));
  f.certainly_extinct = (w_value >= 1.0);
  return f;
}

namespace {

struct RodOperator {
  const RodGrid& grid;
  std::size_t k;
  std::vector<double> sig_s;            // [index]
  std::vector<double> sig_f;            // [index]
  std::vector<std::vector<double>> ps;  // [vin][vout] scatter masses
  std::vector<std::vector<double>> yf;  // [vin][vout] fission yield masses

  RodOperator(const RodGrid& g, const NbpModel& model)
      : grid(g), k(g.velocities.size()) {
    sig_s.resize(g.size());
    sig_f.resize(g.size());
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < g.n_cells; ++i) {
        const Vec3 r{g.center(i), 0.0, 0.0};
        sig_s[g.index(i, j)] = model.sigma_s.at(r, j);
        sig_f[g.index(i, j)] = model.sigma_f.at(r, j);
      }
    ps.assign(k, std::vector<double>(k, 0.0));
    yf.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t j2 = 0; j2 < k; ++j2) {
        ps[j][j2] = model.pi_s.mass(model.velocity_space, j, j2);
        yf[j][j2] = model.fission.yield_mass(model.velocity_space, j, j2);
      }
  }
};

}  // namespace

namespace {

std::vector<double> apply_step_with(const RodGrid& grid, const RodOperator& op,
                                    const std::vector<double>& g) {
  const std::size_t n = grid.n_cells;
  const std::size_t k = grid.velocities.size();
  std::vector<double> adv(grid.size(), 0.0);
  // Backward-equation advection: the evaluation point moves downstream,
  // psi(x) <- psi(x + v dt), with exits valued 0.
  for (std::size_t j = 0; j < k; ++j) {
    const int s = grid.shifts[j];
    for (std::size_t i = 0; i < n; ++i) {
      const long src = static_cast<long>(i) + s;
      if (src >= 0 && src < static_cast<long>(n))
        adv[grid.index(i, j)] = g[grid.index(static_cast<std::size_t>(src), j)];
    }
  }
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t idx = grid.index(i, j);
      double gain = 0.0;
      for (std::size_t j2 = 0; j2 < k; ++j2)
        gain += (op.sig_s[idx] * op.ps[j][j2] + op.sig_f[idx] * op.yf[j][j2]) *
                adv[grid.index(i, j2)];
      const double loss = (op.sig_s[idx] + op.sig_f[idx]) * adv[idx];
      out[idx] = adv[idx] + grid.dt * (gain - loss);
    }
  }
  return out;
}

}  // namespace

std::vector<double> apply_step(const RodGrid& grid, const NbpModel& model,
                               const std::vector<double>& g) {
  RodOperator op(grid, model);
  return apply_step_with(grid, op, g);
}

std::vector<std::vector<double>> assemble_step_matrix(const RodGrid& grid,
                                                      const NbpModel& model) {
  RodOperator op(grid, model);
  const std::size_t m = grid.size();
  std::vector<std::vector<double>> cols(m);
  std::vector<double> e(m, 0.0);
  for (std::size_t c = 0; c < m; ++c) {
    e[c] = 1.0;
    cols[c] = apply_step_with(grid, op, e);
    e[c] = 0.0;
  }
  return cols;
}

std::vector<double> step_psi(const RodGrid& grid, const NbpModel& model,
                             std::vector<double> g, double t) {
  if (t < 0.0) throw std::invalid_argument("step_psi: negative time");
  const double steps = t / grid.dt;
  const double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    throw std::invalid_argument("step_psi: time is not a whole number of grid steps");
  const auto n_steps = static_cast<std::size_t>(rounded);
  RodOperator op(grid, model);
  for (std::size_t s = 0; s < n_steps; ++s) g = apply_step_with(grid, op, g);
  return g;
}

EigenTriple power_iteration(const RodGrid& grid, const NbpModel& model, double tol,
                            std::size_t max_iterations) {
  const auto cols = assemble_step_matrix(grid, model);
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd M(m, m);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index r = 0; r < m; ++r) M(r, c) = cols[c][r];

  Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(m);
  double lambda_prev = std::numeric_limits<double>::quiet_NaN();
  double lambda = 0.0;
  std::size_t stable = 0;
  std::size_t it = 0;
  double last_change = std::numeric_limits<double>::infinity();
  for (; it < max_iterations; ++it) {
    Eigen::VectorXd Mv = M * v;
    Eigen::VectorXd Mtu = M.transpose() * u;
    const double rho = u.dot(Mv) / u.dot(v);
    if (!(rho > 0.0))
      throw std::runtime_error("power_iteration: nonpositive step ratio");
    lambda = std::log(rho) / grid.dt;
    v = Mv / Mv.norm();
    u = Mtu / Mtu.norm();
    if (std::isfinite(lambda_prev)) {
      last_change = std::abs(lambda - lambda_prev);
      stable = (last_change < tol) ? stable + 1 : 0;
      if (stable >= 3 && it >= 10) break;
    }
    lambda_prev = lambda;
  }
  if (it >= max_iterations) {
    std::ostringstream os;
    os << "power_iteration: no convergence after " << max_iterations
       << " iterations, last change " << last_change;
    throw std::runtime_error(os.str());
  }

  // Normalize: phi > 0 with max 1, then <phi, phi_tilde> = 1 in grid
  // quadrature.
  if (v.maxCoeff() <= 0.0) v = -v;
  if (u.maxCoeff() <= 0.0) u = -u;
  if (v.minCoeff() < 0.0 || u.minCoeff() < 0.0)
    throw std::runtime_error("power_iteration: eigenvector not positive");
  v /= v.maxCoeff();
  std::vector<double> phi(v.data(), v.data() + m);
  std::vector<double> phit(u.data(), u.data() + m);
  const double inner = grid_inner(grid, phi, phit);
  for (auto& x : phit) x /= inner;

  EigenTriple triple;
  triple.lambda = lambda;
  triple.phi = GridField(grid, std::move(phi));
  triple.phi_tilde = GridField(grid, std::move(phit));
  std::vector<double> ones(grid.size(), 1.0);
  triple.one_tilde = grid_inner(grid, ones, triple.phi_tilde.values());
  triple.iterations = it;
  return triple;
}

DenseEigenResult dense_principal_eigenvalue(const RodGrid& grid,
                                            const NbpModel& model) {
  const auto cols = assemble_step_matrix(grid, model);
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd M(m, m);
  for (Eigen::Index c = 0; c < m; ++c)
    for (Eigen::Index r = 0; r < m; ++r) M(r, c) = cols[c][r];

  Eigen::EigenSolver<Eigen::MatrixXd> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense eigensolver failed");
  const auto& vals = solver.eigenvalues();
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const double re = vals[i].real();
    if (re > best) {
      second = best;
      best = re;
    } else if (re > second) {
      second = re;
    }
  }
  if (!(best > 0.0))
    throw std::runtime_error("dense eigensolver: nonpositive principal ratio");
  DenseEigenResult out;
  out.lambda = std::log(best) / grid.dt;
  out.lambda_second = (second > 0.0) ? std::log(second) / grid.dt
                                     : -std::numeric_limits<double>::infinity();
  return out;
}

namespace {

// Affine upwind transport+scatter generator: returns L w + G[w] with the
// boundary ghost value 1 (stopped-motion convention for extinction fields).
std::vector<double> generator_residual(const RodGrid& grid, const NbpModel& model,
                                       const RodOperator& op,
                                       const std::vector<double>& w) {
  const std::size_t n = grid.n_cells;
  const std::size_t k = grid.velocities.size();
  std::vector<double> res(grid.size(), 0.0);
  std::vector<double> row(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j2 = 0; j2 < k; ++j2) row[j2] = w[grid.index(i, j2)];
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t idx = grid.index(i, j);
      const double speed = std::abs(grid.velocities[j][0]) / grid.h;
      const bool forward = grid.velocities[j][0] > 0.0;
      const long nb = static_cast<long>(i) + (forward ? 1 : -1);
      const double neighbor = (nb >= 0 && nb < static_cast<long>(n))
                                  ? w[grid.index(static_cast<std::size_t>(nb), j)]
                                  : 1.0;
      double advect = speed * (neighbor - w[idx]);
      double scatter = 0.0;
      for (std::size_t j2 = 0; j2 < k; ++j2) scatter += op.ps[j][j2] * row[j2];
      scatter = op.sig_s[idx] * (scatter - w[idx]);
      const double fission =
          op.sig_f[idx] *
          (model.fission.expected_product(model.velocity_space, j, row) - w[idx]);
      res[idx] = advect + scatter + fission;
    }
  }
  return res;
}

}  // namespace

double stationary_residual(const RodGrid& grid, const NbpModel& model,
                           const std::vector<double>& w) {
  RodOperator op(grid, model);
  const auto res = generator_residual(grid, model, op, w);
  double m = 0.0;
  for (double r : res) m = std::max(m, std::abs(r));
  return m;
}

SurvivalField solve_w(const RodGrid& grid, const NbpModel& model, double horizon,
                      double tol) {
  RodOperator op(grid, model);
  const std::size_t n = grid.n_cells;
  const std::size_t k = grid.velocities.size();
  const auto m = static_cast<Eigen::Index>(grid.size());

  // Implicit step (I - dt A) u' = u + dt (b + Gamma[u]) with A holding the
  // upwind advection, scatter and the linear -sigma_f part; Gamma is the
  // fission product gain. The fixed point then satisfies L u + G[u] = 0
  // exactly.
  const double dt = 0.5;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto idx = static_cast<Eigen::Index>(grid.index(i, j));
      const double speed = std::abs(grid.velocities[j][0]) / grid.h;
      const bool forward = grid.velocities[j][0] > 0.0;
      const long nb = static_cast<long>(i) + (forward ? 1 : -1);
      A(idx, idx) -= speed;
      if (nb >= 0 && nb < static_cast<long>(n))
        A(idx, static_cast<Eigen::Index>(grid.index(static_cast<std::size_t>(nb), j))) +=
            speed;
      else
        b(idx) += speed;  // ghost value 1
      for (std::size_t j2 = 0; j2 < k; ++j2)
        A(idx, static_cast<Eigen::Index>(grid.index(i, j2))) +=
            op.sig_s[grid.index(i, j)] * op.ps[j][j2];
      A(idx, idx) -= op.sig_s[grid.index(i, j)];
      A(idx, idx) -= op.sig_f[grid.index(i, j)];
    }
  }
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m) - dt * A;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);

  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  std::vector<double> uvec(grid.size(), 0.0);
  const auto max_steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  double residual = std::numeric_limits<double>::infinity();
  std::size_t steps = 0;
  std::vector<double> row(k, 0.0);
  for (; steps < max_steps; ++steps) {
    Eigen::VectorXd rhs = u + dt * b;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j2 = 0; j2 < k; ++j2)
        row[j2] = u(static_cast<Eigen::Index>(grid.index(i, j2)));
      for (std::size_t j = 0; j < k; ++j) {
        const auto idx = static_cast<Eigen::Index>(grid.index(i, j));
        rhs(idx) += dt * op.sig_f[grid.index(i, j)] *
                    model.fission.expected_product(model.velocity_space, j, row);
      }
    }
    Eigen::VectorXd next = lu.solve(rhs);
    if ((next - u).minCoeff() < -1e-10)
      throw std::runtime_error("solve_w: non-monotone iteration (numerical fault)");
    u = next;
    for (Eigen::Index i = 0; i < m; ++i) uvec[static_cast<std::size_t>(i)] = u(i);
    const auto res = generator_residual(grid, model, op, uvec);
    residual = 0.0;
    for (double r : res) residual = std::max(residual, std::abs(r));
    if (residual <= tol) break;
  }
  if (residual > tol) {
    std::ostringstream os;
    os << "solve_w: residual " << residual << " above tolerance " << tol
       << " after horizon " << horizon;
    throw std::runtime_error(os.str());
  }

  SurvivalField field;
  field.stationary_residual = residual;
  field.iterations = steps + 1;
  double min_w = 1.0;
  for (double x : uvec) min_w = std::min(min_w, x);
  const bool extinct = (min_w >= 1.0 - 1e-6);
  if (extinct)
    std::fill(uvec.begin(), uvec.end(), 1.0);
  std::vector<double> pvec(uvec.size());
  for (std::size_t i = 0; i < uvec.size(); ++i) pvec[i] = 1.0 - uvec[i];
  field.certainly_extinct = extinct;
  field.w = GridField(grid, std::move(uvec));
  field.p = GridField(grid, std::move(pvec));
  return field;
}

double spaceless_extinction(const FissionLaw& law, std::size_t vin, double tol) {
  double theta = 0.0;
  for (int it = 0; it < 1000000; ++it) {
    const double next = law.count_pgf(vin, theta);
    if (next < theta - 1e-15)
      throw std::runtime_error("spaceless_extinction: non-monotone iteration");
    const double inc = next - theta;
    theta = next;
    if (inc == 0.0) break;
    // Distance to the limit is at most 2 inc rate/(1-rate) for a contraction
    // (factor 2 covers evaluating the rate below the limit point).
    const double rate = law.count_pgf_prime(vin, theta);
    if (rate < 1.0 && inc < tol && 2.0 * inc * rate / (1.0 - rate) < tol) break;
  }
  return theta;
}

double grid_inner(const RodGrid& grid, const std::vector<double>& f,
                  const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return s * grid.h;
}

}  // namespace nbp
