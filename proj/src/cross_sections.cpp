#include "nbp/cross_sections.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nbp {

RateField RateField::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("rate field values must be finite and >= 0");
  RateField f;
  f.values_ = {{value}};
  return f;
}

RateField RateField::piecewise(std::vector<double> x_breaks,
                               std::vector<std::vector<double>> values) {
  if (x_breaks.size() < 2 || values.size() + 1 != x_breaks.size())
    throw std::invalid_argument("rate field: breaks/values size mismatch");
  if (!std::is_sorted(x_breaks.begin(), x_breaks.end()))
    throw std::invalid_argument("rate field: breaks must be ascending");
  const std::size_t groups = values.front().size();
  for (const auto& row : values) {
    if (row.empty() || row.size() != groups)
      throw std::invalid_argument("rate field: ragged value rows");
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("rate field values must be finite and >= 0");
  }
  RateField f;
  f.x_breaks_ = std::move(x_breaks);
  f.values_ = std::move(values);
  return f;
}

std::size_t RateField::cell_of(double x) const {
  if (x_breaks_.empty()) return 0;
  if (x <= x_breaks_.front()) return 0;
  if (x >= x_breaks_.back()) return values_.size() - 1;
  const auto it = std::upper_bound(x_breaks_.begin(), x_breaks_.end(), x);
  return static_cast<std::size_t>(it - x_breaks_.begin()) - 1;
}

double RateField::at(const Vec3& r, std::size_t vgroup) const {
  const auto& row = values_[cell_of(r[0])];
  return row[vgroup < row.size() ? vgroup : 0];
}

double RateField::sup() const {
  double m = 0.0;
  for (const auto& row : values_)
    for (double v : row) m = std::max(m, v);
  return m;
}

double RateField::inf() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& row : values_)
    for (double v : row) m = std::min(m, v);
  return m;
}

ScatterKernel ScatterKernel::flip() {
  ScatterKernel k;
  k.family_ = ScatterFamily::flip;
  return k;
}

ScatterKernel ScatterKernel::uniform() {
  ScatterKernel k;
  k.family_ = ScatterFamily::uniform;
  return k;
}

ScatterKernel ScatterKernel::table(std::vector<std::vector<double>> rows) {
  ScatterKernel k;
  k.family_ = ScatterFamily::table;
  k.rows_ = std::move(rows);
  return k;
}

ScatterKernel ScatterKernel::isotropic_annulus() {
  ScatterKernel k;
  k.family_ = ScatterFamily::isotropic_annulus;
  return k;
}

namespace {

std::size_t flip_index(const VelocitySpace& vs, std::size_t vin) {
  const Vec3& v = vs.velocities()[vin];
  return vs.index_of({-v[0], -v[1], -v[2]});
}

Vec3 sample_annulus(const VelocitySpace& vs, RngStream& rng) {
  // Uniform over the annulus volume: isotropic direction, speed density
  // proportional to s^2.
  const double u = rng.next_double();
  const double lo3 = vs.v_min() * vs.v_min() * vs.v_min();
  const double hi3 = vs.v_max() * vs.v_max() * vs.v_max();
  const double s = std::cbrt(lo3 + u * (hi3 - lo3));
  const double z = 2.0 * rng.next_double() - 1.0;
  const double phi = 6.283185307179586476925 * rng.next_double();
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * rho * std::cos(phi), s * rho * std::sin(phi), s * z};
}

}  // namespace

void ScatterKernel::validate(const VelocitySpace& vs) const {
  if (family_ == ScatterFamily::isotropic_annulus) {
    if (vs.is_discrete())
      throw std::invalid_argument("isotropic_annulus kernel needs a continuous V");
    return;
  }
  if (!vs.is_discrete())
    throw std::invalid_argument("discrete scatter kernel needs a discrete V");
  const std::size_t k = vs.velocities().size();
  if (family_ == ScatterFamily::flip) {
    for (std::size_t i = 0; i < k; ++i) flip_index(vs, i);  // throws if absent
    return;
  }
  if (family_ == ScatterFamily::table) {
    if (rows_.size() != k)
      throw std::invalid_argument("scatter table: one row per velocity required");
    for (const auto& row : rows_) {
      if (row.size() != k) throw std::invalid_argument("scatter table: ragged row");
      double s = 0.0;
      for (double m : row) {
        if (m < 0.0) throw std::invalid_argument("scatter table: negative mass");
        s += m;
      }
      if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("scatter table: row masses must sum to 1");
    }
  }
}

double ScatterKernel::mass(const VelocitySpace& vs, std::size_t vin,
                           std::size_t vout) const {
  const std::size_t k = vs.velocities().size();
  switch (family_) {
    case ScatterFamily::flip:
      return vout == flip_index(vs, vin) ? 1.0 : 0.0;
    case ScatterFamily::uniform:
      return 1.0 / static_cast<double>(k);
    case ScatterFamily::table:
      return rows_[vin][vout];
    case ScatterFamily::isotropic_annulus:
      throw std::logic_error("mass: continuous kernel");
  }
  return 0.0;
}

double ScatterKernel::density(const VelocitySpace& vs) const {
  if (family_ != ScatterFamily::isotropic_annulus)
    throw std::logic_error("density: discrete kernel");
  return 1.0 / vs.annulus_volume();
}

Vec3 ScatterKernel::sample(const VelocitySpace& vs, const Vec3& vin,
                           RngStream& rng) const {
  switch (family_) {
    case ScatterFamily::flip: {
      return {-vin[0], -vin[1], -vin[2]};
    }
    case ScatterFamily::uniform: {
      return vs.velocities()[rng.uniform_index(vs.velocities().size())];
    }
    case ScatterFamily::table: {
      const std::size_t i = vs.index_of(vin);
      return vs.velocities()[rng.discrete(rows_[i])];
    }
    case ScatterFamily::isotropic_annulus:
      return sample_annulus(vs, rng);
  }
  throw std::logic_error("unreachable");
}

double ScatterKernel::min_mass(const VelocitySpace& vs) const {
  if (family_ == ScatterFamily::isotropic_annulus) return density(vs);
  const std::size_t k = vs.velocities().size();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m = std::min(m, mass(vs, i, j));
  return m;
}

FissionLaw FissionLaw::iid(std::vector<double> count_probs, EmissionFamily emission,
                           std::vector<std::vector<double>> emission_rows) {
  if (count_probs.empty()) throw std::invalid_argument("fission: empty count law");
  double s = 0.0;
  for (double p : count_probs) {
    if (p < 0.0) throw std::invalid_argument("fission: negative count probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12)
    throw std::invalid_argument("fission: count probabilities must sum to 1");
  FissionLaw law;
  law.count_probs_ = std::move(count_probs);
  law.n_max_ = law.count_probs_.size() - 1;
  law.emission_ = emission;
  law.emission_rows_ = std::move(emission_rows);
  return law;
}

FissionLaw FissionLaw::tabulated(std::vector<std::vector<FissionConfig>> configs_per_vin) {
  if (configs_per_vin.empty()) throw std::invalid_argument("fission: empty table");
  FissionLaw law;
  law.tabulated_ = true;
  for (const auto& configs : configs_per_vin) {
    double s = 0.0;
    for (const auto& c : configs) {
      if (c.prob < 0.0) throw std::invalid_argument("fission: negative config probability");
      s += c.prob;
      law.n_max_ = std::max(law.n_max_, c.velocity_indices.size());
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("fission: config probabilities must sum to 1");
  }
  law.configs_ = std::move(configs_per_vin);
  return law;
}

void FissionLaw::validate(const VelocitySpace& vs) const {
  if (tabulated_) {
    if (!vs.is_discrete())
      throw std::invalid_argument("tabulated fission law needs a discrete V");
    if (configs_.size() != vs.velocities().size())
      throw std::invalid_argument("tabulated fission law: one entry per velocity required");
    for (const auto& configs : configs_)
      for (const auto& c : configs)
        for (std::size_t idx : c.velocity_indices)
          if (idx >= vs.velocities().size())
            throw std::invalid_argument("tabulated fission law: bad velocity index");
    return;
  }
  switch (emission_) {
    case EmissionFamily::copy_incoming:
      break;
    case EmissionFamily::flip:
      if (!vs.is_discrete())
        throw std::invalid_argument("flip emission needs a discrete V");
      for (std::size_t i = 0; i < vs.velocities().size(); ++i) flip_index(vs, i);
      break;
    case EmissionFamily::uniform:
      if (!vs.is_discrete())
        throw std::invalid_argument("uniform emission needs a discrete V");
      break;
    case EmissionFamily::table: {
      if (!vs.is_discrete())
        throw std::invalid_argument("table emission needs a discrete V");
      const std::size_t k = vs.velocities().size();
      if (emission_rows_.size() != k)
        throw std::invalid_argument("emission table: one row per velocity required");
      for (const auto& row : emission_rows_) {
        if (row.size() != k) throw std::invalid_argument("emission table: ragged row");
        double s = 0.0;
        for (double m : row) {
          if (m < 0.0) throw std::invalid_argument("emission table: negative mass");
          s += m;
        }
        if (std::abs(s - 1.0) > 1e-12)
          throw std::invalid_argument("emission table: row masses must sum to 1");
      }
      break;
    }
    case EmissionFamily::isotropic_annulus:
      if (vs.is_discrete())
        throw std::invalid_argument("isotropic emission needs a continuous V");
      break;
  }
}

std::vector<double> FissionLaw::emission_masses(const VelocitySpace& vs,
                                                std::size_t vin) const {
  const std::size_t k = vs.velocities().size();
  std::vector<double> q(k, 0.0);
  switch (emission_) {
    case EmissionFamily::copy_incoming:
      q[vin] = 1.0;
      break;
    case EmissionFamily::flip:
      q[flip_index(vs, vin)] = 1.0;
      break;
    case EmissionFamily::uniform:
      std::fill(q.begin(), q.end(), 1.0 / static_cast<double>(k));
      break;
    case EmissionFamily::table:
      q = emission_rows_[vin];
      break;
    case EmissionFamily::isotropic_annulus:
      throw std::logic_error("emission_masses: continuous emission");
  }
  return q;
}

double FissionLaw::mean_count(std::size_t vin) const {
  if (tabulated_) {
    double m = 0.0;
    for (const auto& c : configs_[vin])
      m += c.prob * static_cast<double>(c.velocity_indices.size());
    return m;
  }
  double m = 0.0;
  for (std::size_t n = 0; n < count_probs_.size(); ++n)
    m += count_probs_[n] * static_cast<double>(n);
  return m;
}

double FissionLaw::yield_mass(const VelocitySpace& vs, std::size_t vin,
                              std::size_t vout) const {
  if (tabulated_) {
    double y = 0.0;
    for (const auto& c : configs_[vin]) {
      std::size_t hits = 0;
      for (std::size_t idx : c.velocity_indices) hits += (idx == vout);
      y += c.prob * static_cast<double>(hits);
    }
    return y;
  }
  return mean_count(vin) * emission_masses(vs, vin)[vout];
}

double FissionLaw::yield_density(const VelocitySpace& vs, std::size_t vin) const {
  if (tabulated_ || emission_ != EmissionFamily::isotropic_annulus)
    throw std::logic_error("yield_density: not an annulus law");
  return mean_count(vin) / vs.annulus_volume();
}

double FissionLaw::count_pgf(std::size_t vin, double theta) const {
  if (tabulated_) {
    double s = 0.0;
    for (const auto& c : configs_[vin])
      s += c.prob * std::pow(theta, static_cast<double>(c.velocity_indices.size()));
    return s;
  }
  double s = 0.0;
  double t = 1.0;
  for (std::size_t n = 0; n < count_probs_.size(); ++n) {
    s += count_probs_[n] * t;
    t *= theta;
  }
  return s;
}

double FissionLaw::count_pgf_prime(std::size_t vin, double theta) const {
  if (tabulated_) {
    double s = 0.0;
    for (const auto& c : configs_[vin]) {
      const auto n = static_cast<double>(c.velocity_indices.size());
      if (n > 0.0) s += c.prob * n * std::pow(theta, n - 1.0);
    }
    return s;
  }
  double s = 0.0;
  for (std::size_t n = 1; n < count_probs_.size(); ++n)
    s += count_probs_[n] * static_cast<double>(n) *
         std::pow(theta, static_cast<double>(n - 1));
  return s;
}

double FissionLaw::expected_product(const VelocitySpace& vs, std::size_t vin,
                                    std::span<const double> h) const {
  if (tabulated_) {
    double s = 0.0;
    for (const auto& c : configs_[vin]) {
      double prod = 1.0;
      for (std::size_t idx : c.velocity_indices) prod *= h[idx];
      s += c.prob * prod;
    }
    return s;
  }
  const auto q = emission_masses(vs, vin);
  double theta = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) theta += q[j] * h[j];
  return count_pgf(vin, theta);
}

std::vector<Vec3> FissionLaw::sample(const VelocitySpace& vs, const Vec3& vin,
                                     RngStream& rng) const {
  if (tabulated_) {
    const std::size_t i = vs.index_of(vin);
    std::vector<double> probs;
    probs.reserve(configs_[i].size());
    for (const auto& c : configs_[i]) probs.push_back(c.prob);
    const auto& cfg = configs_[i][rng.discrete(probs)];
    std::vector<Vec3> out;
    out.reserve(cfg.velocity_indices.size());
    for (std::size_t idx : cfg.velocity_indices) out.push_back(vs.velocities()[idx]);
    return out;
  }
  const std::size_t n = rng.discrete(count_probs_);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    switch (emission_) {
      case EmissionFamily::copy_incoming:
        out.push_back(vin);
        break;
      case EmissionFamily::flip:
        out.push_back({-vin[0], -vin[1], -vin[2]});
        break;
      case EmissionFamily::uniform:
        out.push_back(vs.velocities()[rng.uniform_index(vs.velocities().size())]);
        break;
      case EmissionFamily::table: {
        const std::size_t i = vs.index_of(vin);
        out.push_back(vs.velocities()[rng.discrete(emission_rows_[i])]);
        break;
      }
      case EmissionFamily::isotropic_annulus:
        out.push_back(sample_annulus(vs, rng));
        break;
    }
  }
  return out;
}

std::vector<FissionConfig> FissionLaw::enumerate_configs(const VelocitySpace& vs,
                                                         std::size_t vin) const {
  if (!vs.is_discrete())
    throw std::logic_error("enumerate_configs: continuous velocity space");
  if (tabulated_) return configs_[vin];
  const auto q = emission_masses(vs, vin);
  std::vector<FissionConfig> out;
  for (std::size_t n = 0; n < count_probs_.size(); ++n) {
    if (count_probs_[n] == 0.0) continue;
    // All ordered velocity tuples of length n.
    std::vector<std::size_t> tuple(n, 0);
    for (;;) {
      double prob = count_probs_[n];
      for (std::size_t idx : tuple) prob *= q[idx];
      if (prob > 0.0) out.push_back({prob, tuple});
      // next tuple
      std::size_t pos = 0;
      for (; pos < n; ++pos) {
        if (++tuple[pos] < q.size()) break;
        tuple[pos] = 0;
      }
      if (pos == n) break;
      if (n == 0) break;
    }
  }
  return out;
}

double total_rate(const NbpModel& model, const Vec3& r, const Vec3& v) {
  const std::size_t g = model.vgroup(v);
  return model.sigma_s.at(r, g) + model.sigma_f.at(r, g);
}

double combined_kernel(const NbpModel& model, const Vec3& r, const Vec3& vin,
                       const Vec3& vout) {
  const std::size_t gi = model.vgroup(vin);
  if (model.velocity_space.is_discrete()) {
    const std::size_t go = model.velocity_space.index_of(vout);
    return model.sigma_s.at(r, gi) * model.pi_s.mass(model.velocity_space, gi, go) +
           model.sigma_f.at(r, gi) *
               model.fission.yield_mass(model.velocity_space, gi, go);
  }
  return model.sigma_s.at(r, gi) * model.pi_s.density(model.velocity_space) +
         model.sigma_f.at(r, gi) *
             model.fission.yield_density(model.velocity_space, gi);
}

double alpha_rate(const NbpModel& model, const Vec3& r, const Vec3& v) {
  const std::size_t g = model.vgroup(v);
  return model.sigma_s.at(r, g) +
         model.sigma_f.at(r, g) * model.fission.mean_count(g);
}

namespace {

std::string cell_name(std::size_t cell, std::size_t vin, std::size_t vout) {
  std::ostringstream os;
  os << "cell=" << cell << " vin=" << vin << " vout=" << vout;
  return os.str();
}

}  // namespace

HypothesisReport validate_hypotheses(const NbpModel& model) {
  model.pi_s.validate(model.velocity_space);
  model.fission.validate(model.velocity_space);
  if (model.velocity_space.is_discrete() && model.domain.is_interval()) {
    for (const auto& v : model.velocity_space.velocities())
      if (v[0] == 0.0)
        throw std::invalid_argument(
            "interval domain requires nonzero axial velocity components");
  }

  HypothesisReport rep;
  const auto& vs = model.velocity_space;
  const std::size_t k = vs.size();
  const std::size_t s_cells = std::max<std::size_t>(
      model.sigma_s.spatial_cells(), model.sigma_f.spatial_cells());

  // H1: everything uniformly bounded above. Piecewise-constant fields are
  // finite by construction; record the suprema as witnesses.
  {
    std::ostringstream os;
    os << "sup sigma_s=" << model.sigma_s.sup() << " sup sigma_f=" << model.sigma_f.sup()
       << " n_max=" << model.fission.n_max();
    rep.h1 = {std::isfinite(model.sigma_s.sup()) && std::isfinite(model.sigma_f.sup()),
              os.str()};
  }

  // H2 / H2*: positivity of sigma_s pi_s + sigma_f pi_f over the partition.
  // For piecewise-constant data the cell-wise minimum equals the infimum, so
  // the two checks coincide (documented: a cell-wise check, not a pointwise
  // proof, for continuous V).
  {
    double min_combined = std::numeric_limits<double>::infinity();
    std::string where = "none";
    auto probe_cell = [&](std::size_t cell, double x) {
      const Vec3 r{x, 0.0, 0.0};
      if (vs.is_discrete()) {
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) {
            const double val =
                combined_kernel(model, r, vs.velocities()[i], vs.velocities()[j]);
            if (val < min_combined) {
              min_combined = val;
              where = cell_name(cell, i, j);
            }
          }
      } else {
        const double val = model.sigma_s.at(r, 0) * model.pi_s.density(vs) +
                           model.sigma_f.at(r, 0) * model.fission.yield_density(vs, 0);
        if (val < min_combined) {
          min_combined = val;
          where = cell_name(cell, 0, 0);
        }
      }
    };
    const auto& breaks = model.sigma_s.x_breaks().empty() ? model.sigma_f.x_breaks()
                                                          : model.sigma_s.x_breaks();
    if (breaks.empty()) {
      probe_cell(0, 0.0);
    } else {
      for (std::size_t c = 0; c + 1 < breaks.size(); ++c)
        probe_cell(c, 0.5 * (breaks[c] + breaks[c + 1]));
    }
    std::ostringstream os;
    os << "min combined kernel=" << min_combined << " at " << where;
    rep.h2 = {min_combined > 0.0, os.str()};
    rep.h2_star = rep.h2;
    (void)s_cells;
  }

  // H3 / H3*: a cell on which sigma_f pi_f is bounded away from zero; any
  // open ball inside that cell witnesses the hypothesis.
  {
    double best = 0.0;
    std::string where = "none";
    auto probe_cell = [&](std::size_t cell, double x) {
      const Vec3 r{x, 0.0, 0.0};
      double cell_min = std::numeric_limits<double>::infinity();
      if (vs.is_discrete()) {
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j)
            cell_min = std::min(cell_min,
                                model.sigma_f.at(r, i) *
                                    model.fission.yield_mass(vs, i, j));
      } else {
        cell_min = model.sigma_f.at(r, 0) * model.fission.yield_density(vs, 0);
      }
      if (cell_min > best) {
        best = cell_min;
        where = cell_name(cell, 0, 0);
      }
    };
    const auto& breaks = model.sigma_f.x_breaks();
    if (breaks.empty()) {
      probe_cell(0, 0.0);
    } else {
      for (std::size_t c = 0; c + 1 < breaks.size(); ++c)
        probe_cell(c, 0.5 * (breaks[c] + breaks[c + 1]));
    }
    std::ostringstream os;
    os << "best cell min sigma_f pi_f=" << best << " at " << where;
    rep.h3 = {best > 0.0, os.str()};
    rep.h3_star = rep.h3;
  }

  // H4: offspring number bounded.
  {
    std::ostringstream os;
    if (model.fission.declared_unbounded()) {
      rep.h4 = {false, "offspring sampler declared unbounded"};
    } else {
      os << "n_max=" << model.fission.n_max();
      rep.h4 = {true, os.str()};
    }
  }

  // M2: branch rate varsigma = sigma_f uniformly bounded.
  {
    std::ostringstream os;
    os << "sup varsigma=" << model.sigma_f.sup();
    rep.m2 = {std::isfinite(model.sigma_f.sup()), os.str()};
  }

  rep.m1 = "deferred to solver";
  return rep;
}

TestReport fission_mean_check(const NbpModel& model, const Vec3& r, const Vec3& vin,
                              const std::function<double(const Vec3&)>& g,
                              std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0)
    throw std::invalid_argument("fission_mean_check: zero samples");
  RngStream rng(seed, 0, "fission_mean_check");
  std::vector<double> draws(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto vels = model.fission.sample(model.velocity_space, vin, rng);
    double s = 0.0;
    for (const auto& v : vels) s += g(v);
    draws[i] = s;
  }

  const std::size_t gi = model.vgroup(vin);
  double target = 0.0;
  if (model.velocity_space.is_discrete()) {
    const auto& vels = model.velocity_space.velocities();
    for (std::size_t j = 0; j < vels.size(); ++j)
      target += g(vels[j]) * model.fission.yield_mass(model.velocity_space, gi, j);
  } else {
    // Intensity integral for the isotropic annulus by deterministic midpoint
    // quadrature, uniform in (speed^3, cos theta, phi).
    const auto& vs = model.velocity_space;
    const double lo3 = vs.v_min() * vs.v_min() * vs.v_min();
    const double hi3 = vs.v_max() * vs.v_max() * vs.v_max();
    const int nq = 48;
    double acc = 0.0;
    for (int a = 0; a < nq; ++a) {
      const double s = std::cbrt(lo3 + (a + 0.5) / nq * (hi3 - lo3));
      for (int b = 0; b < nq; ++b) {
        const double z = -1.0 + 2.0 * (b + 0.5) / nq;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int c = 0; c < nq; ++c) {
          const double phi = 6.283185307179586476925 * (c + 0.5) / nq;
          acc += g({s * rho * std::cos(phi), s * rho * std::sin(phi), s * z});
        }
      }
    }
    target = model.fission.mean_count(gi) * acc / (nq * nq * nq);
  }

  (void)r;
  TestReport rep;
  rep.name = "fission_mean_check";
  rep.seed = seed;
  rep.sample_sizes = {n_samples};
  const double mean = mean_of(draws);
  const double se = std::sqrt(variance_of(draws) / static_cast<double>(n_samples));
  rep.statistic = mean - target;
  rep.threshold = 3.0 * se;
  rep.pass = std::abs(rep.statistic) <= std::max(rep.threshold, 1e-12);
  std::ostringstream os;
  os << "mc=" << mean << " target=" << target << " se=" << se;
  rep.detail = os.str();
  return rep;
}

}  // namespace nbp
