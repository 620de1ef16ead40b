// Canonical reference instances used across tests and bundled configs.
#pragma once

#include "nbp/cross_sections.hpp"

namespace nbp::presets {

// Binary fission count law: N = 0 w.p. 1/4, N = 2 w.p. 3/4 (m = 3/2).
inline std::vector<double> gw3_counts() { return {0.25, 0.0, 0.75}; }

// Rod baseline: D = (0,1), V = {+1,-1}, sigma_s = 0.5 with velocity-flip
// scattering, sigma_f = 3.0 with the binary count law and uniform emission.
// Supercritical: lambda* = +0.387 (the production must beat the heavy
// leakage of a one-mean-free-path rod; fission rates <= 2.4 are subcritical
// here).
inline NbpModel rod1() {
  return NbpModel{
      SpatialDomain::interval(0.0, 1.0),
      VelocitySpace::discrete({{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}),
      RateField::constant(0.5),
      ScatterKernel::flip(),
      RateField::constant(3.0),
      FissionLaw::iid(gw3_counts(), EmissionFamily::uniform),
  };
}

// Rod baseline with the fission rate replaced (subcritical below ~2.4).
inline NbpModel rod1_with_fission_rate(double rate) {
  NbpModel m = rod1();
  m.sigma_f = RateField::constant(rate);
  return m;
}

// Spaceless reference instance: the binary count law on a domain so large
// that no boundary or spatial structure is ever felt; offspring keep the
// parent velocity and there is no scattering. Growth rate (m-1) sigma_f = 1/2,
// extinction probability 1/3.
inline NbpModel gw3() {
  return NbpModel{
      SpatialDomain::interval(0.0, 2.0e6),
      VelocitySpace::discrete({{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}),
      RateField::constant(0.0),
      ScatterKernel::flip(),
      RateField::constant(1.0),
      FissionLaw::iid(gw3_counts(), EmissionFamily::copy_incoming),
  };
}

inline PhasePoint gw3_start() { return PhasePoint::rod(1.0e6, 1.0); }

}  // namespace nbp::presets
