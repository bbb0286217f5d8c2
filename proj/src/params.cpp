#include "nmchaos/params.hpp"

#include <cmath>
#include <string>

#include "nmchaos/error.hpp"

namespace nmchaos {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

}  // namespace

void SystemParams::validate() const {
  require_finite(omega1, "system.omega1");
  require_finite(omega2, "system.omega2");
  require_finite(omega_c, "system.omega_c");
  require_finite(g1, "system.g1");
  require_finite(g2, "system.g2");
  require_finite(kappa1, "system.kappa1");
  require_finite(kappa2, "system.kappa2");
  if (!(omega1 > 0)) throw ValidationError("system.omega1 must be > 0");
  if (!(omega2 > 0)) throw ValidationError("system.omega2 must be > 0");
}

void EnvParams::validate() const {
  require_finite(big_gamma, "environment.big_gamma");
  require_finite(gamma, "environment.gamma");
  require_finite(big_omega, "environment.big_omega");
  if (!(gamma > 0)) throw ValidationError("environment.gamma must be > 0");
  if (!(big_gamma > 0)) throw ValidationError("environment.big_gamma must be > 0");
}

std::string_view to_string(HarmonicPlacement p) {
  return p == HarmonicPlacement::appendix ? "appendix" : "paper_matrix";
}

HarmonicPlacement parse_harmonic_placement(std::string_view s) {
  if (s == "appendix") return HarmonicPlacement::appendix;
  if (s == "paper_matrix") return HarmonicPlacement::paper_matrix;
  throw ValidationError("model.harmonic_placement must be \"appendix\" or \"paper_matrix\"");
}

void ModelToggles::validate() const {
  if (damping_factor != 1 && damping_factor != 2)
    throw ValidationError("model.damping_factor must be 1 or 2");
}

bool TdcState::all_finite() const {
  for (const auto& z : f)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

bool ObservableState::all_finite() const {
  for (double v : as_array())
    if (!std::isfinite(v)) return false;
  return true;
}

FlatState pack(const FullState& s) {
  FlatState y{};
  for (std::size_t i = 0; i < 5; ++i) {
    y[kTdcOffset + 2 * i] = s.tdc[i].real();
    y[kTdcOffset + 2 * i + 1] = s.tdc[i].imag();
  }
  const auto v = s.obs.as_array();
  for (std::size_t i = 0; i < 5; ++i) y[kObsOffset + i] = v[i];
  return y;
}

FullState unpack(const FlatState& y, double t) {
  FullState s;
  for (std::size_t i = 0; i < 5; ++i)
    s.tdc[i] = Complex(y[kTdcOffset + 2 * i], y[kTdcOffset + 2 * i + 1]);
  s.obs = ObservableState::from_array({y[kObsOffset], y[kObsOffset + 1], y[kObsOffset + 2],
                                       y[kObsOffset + 3], y[kObsOffset + 4]});
  s.t = t;
  return s;
}

}  // namespace nmchaos
