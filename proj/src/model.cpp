#include "nmchaos/model.hpp"

#include <cassert>

namespace nmchaos {

TdcState tdc_rhs(const TdcState& F, const SystemParams& sys, const EnvParams& env) {
  const Complex decay(env.gamma, env.big_omega);
  const double source = 0.5 * env.big_gamma * env.gamma;
  const Complex i(0.0, 1.0);
  const Complex k1 = sys.kappa1;
  const Complex k2 = sys.kappa2;
  // Common back-action factor -i(kappa1 F3 + kappa2 F4) multiplies every F_i.
  const Complex back = -i * (k1 * F[2] + k2 * F[3]);

  TdcState d;
  d[0] = source * sys.kappa1 - decay * F[0] + 2.0 * sys.omega1 * F[2] + back * F[0];
  d[1] = source * sys.kappa2 - decay * F[1] + 2.0 * sys.omega2 * F[3] + back * F[1];
  d[2] = -decay * F[2] - 2.0 * sys.omega1 * F[0] + back * F[2];
  d[3] = -decay * F[3] - 2.0 * sys.omega2 * F[1] + back * F[3];
  d[4] = -decay * F[4] + sys.g1 * F[2] + sys.g2 * F[3] + back * F[4];
  return d;
}

Matrix5 mean_matrix(const TdcState& F, const SystemParams& sys, const ModelToggles& toggles) {
  Matrix5 m{};
  const double c = toggles.damping_factor;
  m[0][2] = 2.0 * sys.omega1;
  m[1][3] = 2.0 * sys.omega2;
  for (std::size_t col = 0; col < 5; ++col) {
    m[2][col] = c * (sys.kappa1 * F[col]).imag();
    m[3][col] = c * (sys.kappa2 * F[col]).imag();
  }
  m[2][0] += -2.0 * sys.omega1;
  m[2][4] += -sys.g1;
  const std::size_t col2 = toggles.harmonic_placement == HarmonicPlacement::appendix ? 1 : 0;
  m[3][col2] += -2.0 * sys.omega2;
  m[3][4] += -sys.g2;
  return m;
}

void coupled_rhs(std::span<const double> y, std::span<double> dydt, const SystemParams& sys,
                 const EnvParams& env, const ModelToggles& toggles) {
  assert(y.size() == kStateDim && dydt.size() == kStateDim);
  TdcState F;
  for (std::size_t i = 0; i < 5; ++i) F[i] = Complex(y[2 * i], y[2 * i + 1]);
  const TdcState dF = tdc_rhs(F, sys, env);
  for (std::size_t i = 0; i < 5; ++i) {
    dydt[2 * i] = dF[i].real();
    dydt[2 * i + 1] = dF[i].imag();
  }
  const Matrix5 m = mean_matrix(F, sys, toggles);
  for (std::size_t r = 0; r < 5; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < 5; ++c) acc += m[r][c] * y[kObsOffset + c];
    dydt[kObsOffset + r] = acc;
  }
}

FullState coupled_rhs(const FullState& state, const SystemParams& sys, const EnvParams& env,
                      const ModelToggles& toggles) {
  const FlatState y = pack(state);
  FlatState d{};
  coupled_rhs(y, d, sys, env, toggles);
  return unpack(d, state.t);
}

}  // namespace nmchaos
