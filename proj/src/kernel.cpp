#include "nmchaos/kernel.hpp"

#include <cmath>
#include <numbers>

namespace nmchaos {

Complex ou_correlation(const EnvParams& env, double dt) {
  const double a = std::abs(dt);
  const double amp = 0.5 * env.big_gamma * env.gamma * std::exp(-env.gamma * a);
  const double phase = -env.big_omega * a;
  return {amp * std::cos(phase), amp * std::sin(phase)};
}

double spectral_density(const EnvParams& env, double nu) {
  const double detune = nu - env.big_omega;
  const double g2 = env.gamma * env.gamma;
  return env.big_gamma * g2 / (2.0 * std::numbers::pi) / (detune * detune + g2);
}

}  // namespace nmchaos
