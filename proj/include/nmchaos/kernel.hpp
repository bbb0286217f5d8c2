#pragma once

#include "nmchaos/params.hpp"

namespace nmchaos {

/// O-U bath correlation alpha(dt) = (Gamma*gamma/2) exp(-(gamma + i*Omega)|dt|).
Complex ou_correlation(const EnvParams& env, double dt);

/// Lorentzian spectral density whose half-line transform is ou_correlation.
double spectral_density(const EnvParams& env, double nu);

}  // namespace nmchaos
