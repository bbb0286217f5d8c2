#pragma once

#include <array>
#include <span>

#include "nmchaos/params.hpp"

namespace nmchaos {

using Matrix5 = std::array<std::array<double, 5>, 5>;

/// Time derivative of the closed nonlinear TDC system. Independent of the
/// observables: the coupling between the two blocks is one-way.
TdcState tdc_rhs(const TdcState& F, const SystemParams& sys, const EnvParams& env);

/// Coefficient matrix M(F) of dV/dt = M V for V = (q1, q2, p1, p2, n).
Matrix5 mean_matrix(const TdcState& F, const SystemParams& sys, const ModelToggles& toggles);

/// Full 15-component derivative in the flat layout.
void coupled_rhs(std::span<const double> y, std::span<double> dydt, const SystemParams& sys,
                 const EnvParams& env, const ModelToggles& toggles);

FullState coupled_rhs(const FullState& state, const SystemParams& sys, const EnvParams& env,
                      const ModelToggles& toggles);

}  // namespace nmchaos
