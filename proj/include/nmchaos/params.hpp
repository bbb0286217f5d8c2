#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>

namespace nmchaos {

using Complex = std::complex<double>;

/// Double-mirror cavity parameters. All frequencies are in units of the
/// reference mirror frequency, so time is the dimensionless product w*t.
struct SystemParams {
  double omega1 = 1.0;
  double omega2 = 1.0;
  /// Cavity frequency. Inert: the photon number is conserved, so it enters
  /// no equation of motion that is integrated here.
  double omega_c = 1.0;
  double g1 = 1.0;
  double g2 = 1.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;

  void validate() const;
  bool operator==(const SystemParams&) const = default;
};

/// Ornstein-Uhlenbeck environment: alpha(t,s) = (G*gamma/2) exp(-(gamma + i W)|t-s|).
struct EnvParams {
  double big_gamma = 1.0;
  double gamma = 1.0;
  double big_omega = 0.0;

  double tau() const { return 1.0 / gamma; }
  void validate() const;
  bool operator==(const EnvParams&) const = default;
};

enum class HarmonicPlacement {
  /// -2*omega2 acts on <q2> (each momentum couples to its own position).
  appendix,
  /// -2*omega2 sits in column 1, acting on <q1>, as the displayed matrix reads.
  paper_matrix,
};

std::string_view to_string(HarmonicPlacement p);
HarmonicPlacement parse_harmonic_placement(std::string_view s);

struct ModelToggles {
  /// Prefactor c on the Im(kappa_j F_i) entries; 1 or 2.
  int damping_factor = 1;
  HarmonicPlacement harmonic_placement = HarmonicPlacement::appendix;

  void validate() const;
  bool operator==(const ModelToggles&) const = default;
};

/// The five TDCs F_1..F_5, indexed by the operator basis q1, q2, p1, p2, a^dag a.
struct TdcState {
  std::array<Complex, 5> f{};

  Complex& operator[](std::size_t i) { return f[i]; }
  const Complex& operator[](std::size_t i) const { return f[i]; }
  bool all_finite() const;
  bool operator==(const TdcState&) const = default;
};

struct ObservableState {
  double q1 = 0.0;
  double q2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double n = 0.0;

  std::array<double, 5> as_array() const { return {q1, q2, p1, p2, n}; }
  static ObservableState from_array(const std::array<double, 5>& v) {
    return {v[0], v[1], v[2], v[3], v[4]};
  }
  bool all_finite() const;
  bool operator==(const ObservableState&) const = default;
};

struct FullState {
  TdcState tdc;
  ObservableState obs;
  double t = 0.0;

  bool operator==(const FullState&) const = default;
};

/// Flat layout used by the integrator: ReF1, ImF1, ..., ReF5, ImF5, q1, q2, p1, p2, n.
inline constexpr std::size_t kStateDim = 15;
inline constexpr std::size_t kTdcOffset = 0;
inline constexpr std::size_t kObsOffset = 10;

using FlatState = std::array<double, kStateDim>;

FlatState pack(const FullState& s);
FullState unpack(const FlatState& y, double t);

}  // namespace nmchaos
