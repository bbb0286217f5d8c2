#include <doctest.h>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "nmchaos/error.hpp"
#include "nmchaos/kernel.hpp"
#include "nmchaos/model.hpp"
#include "nmchaos/ode.hpp"
#include "nmchaos/trajectory.hpp"

using namespace nmchaos;
using testutil::rel_diff;

namespace {

// Term-by-term transcription of the five TDC equations, kept separate from
// the library's factored form.
std::array<Complex, 5> tdc_reference(const std::array<Complex, 5>& F, const SystemParams& p,
                                     const EnvParams& e) {
  const Complex i(0, 1);
  const double g = e.gamma, W = e.big_omega, s = e.big_gamma * e.gamma / 2;
  const double k1 = p.kappa1, k2 = p.kappa2;
  return {
      s * k1 - g * F[0] - i * W * F[0] + 2 * p.omega1 * F[2] - i * k1 * F[0] * F[2] - i * k2 * F[0] * F[3],
      s * k2 - g * F[1] - i * W * F[1] + 2 * p.omega2 * F[3] - i * k1 * F[1] * F[2] - i * k2 * F[1] * F[3],
      -g * F[2] - i * W * F[2] - 2 * p.omega1 * F[0] - i * k1 * F[2] * F[2] - i * k2 * F[2] * F[3],
      -g * F[3] - i * W * F[3] - 2 * p.omega2 * F[1] - i * k1 * F[3] * F[2] - i * k2 * F[3] * F[3],
      -g * F[4] - i * W * F[4] + p.g1 * F[2] + p.g2 * F[3] - i * k1 * F[4] * F[2] - i * k2 * F[4] * F[3],
  };
}

double max_abs(const TdcState& a) {
  double m = 0;
  for (const auto& z : a.f) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("ou_correlation examples") {
  CHECK(ou_correlation({1, 2, 0}, 0.0) == Complex(1.0, 0.0));
  const Complex a = ou_correlation({1, 1, 0}, 1.0);
  CHECK(a.real() == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(a.imag() == 0.0);
  const Complex b = ou_correlation({1, 1, std::numbers::pi}, 1.0);
  CHECK(b.real() == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-14));
  CHECK(std::abs(b.imag()) < 1e-15);
  CHECK(ou_correlation({1, 1, 0.3}, -0.7) == ou_correlation({1, 1, 0.3}, 0.7));
}

TEST_CASE("spectral_density peak, half width and normalisation") {
  const EnvParams e{1.0, 1.5, 0.7};
  CHECK(spectral_density(e, 0.7) == doctest::Approx(1.0 / (2 * std::numbers::pi)));
  CHECK(spectral_density({1, 1, 0}, 0.0) == doctest::Approx(1 / (2 * std::numbers::pi)).epsilon(1e-14));
  CHECK(spectral_density(e, 0.7 + 1.5) == doctest::Approx(0.5 * spectral_density(e, 0.7)));
  CHECK(spectral_density(e, 0.7 - 1.5) == doctest::Approx(0.5 * spectral_density(e, 0.7)));

  // Composite Simpson quadrature of J over [0, 50000] with a tail correction;
  // the total weight equals the kernel at zero lag, G*gamma/2.
  for (double gamma : {1.0, 2.0}) {
    const EnvParams far{1.0, gamma, 50.0};
    const double hi = 50000.0;
    const std::size_t n = 2'000'000;
    const double h = hi / n;
    double sum = spectral_density(far, 0.0) + spectral_density(far, hi);
    for (std::size_t k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * spectral_density(far, k * h);
    const double tail = gamma * gamma / (2 * std::numbers::pi) / (hi - 50.0);
    const double integral = sum * h / 3.0 + tail;
    CHECK(integral == doctest::Approx(ou_correlation(far, 0.0).real()).epsilon(0.01));
  }
}

TEST_CASE("tdc_rhs at F=0 leaves only the sources") {
  const SystemParams p;
  const TdcState d = tdc_rhs(TdcState{}, p, {1.0, 2.0, 0.0});
  CHECK(d[0] == Complex(1.0, 0.0));
  CHECK(d[1] == Complex(1.0, 0.0));
  CHECK(d[2] == Complex(0.0, 0.0));
  CHECK(d[3] == Complex(0.0, 0.0));
  CHECK(d[4] == Complex(0.0, 0.0));
}

TEST_CASE("tdc_rhs matches a term-by-term transcription") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    SystemParams p{u(rng) + 3, u(rng) + 3, 1.0, u(rng), u(rng), u(rng), u(rng)};
    EnvParams e{u(rng) + 3, u(rng) + 3, u(rng)};
    TdcState F;
    for (auto& z : F.f) z = Complex(u(rng), u(rng));
    const TdcState d = tdc_rhs(F, p, e);
    const auto ref = tdc_reference(F.f, p, e);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(d[i] - ref[i]) <= 1e-12 * (1 + std::abs(ref[i])));
  }
}

TEST_CASE("tdc_rhs mirror-exchange symmetry") {
  const SystemParams p{1.3, 1.3, 1.0, 0.4, 0.4, 0.8, 0.8};
  TdcState F;
  F[0] = F[1] = Complex(0.3, -0.2);
  F[2] = F[3] = Complex(-0.1, 0.5);
  F[4] = Complex(0.2, 0.2);
  const TdcState d = tdc_rhs(F, p, {1.0, 0.7, 0.4});
  CHECK(d[0] == d[1]);
  CHECK(d[2] == d[3]);
}

TEST_CASE("Markovian stationary point from Newton iteration") {
  const SystemParams p;
  const EnvParams e{1.0, 100.0, 0.0};
  auto residual = [&](const Eigen::VectorXd& x) {
    TdcState F;
    for (int i = 0; i < 5; ++i) F[i] = Complex(x[2 * i], x[2 * i + 1]);
    const auto r = tdc_reference(F.f, p, e);
    Eigen::VectorXd out(10);
    for (int i = 0; i < 5; ++i) {
      out[2 * i] = r[i].real();
      out[2 * i + 1] = r[i].imag();
    }
    return out;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(10);
  x[0] = x[2] = 0.5;
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd r = residual(x);
    if (r.norm() < 1e-13) break;
    Eigen::MatrixXd J(10, 10);
    for (int c = 0; c < 10; ++c) {
      Eigen::VectorXd xp = x, xm = x;
      xp[c] += 1e-7;
      xm[c] -= 1e-7;
      J.col(c) = (residual(xp) - residual(xm)) / 2e-7;
    }
    x -= J.fullPivLu().solve(r);
  }
  REQUIRE(residual(x).norm() < 1e-10);
  CHECK(std::abs(Complex(x[0], x[1]) - 0.5) <= 0.02 * 0.5);
  CHECK(std::abs(Complex(x[4], x[5])) < 0.05);

  TdcState root;
  for (int i = 0; i < 5; ++i) root[i] = Complex(x[2 * i], x[2 * i + 1]);
  CHECK(max_abs(tdc_rhs(root, p, e)) < 1e-9);
}

TEST_CASE("mean_matrix at F=0 with appendix placement") {
  const Matrix5 m = mean_matrix(TdcState{}, SystemParams{}, ModelToggles{});
  const Matrix5 expected{{{0, 0, 2, 0, 0}, {0, 0, 0, 2, 0}, {-2, 0, 0, 0, -1}, {0, -2, 0, 0, -1}, {0, 0, 0, 0, 0}}};
  CHECK(m == expected);
}

TEST_CASE("mean_matrix fifth row is always zero") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    TdcState F;
    for (auto& z : F.f) z = Complex(u(rng), u(rng));
    const Matrix5 m = mean_matrix(F, SystemParams{1, 2, 1, u(rng), u(rng), u(rng), u(rng)},
                                  ModelToggles{trial % 2 ? 1 : 2, HarmonicPlacement::appendix});
    for (double v : m[4]) CHECK(v == 0.0);
  }
}

TEST_CASE("mean_matrix imaginary-part extraction and toggles") {
  SystemParams p;
  TdcState F;
  F[2] = Complex(0.0, 1.0);
  CHECK(mean_matrix(F, p, {})[2][2] == 1.0);
  CHECK(mean_matrix(F, p, {2, HarmonicPlacement::appendix})[2][2] == 2.0);

  p.omega2 = 1.5;
  const Matrix5 lit = mean_matrix(TdcState{}, p, {1, HarmonicPlacement::paper_matrix});
  CHECK(lit[3][0] == -3.0);
  CHECK(lit[3][1] == 0.0);
  const Matrix5 app = mean_matrix(TdcState{}, p, {});
  CHECK(app[3][1] == -3.0);
  CHECK(app[3][0] == 0.0);
}

TEST_CASE("coupled_rhs examples") {
  const SystemParams p;
  const EnvParams e;
  FullState s;
  for (auto& z : s.tdc.f) z = Complex(0.3, -0.4);
  const FullState d0 = coupled_rhs(s, p, e, {});
  for (double v : d0.obs.as_array()) CHECK(v == 0.0);

  s.obs = {0.7, -1.2, 0.4, 2.2, 3.0};
  const FullState d1 = coupled_rhs(s, p, e, {});
  CHECK(d1.obs.n == 0.0);
  CHECK(d1.tdc == tdc_rhs(s.tdc, p, e));

  const SystemParams bare{1, 1, 1, 0, 0, 0, 0};
  FullState h = testutil::observables(1.0, 0.0, 0.0, 0.0, 0.0);
  const FullState d2 = coupled_rhs(h, bare, e, {});
  CHECK(d2.obs.q1 == 0.0);
  CHECK(d2.obs.p1 == -2.0);
}

TEST_CASE("pack and unpack round trip") {
  FullState s;
  for (std::size_t i = 0; i < 5; ++i) s.tdc[i] = Complex(0.1 * i, -0.2 * i);
  s.obs = {1, 2, 3, 4, 5};
  s.t = 2.5;
  CHECK(unpack(pack(s), 2.5) == s);
}

TEST_CASE("integrate reproduces the bare oscillator") {
  const SystemParams bare{1, 1, 1, 0, 0, 0, 0};
  IntegrationSettings st;
  st.t_max = 50;
  st.dt_out = 0.01;
  const Trajectory tr = integrate(bare, EnvParams{}, testutil::observables(1, 0, 0, 0, 0), st);
  double err = 0;
  for (const auto& s : tr.samples()) err = std::max(err, std::abs(s.obs.q1 - std::cos(2 * s.t)));
  CHECK(err <= 10 * st.rel_tol);
}

TEST_CASE("initial sample equals the initial state") {
  IntegrationSettings st;
  st.t_max = 1;
  const FullState init = testutil::fig2_init();
  const Trajectory tr = integrate(SystemParams{}, EnvParams{}, init, st);
  CHECK(tr.front().obs == init.obs);
  CHECK(tr.front().tdc == TdcState{});
  CHECK(tr.front().t == 0.0);
  CHECK(tr.size() == 101);
  for (std::size_t k = 1; k < tr.size(); ++k)
    CHECK(std::abs((tr[k].t - tr[k - 1].t) - st.dt_out) <= 1e-9 * st.dt_out);
}

TEST_CASE("photon number is conserved") {
  IntegrationSettings st;
  st.t_max = 200;
  for (double gamma : {0.1, 1.0, 2.0}) {
    const Trajectory tr = integrate(SystemParams{}, {1, gamma, 0}, testutil::fig2_init(), st);
    double drift = 0;
    for (const auto& s : tr.samples()) drift = std::max(drift, std::abs(s.obs.n - 2.0));
    CHECK(drift <= 10 * st.abs_tol);
  }
}

TEST_CASE("self-convergence against a hundredfold tighter run") {
  IntegrationSettings st;
  st.t_max = 50;
  st.rel_tol = 1e-7;
  st.abs_tol = 1e-9;
  IntegrationSettings tight = st;
  tight.rel_tol /= 100;
  tight.abs_tol /= 100;
  const EnvParams e{1, 0.5, 0};
  const Trajectory a = integrate(SystemParams{}, e, testutil::fig2_init(), st);
  const Trajectory b = integrate(SystemParams{}, e, testutil::fig2_init(), tight);
  double worst = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const FlatState x = pack(a[k]), y = pack(b[k]);
    double scale = 0, diff = 0;
    for (std::size_t i = 0; i < kStateDim; ++i) {
      scale = std::max(scale, std::abs(y[i]));
      diff = std::max(diff, std::abs(x[i] - y[i]));
    }
    worst = std::max(worst, diff / scale);
  }
  CHECK(worst <= 100 * st.rel_tol);
}

TEST_CASE("superposition of mean-value trajectories") {
  IntegrationSettings st;
  st.t_max = 100;
  const EnvParams e{1, 0.2, 0};
  const FullState v0 = testutil::observables(1.1, 0.3, -0.2, 0.5, 2.0);
  const FullState w0 = testutil::observables(-0.4, 0.9, 1.0, 0.0, 1.0);
  const double a = 0.7, b = -1.3;
  FullState mix;
  const auto av = v0.obs.as_array(), aw = w0.obs.as_array();
  std::array<double, 5> m{};
  for (std::size_t j = 0; j < 5; ++j) m[j] = a * av[j] + b * aw[j];
  mix.obs = ObservableState::from_array(m);
  const Trajectory tv = integrate(SystemParams{}, e, v0, st);
  const Trajectory tw = integrate(SystemParams{}, e, w0, st);
  const Trajectory tm = integrate(SystemParams{}, e, mix, st);
  double worst = 0;
  for (std::size_t k = 0; k < tm.size(); ++k) {
    const auto x = tv[k].obs.as_array(), y = tw[k].obs.as_array(), z = tm[k].obs.as_array();
    double scale = 0, diff = 0;
    for (std::size_t j = 0; j < 5; ++j) {
      scale = std::max({scale, std::abs(a * x[j]), std::abs(b * y[j]), std::abs(z[j])});
      diff = std::max(diff, std::abs(z[j] - (a * x[j] + b * y[j])));
    }
    worst = std::max(worst, diff / scale);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("mirror-exchange symmetry along a trajectory") {
  IntegrationSettings st;
  st.t_max = 100;
  const SystemParams p{1.2, 1.2, 1, 0.8, 0.8, 1.1, 1.1};
  const Trajectory tr = integrate(p, {1, 0.3, 0.5}, testutil::observables(0.9, 0.9, 0.2, 0.2, 2), st);
  double worst = 0;
  for (const auto& s : tr.samples()) {
    auto rel = [](Complex x, Complex y) { return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-12}); };
    worst = std::max({worst, rel(s.tdc[0], s.tdc[1]), rel(s.tdc[2], s.tdc[3]),
                      rel_diff(s.obs.q1, s.obs.q2, 1e-12), rel_diff(s.obs.p1, s.obs.p2, 1e-12)});
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("Markovian limit freezes the TDCs") {
  IntegrationSettings st;
  st.t_max = 50;
  const SystemParams p;
  const EnvParams e{1, 50, 0};
  const Trajectory tr = integrate(p, e, testutil::fig2_init(), st);
  double rate = 0, f1 = 0;
  for (const auto& s : tr.samples()) {
    if (s.t < 5) continue;
    rate = std::max(rate, max_abs(tdc_rhs(s.tdc, p, e)));
    f1 = std::max(f1, std::abs(s.tdc[0] - 0.5));
  }
  CHECK(rate <= 1e-2);
  CHECK(f1 <= 0.02 * 0.5);
}

TEST_CASE("short-time slope of F1") {
  const SystemParams p{1, 1, 1, 1, 1, 0.8, 1};
  const EnvParams e{1.3, 2.0, 0.5};
  IntegrationSettings st;
  st.t_max = 1e-3;
  st.dt_out = 1e-5;
  const Trajectory tr = integrate(p, e, testutil::fig2_init(), st);
  double num = 0, den = 0;
  for (const auto& s : tr.samples()) {
    num += s.t * s.tdc[0].real();
    den += s.t * s.t;
  }
  const double slope = e.big_gamma * e.gamma * p.kappa1 / 2;
  CHECK(std::abs(num / den - slope) <= 0.005 * slope);
}

TEST_CASE("coupled_rhs agrees with differences of the dense output") {
  const SystemParams p;
  const EnvParams e{1, 0.4, 0.3};
  OdeOptions opts;
  opts.rel_tol = 1e-12;
  opts.abs_tol = 1e-14;
  const auto rhs = [&](double, std::span<const double> y, std::span<double> d) { coupled_rhs(y, d, p, e, {}); };
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(1.0, 40.0);
  std::vector<double> centers(20);
  for (double& c : centers) c = u(rng);
  std::sort(centers.begin(), centers.end());
  const double h = 1e-3;
  std::vector<double> q;
  for (double c : centers)
    for (int j : {-2, -1, 0, 1, 2}) q.push_back(c + j * h);
  std::sort(q.begin(), q.end());
  std::vector<FlatState> at(q.size());
  DormandPrince solver(rhs, kStateDim, opts);
  const FlatState y0 = pack(testutil::fig2_init());
  solver.solve(0.0, y0, q.back(), q, [&](std::size_t i, double, std::span<const double> y) {
    std::copy(y.begin(), y.end(), at[i].begin());
  });
  const double tol = 10 * 1e-9;
  for (double c : centers) {
    auto idx = [&](int j) {
      return static_cast<std::size_t>(std::lower_bound(q.begin(), q.end(), c + j * h - 1e-12) - q.begin());
    };
    FlatState d{};
    rhs(c, at[idx(0)], d);
    for (std::size_t i = 0; i < kStateDim; ++i) {
      const double fd = (8 * (at[idx(1)][i] - at[idx(-1)][i]) - (at[idx(2)][i] - at[idx(-2)][i])) / (12 * h);
      CHECK(std::abs(fd - d[i]) <= tol * std::max(1.0, std::abs(d[i])));
    }
  }
}

TEST_CASE("integration failures are reported") {
  IntegrationSettings st;
  st.rel_tol = 0.0;
  CHECK_THROWS_AS(integrate(SystemParams{}, EnvParams{}, FullState{}, st), ValidationError);
  st.rel_tol = 1e-2;
  CHECK_THROWS_AS(integrate(SystemParams{}, EnvParams{}, FullState{}, st), ValidationError);

  const auto blowup = [](double, std::span<const double> y, std::span<double> d) { d[0] = y[0] * y[0]; };
  DormandPrince solver(blowup, 1, {});
  const std::vector<double> y0{1.0};
  CHECK_THROWS_AS(solver.advance(0.0, y0, 2.0), NumericalError);
}

TEST_CASE("trajectory column names") {
  const auto& cols = trajectory_columns();
  REQUIRE(cols.size() == 16);
  CHECK(cols.front() == "t");
  CHECK(cols[5] == "n");
  CHECK(cols[6] == "ReF1");
  CHECK(cols.back() == "ImF5");
  CHECK_FALSE(is_trajectory_column("F1"));
}

}
