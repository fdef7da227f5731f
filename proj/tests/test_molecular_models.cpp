#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qraman/molecular_models.hpp"

using namespace qraman;
using cd = std::complex<double>;

TEST(VibrationalCoherence, ClosedForm) {
  VibrationalMode m{"A1", units::from_wavenumber(2914.0), 0.004, {1, 0}, {0.3, -0.2}};
  EXPECT_EQ(vibrational_coherence(m, 0.0), m.rho0);
  for (double t : {1.0, 17.0, 250.0}) {
    EXPECT_NEAR(std::abs(vibrational_coherence(m, t)),
                std::abs(m.rho0) * std::exp(-m.gamma_bg * t / oracle::hbar), 1e-15);
  }
  EXPECT_THROW(vibrational_coherence(m, -1.0), std::invalid_argument);
}

TEST(VibrationalCoherence, A1PhasePeriod) {
  const double omega = units::from_wavenumber(2914.0);
  EXPECT_NEAR(omega, 0.36129, 1e-5 * 0.36129);
  const double period = units::two_pi * units::hbar / omega;
  EXPECT_NEAR(period, 11.45, 0.01);
  VibrationalMode m{"A1", omega, 0.0};
  EXPECT_LT(std::abs(vibrational_coherence(m, period) - 1.0), 1e-12);
  EXPECT_LT(std::abs(vibrational_coherence(m, 0.5 * period) + 1.0), 1e-12);
}

TEST(ModeSet, Invariants) {
  auto methane = methane_modes();
  EXPECT_NO_THROW(methane.validate());
  ASSERT_EQ(methane.modes.size(), 4u);
  EXPECT_NEAR(units::to_wavenumber(methane.modes[0].omega_bg), 2914.0, 1e-9);
  methane.modes[1].omega_bg = methane.modes[0].omega_bg;
  EXPECT_THROW(methane.validate(), ValidationError);
  EXPECT_THROW(VibrationalModeSet{}.validate(), ValidationError);
  VibrationalModeSet bad{{{"x", 0.1, -1.0}}};
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(FranckCondon, Values) {
  EXPECT_EQ(franck_condon_weight(0.0, 0), 1.0);
  EXPECT_EQ(franck_condon_weight(0.0, 3), 0.0);
  EXPECT_NEAR(franck_condon_weight(2.2, 0), 0.11080, 1e-5);
  for (int n : {1, 5, 19, 21, 35, 60})
    EXPECT_NEAR(franck_condon_weight(3.7, n), oracle::poisson(3.7, n),
                1e-13 * oracle::poisson(3.7, n));
  EXPECT_THROW(franck_condon_weight(-1.0, 0), std::invalid_argument);
}

TEST(FranckCondon, PoissonNormalization) {
  for (double F : {0.1, 1.3, 2.2, 4.0, 5.0}) {
    double total = 0.0;
    for (int n = 0; n <= 40; ++n) total += franck_condon_weight(F, n);
    EXPECT_NEAR(total, 1.0, 1e-10) << "F = " << F;
  }
}

TEST(FranckCondon, RequiredHarmonicsMeetsTailBudget) {
  for (double F : {0.0, 0.5, 1.3, 2.2, 6.0}) {
    const int n = required_harmonics(F);
    double tail = 0.0;
    for (int k = n + 1; k < 200; ++k) tail += oracle::poisson(F, k);
    EXPECT_LT(tail, 1e-6);
    if (n > 0) {
      double prev = 0.0;
      for (int k = n; k < 200; ++k) prev += oracle::poisson(F, k);
      EXPECT_GE(prev, 1e-6) << "n_max not minimal for F = " << F;
    }
  }
}

namespace {
const ExcitedStateBranch e1{"e1", 1.8, 2.2, 1.0 / 900.0};
}

TEST(VibronicHarmonic, ClosedForm) {
  for (int n : {0, 1, 4}) {
    EXPECT_LT(std::abs(vibronic_coherence_harmonic(e1, 0.26, n, 0.0) -
                       e1.rho0 * oracle::poisson(2.2, n)),
              1e-15);
    const cd v30 = vibronic_coherence_harmonic(e1, 0.26, n, 30.0);
    EXPECT_NEAR(std::abs(v30), oracle::poisson(2.2, n) * std::exp(-1.0), 1e-14);
  }
  EXPECT_THROW(vibronic_coherence_harmonic(e1, 0.26, 0, -1.0), std::invalid_argument);
  EXPECT_THROW(vibronic_coherence_harmonic(e1, 0.26, -1, 1.0), std::invalid_argument);
}

TEST(VibronicTotal, MatchesPoissonClosedForm) {
  const int n_max = 40;
  for (double t = 0.0; t <= 200.0; t += 3.7) {
    const cd ref = oracle::vibronic_total(e1.rho0, e1.omega_gap, e1.F, e1.D, 0.26, t);
    EXPECT_LT(std::abs(total_vibronic_coherence(e1, 0.26, n_max, t) - ref), 1e-12);
  }
}

TEST(VibronicTotal, InitialValueAndZeroCoupling) {
  const auto model = nitrostilbene_model();
  const cd v0 = total_vibronic_coherence(model.branches[0], model.v_h, model.n_max, 0.0);
  EXPECT_NEAR(v0.real(), 1.0, 1e-6);
  EXPECT_NEAR(v0.imag(), 0.0, 1e-15);
  ExcitedStateBranch bare{"b", 1.4, 0.0, 1.0 / 400.0, {1, 0}, {0.5, 0.5}};
  for (double t : {0.0, 5.0, 33.0})
    EXPECT_LT(std::abs(total_vibronic_coherence(bare, 0.26, 0, t) -
                       bare.rho0 * std::exp(cd(-bare.D * t * t, -1.4 * t / oracle::hbar))),
              1e-15);
}

TEST(VibronicTotal, RecurrencePeriod) {
  const double period = units::two_pi * units::hbar / 0.26;
  EXPECT_NEAR(period, 15.9, 0.05);
  // Without dephasing and gap, |ρ| returns to |ρ0| after one period.
  ExcitedStateBranch b{"b", 0.0, 2.2, 0.0};
  EXPECT_NEAR(std::abs(total_vibronic_coherence(b, 0.26, 40, period)), 1.0, 1e-10);
  EXPECT_LT(std::abs(total_vibronic_coherence(b, 0.26, 40, 0.5 * period)), 0.1);
}

TEST(VibronicTotal, TruncationSoundness) {
  const auto model = nitrostilbene_model();
  for (const auto& b : model.branches)
    for (double t = 0.0; t <= 200.0; t += 1.0)
      EXPECT_LT(std::abs(total_vibronic_coherence(b, model.v_h, model.n_max, t) -
                         total_vibronic_coherence(b, model.v_h, model.n_max + 10, t)),
                1e-6 * std::abs(b.rho0));
}

TEST(VibronicTotal, EnvelopeMaximaNonIncreasing) {
  const auto model = nitrostilbene_model();
  for (const auto& b : model.branches) {
    std::vector<double> mod;
    for (double t = 0.0; t <= 150.0; t += 0.05)
      mod.push_back(std::abs(total_vibronic_coherence(b, model.v_h, model.n_max, t)));
    const auto peaks = oracle::local_maxima(mod);
    for (std::size_t k = 1; k < peaks.size(); ++k)
      EXPECT_LE(mod[peaks[k]], mod[peaks[k - 1]] + 1e-12);
  }
}

TEST(VibronicTotal, LinearInInitialCoherence) {
  ExcitedStateBranch b = e1;
  const cd c(0.3, -1.7);
  ExcitedStateBranch scaled = b;
  scaled.rho0 *= c;
  for (double t : {0.0, 4.0, 60.0})
    for (int n : {0, 3})
      EXPECT_LT(std::abs(vibronic_coherence_harmonic(scaled, 0.26, n, t) -
                         c * vibronic_coherence_harmonic(b, 0.26, n, t)),
                1e-15 * std::abs(c));
}

TEST(VibronicModelTest, ValidationAndPaperModel) {
  auto m = nitrostilbene_model();
  EXPECT_NO_THROW(m.validate());
  EXPECT_NEAR(m.branches[0].omega_gap, 1.8, 1e-15);
  EXPECT_NEAR(m.branches[1].omega_gap, 1.4, 1e-15);
  EXPECT_NEAR(std::pow(m.branches[1].D, -0.5), 20.0, 1e-12);
  m.n_max = 2;
  EXPECT_THROW(m.validate(), ValidationError);
  m = nitrostilbene_model();
  m.v_h = 0.0;
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Trajectory, ClosedFormAndSampledAgree) {
  const ClosedFormTrajectory closed{e1, 0.26, 30, {}};
  const CoherenceTrajectory a(closed);
  const UniformGrid axis(0.0, 0.02, 10001);
  std::vector<cd> v(axis.size);
  for (std::size_t j = 0; j < axis.size; ++j) v[j] = a(axis[j]);
  const CoherenceTrajectory s(SampledTrajectory{{axis, v, AxisKind::time}});
  for (double t : {0.37, 11.1, 57.3, 150.0})
    EXPECT_LT(std::abs(s(t) - a(t)), 1e-6);
  EXPECT_EQ(s(-1.0), cd(0.0, 0.0));
  EXPECT_EQ(s(300.0), cd(0.0, 0.0));
  const CoherenceTrajectory h(ClosedFormTrajectory{e1, 0.26, 30, 2});
  EXPECT_EQ(h(7.0), vibronic_coherence_harmonic(e1, 0.26, 2, 7.0));
  EXPECT_TRUE(a.is_closed_form());
  EXPECT_FALSE(s.is_closed_form());
}
