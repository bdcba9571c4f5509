#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "cascade/params.hpp"

namespace cascade {

// Incoherent rate description of the emitter -> cavity-1 -> cavity-2 chain,
// obtained by adiabatically eliminating all coherences.  Populations
// P = (P_e, P_a, P_b) obey dP/dt = matrix * P with the symmetric tridiagonal
// matrix below; excitation leaks only through gamma, kappa1, kappa2 (columns
// sum to -gamma, -kappa1, -kappa2).  The matrix is real symmetric, so the
// characteristic roots are always real and the propagator is exact even for
// repeated roots (orthogonal eigenbasis); no perturbation fallback is needed.
struct RateModel {
  double r1 = 0.0;
  double r2 = 0.0;
  double gamma = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
  // Roots of the characteristic cubic (eigenvalues of `matrix`), sorted by
  // |Re| ascending; all strictly negative.
  std::array<std::complex<double>, 3> roots{};
  double eta_closed = 0.0;
  double i_closed = 0.0;
  double pb_decay_rate = 0.0;
};

// Emitter -> cavity-1 hopping rate, Lorentzian in the detuning:
// 4 g1^2/(Gamma+kappa1) / (1 + (2 delta/(Gamma+kappa1))^2), Gamma = gamma+gamma*.
double transfer_rate_r1(const SystemParams& p);

// Cavity-1 -> cavity-2 hopping rate 4 g2^2/(r1+kappa1+kappa2); r1 acts as
// additional decoherence.  r1 = 0 reduces to the Purcell rate.
double transfer_rate_r2(const SystemParams& p, double r1);

RateModel build_rate_model(const SystemParams& p);

// Assembles the same model from explicit rates.  gamma = 0 gives the
// leak-free-emitter variant used by the closed-form efficiency/root
// identities (their derivation drops the emitter leak inside the matrix
// while keeping Gamma inside r1).
RateModel build_rate_model_from_rates(double r1, double r2, double gamma,
                                      double kappa1, double kappa2);

struct RateTrace {
  std::vector<double> times;
  std::vector<double> p_e, p_a, p_b;
};

// Exact propagation of (P_e,P_a,P_b) from (1,0,0) on an increasing grid.
RateTrace rate_propagate(const RateModel& m, const std::vector<double>& t_grid);

// Exact time integrals of each population over [0, inf): the solution of
// matrix * x = -P(0).
struct RateIntegrals {
  double p_e = 0.0, p_a = 0.0, p_b = 0.0;
};
RateIntegrals rate_integrals(const RateModel& m);

// Closed-form collection efficiency kappa2 R2 / (kappa1(kappa2+R2) + kappa2 R2).
double efficiency_closed(const SystemParams& p);

// Closed-form indistinguishability
// (kappa1/2 + (kappa2 || R2)/2) / (kappa1/2 + kappa2 + 3 R2/2)
// with x || y = xy/(x+y).  Valid deep in the high-I regime; returned
// unconditionally, callers consult classify_regime for validity.
double indistinguishability_closed(const SystemParams& p);

std::array<std::complex<double>, 3> characteristic_roots(const RateModel& m);

// Composite-emitter reduction: the hybridized slow mode P_s coupled
// asymmetrically to P_b (rates R2/2 in, R2 out).  pb_decay_rate summarizes
// the biexponential P_b by det/|trace| of the 2x2; `valid` requires the fast
// hybridized mode to be well separated (2 R1 >= 5 (kappa1+R2)).
struct EffectiveEmitter {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
  double pb_decay_rate = 0.0;
  bool valid = false;
};
EffectiveEmitter effective_emitter(const RateModel& m);

// Diagnostic: exact change of basis (P_e,P_a,P_b) -> (P_d,P_s,P_b) that
// diagonalizes the emitter/cavity-1 block of the leak-free matrix.  Columns
// hold the new modes' coordinates; identity when r1 = 0.
Eigen::Matrix3d effective_transform_exact(const RateModel& m);

// Parameter-regime annotations attached to analytic outputs (never used to
// refuse evaluation): reg1 = high-I/low-eta ordering (R2, kappa2 < kappa1),
// reg2 = high-eta ordering (R2, kappa2 > kappa1), effective_emitter_valid as
// in EffectiveEmitter.
struct RegimeFlags {
  bool reg1 = false;
  bool reg2 = false;
  bool effective_emitter_valid = false;
  std::string label() const { return reg1 ? "reg1" : reg2 ? "reg2" : "crossover"; }
};
RegimeFlags classify_regime(const RateModel& m);

// Single-cavity analogs (emitter + one cavity, collection through kappa1;
// g2/kappa2 ignored).  The hopping rate keeps the detuning Lorentzian; the
// closed forms mirror the cascaded ones with the 2x2 chain (P_e, P_a):
// eta = kappa R/(gamma(kappa+R) + kappa R), I = (gamma + kappa||R)/(gamma+kappa+2R).
double single_cavity_transfer_rate(const SystemParams& p);
double efficiency_closed_single(const SystemParams& p);
double indistinguishability_closed_single(const SystemParams& p);

}  // namespace cascade
