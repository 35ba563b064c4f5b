#pragma once

#include "pushguide/errors.hpp"

namespace pushguide {

/// Rate-equation bookkeeping for the trap populations.  These are measured
/// inputs, not first-principles predictions.
struct MotRateParams {
  double loading_rate = 0;    // L, atoms/s
  double background_loss = 0; // gamma, 1/s
  double push_loss = 0;       // gamma_p, 1/s
  double two_body_rate = 0;   // beta, cm^3/s
  double density = 0;         // n, atoms/cm^3
};

/// Stationary atom number N = L / (gamma + gamma_p + beta n).
inline double steady_state_number(const MotRateParams& p) {
  const double denom = p.background_loss + p.push_loss + p.two_body_rate * p.density;
  if (denom <= 0) throw ModelError("steady state: total loss rate is zero");
  return p.loading_rate / denom;
}

struct OutgoingFlux {
  double value = 0;       // atoms/s
  bool clamped = false;   // true when L1 - gamma N1p came out negative
};

/// Flux leaking out of MOT1, L_out = L1 - gamma N1_push (clamped at zero).
inline OutgoingFlux outgoing_flux(double loading_rate_1, double background_loss,
                                  double n1_with_push) {
  const double raw = loading_rate_1 - background_loss * n1_with_push;
  if (raw < 0) return {0.0, true};
  return {raw, false};
}

struct TransferEfficiency {
  double value = 0;
  bool above_unity = false;  // data-consistency warning
};

/// Incoming MOT2 flux divided by the outgoing MOT1 flux.
inline TransferEfficiency transfer_efficiency(double l2, double l_out) {
  if (l_out <= 0) throw ModelError("transfer efficiency: outgoing flux is zero");
  const double e = l2 / l_out;
  return {e, e > 1.0};
}

}  // namespace pushguide
