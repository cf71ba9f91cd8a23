#pragma once

#include <cmath>
#include <limits>
#include "offload/errors.hpp"

namespace offload {

/// Homogeneous single-cell market: N users per cell with power-law demand, identical
/// delay tolerance and contacts, willingness w(t)^(1-theta).
template <typename Scalar = double>
struct AnalyticParams {
  Scalar n_hat = 1000;
  Scalar sigma = 0.5;
  Scalar phi_max = 1;
  Scalar theta = 0.5;
  Scalar eta = 0.1;
  Scalar capacity = 1;
  Scalar kappa_avg = 0.5;
  Scalar kappa_peak = 0.05;

  void validate() const {
    if (!(n_hat > 0 && phi_max > 0 && capacity > 0)) throw ConfigError("analytic: sizes must be positive");
    if (!(sigma > 0 && sigma < 1)) throw ConfigError("analytic: sigma must lie in (0,1)");
    if (!(theta > 0 && theta < 1)) throw ConfigError("analytic: theta must lie in (0,1)");
    if (!(eta >= 0)) throw ConfigError("analytic: eta must be non-negative");
    if (!(kappa_peak > 0 && kappa_peak <= kappa_avg && kappa_avg <= 1))
      throw ConfigError("analytic: need 0 < kappa_peak <= kappa_avg <= 1");
  }
  /// Z in the demand pdf x^-sigma / Z.
  Scalar normalizer() const { return std::pow(phi_max, 1 - sigma) / (1 - sigma); }
  Scalar mean_demand() const { return (1 - sigma) / (2 - sigma) * phi_max; }
  /// Flat fee at which nobody subscribes.
  Scalar max_flat_price() const { return std::pow(phi_max, theta); }
  /// Flat revenue can be positive only below this eta.
  Scalar eta_bound() const { return 1 / (kappa_avg * std::pow(phi_max, 1 - theta)); }
};

namespace flat {

namespace detail {
template <typename Scalar>
void check_price(const AnalyticParams<Scalar>& a, Scalar p, bool open_left) {
  if (!(p >= 0) || (open_left && !(p > 0))) throw DomainError("flat: price outside the domain");
  if (!(p < a.max_flat_price())) throw DomainError("flat: price at or above the prohibitive fee");
}
}  // namespace detail

/// Share of users whose full-demand utility exceeds the fee.
template <typename Scalar>
Scalar subscription_ratio(const AnalyticParams<Scalar>& a, Scalar p) {
  if (p >= a.max_flat_price()) return 0;
  if (!(p >= 0)) throw DomainError("flat: negative price");
  return 1 - std::pow(p, (1 - a.sigma) / a.theta) / (a.normalizer() * (1 - a.sigma));
}

/// Total generated traffic of subscribers.
template <typename Scalar>
Scalar total_traffic(const AnalyticParams<Scalar>& a, Scalar p) {
  if (p >= a.max_flat_price()) return 0;
  if (!(p >= 0)) throw DomainError("flat: negative price");
  const Scalar s = 2 - a.sigma;
  return a.n_hat * (std::pow(a.phi_max, s) - std::pow(p, s / a.theta)) / (a.normalizer() * s);
}

/// Expected 3G load in the busiest slot.
template <typename Scalar>
Scalar peak_load(const AnalyticParams<Scalar>& a, Scalar p) {
  return a.kappa_peak * total_traffic(a, p);
}

/// R(p); zero at and above the prohibitive fee.
template <typename Scalar>
Scalar revenue(const AnalyticParams<Scalar>& a, Scalar p) {
  if (p >= a.max_flat_price()) return 0;
  detail::check_price(a, p, false);
  return a.n_hat * p * subscription_ratio(a, p) - a.eta * a.kappa_avg * total_traffic(a, p);
}

template <typename Scalar>
Scalar revenue_derivative(const AnalyticParams<Scalar>& a, Scalar p) {
  detail::check_price(a, p, true);
  const Scalar z = a.normalizer(), s = a.sigma, t = a.theta;
  return a.n_hat * (1 - (1 + (1 - s) / t) * std::pow(p, (1 - s) / t) / (z * (1 - s)) +
                    a.eta * a.kappa_avg * std::pow(p, (2 - s) / t - 1) / (z * t));
}

template <typename Scalar>
Scalar revenue_second_derivative(const AnalyticParams<Scalar>& a, Scalar p) {
  detail::check_price(a, p, true);
  const Scalar z = a.normalizer(), s = a.sigma, t = a.theta;
  return a.n_hat * std::pow(p, (1 - s - t) / t) *
         (a.eta * a.kappa_avg * std::pow(p, (1 - t) / t) * (2 - t - s) - (1 + t - s)) / (z * t * t);
}

/// Price where R'' changes sign (infinite when eta is zero).
template <typename Scalar>
Scalar inflection_price(const AnalyticParams<Scalar>& a) {
  const Scalar s = a.sigma, t = a.theta;
  if (!(a.eta > 0)) return std::numeric_limits<Scalar>::infinity();
  return std::pow((1 + t - s) / (a.eta * a.kappa_avg * (2 - t - s)), t / (1 - t));
}

/// Smallest fee that keeps the peak load within capacity (0 when it never binds).
template <typename Scalar>
Scalar min_price(const AnalyticParams<Scalar>& a) {
  const Scalar full = a.kappa_peak * a.n_hat * a.mean_demand();
  if (!(full > a.capacity)) return 0;
  return a.max_flat_price() * std::pow(1 - a.capacity / full, a.theta / (2 - a.sigma));
}

/// Sum of subscriber net utilities.
template <typename Scalar>
Scalar surplus(const AnalyticParams<Scalar>& a, Scalar p) {
  if (p >= a.max_flat_price()) return 0;
  if (!(p >= 0)) throw DomainError("flat: negative price");
  const Scalar e = 1 + a.theta - a.sigma;
  return a.n_hat * ((std::pow(a.phi_max, e) - std::pow(p, e / a.theta)) / (a.normalizer() * e) -
                    p * subscription_ratio(a, p));
}

template <typename Scalar>
Scalar welfare(const AnalyticParams<Scalar>& a, Scalar p) {
  return surplus(a, p) + revenue(a, p);
}

/// Net utility of a subscriber with daily demand phi (negative means no subscription).
template <typename Scalar>
Scalar user_net_utility(const AnalyticParams<Scalar>& a, Scalar p, Scalar phi) {
  return std::pow(phi, a.theta) - p;
}

}  // namespace flat

namespace volume {

/// Demand level at which the per-user optimum stops being demand-capped.
template <typename Scalar>
Scalar psi(const AnalyticParams<Scalar>& a, Scalar p) {
  if (!(p > 0)) throw DomainError("volume: price must be positive");
  return std::pow(a.theta / (p * a.kappa_avg), 1 / (1 - a.theta));
}

/// Price below which every user consumes full demand.
template <typename Scalar>
Scalar uncapped_price(const AnalyticParams<Scalar>& a) {
  return a.theta / (a.kappa_avg * std::pow(a.phi_max, 1 - a.theta));
}

/// Total generated traffic.
template <typename Scalar>
Scalar total_traffic(const AnalyticParams<Scalar>& a, Scalar p) {
  const Scalar q = psi(a, p);
  if (q > a.phi_max) return a.n_hat * a.mean_demand();
  return a.n_hat * q * (1 - std::pow(q / a.phi_max, 1 - a.sigma) / (2 - a.sigma));
}

/// Total expected 3G traffic.
template <typename Scalar>
Scalar total_3g(const AnalyticParams<Scalar>& a, Scalar p) {
  return a.kappa_avg * total_traffic(a, p);
}

template <typename Scalar>
Scalar total_3g_derivative(const AnalyticParams<Scalar>& a, Scalar p) {
  const Scalar q = psi(a, p);
  if (q > a.phi_max) return 0;
  return -a.n_hat * a.kappa_avg * q / (p * (1 - a.theta)) * (1 - std::pow(q / a.phi_max, 1 - a.sigma));
}

template <typename Scalar>
Scalar total_3g_second_derivative(const AnalyticParams<Scalar>& a, Scalar p) {
  const Scalar q = psi(a, p);
  if (q > a.phi_max) return 0;
  const Scalar u = std::pow(q / a.phi_max, 1 - a.sigma), t = a.theta;
  return a.n_hat * a.kappa_avg * q / (p * p * (1 - t) * (1 - t)) * ((2 - t) - (3 - a.sigma - t) * u);
}

template <typename Scalar>
Scalar peak_load(const AnalyticParams<Scalar>& a, Scalar p) {
  return a.kappa_peak * total_traffic(a, p);
}

template <typename Scalar>
Scalar revenue(const AnalyticParams<Scalar>& a, Scalar p) {
  return (p - a.eta) * total_3g(a, p);
}

template <typename Scalar>
Scalar revenue_derivative(const AnalyticParams<Scalar>& a, Scalar p) {
  return (p - a.eta) * total_3g_derivative(a, p) + total_3g(a, p);
}

/// R'(p) / B(p): equal to 1 while users are uncapped, strictly decreasing afterwards.
template <typename Scalar>
Scalar marginal_ratio(const AnalyticParams<Scalar>& a, Scalar p) {
  return 1 + (p - a.eta) * total_3g_derivative(a, p) / total_3g(a, p);
}

template <typename Scalar>
Scalar marginal_ratio_derivative(const AnalyticParams<Scalar>& a, Scalar p) {
  const Scalar b = total_3g(a, p), b1 = total_3g_derivative(a, p), b2 = total_3g_second_derivative(a, p);
  return b1 / b + (p - a.eta) * (b2 * b - b1 * b1) / (b * b);
}

/// Net utility of a user with daily demand phi at its optimum.
template <typename Scalar>
Scalar user_net_utility(const AnalyticParams<Scalar>& a, Scalar p, Scalar phi) {
  const Scalar q = psi(a, p);
  if (phi <= q) return std::pow(phi, a.theta) - p * a.kappa_avg * phi;
  return (1 - a.theta) * std::pow(q, a.theta);
}

template <typename Scalar>
Scalar surplus(const AnalyticParams<Scalar>& a, Scalar p) {
  const Scalar q = psi(a, p);
  const Scalar m = q < a.phi_max ? q : a.phi_max;
  const Scalar z = a.normalizer(), s = a.sigma, t = a.theta;
  const Scalar capped = std::pow(m, 1 + t - s) / (z * (1 + t - s)) -
                        p * a.kappa_avg * std::pow(m, 2 - s) / (z * (2 - s));
  const Scalar tail = (1 - t) * std::pow(q, t) * (1 - std::pow(m, 1 - s) / (z * (1 - s)));
  return a.n_hat * (capped + tail);
}

template <typename Scalar>
Scalar welfare(const AnalyticParams<Scalar>& a, Scalar p) {
  return surplus(a, p) + revenue(a, p);
}

}  // namespace volume

}  // namespace offload
