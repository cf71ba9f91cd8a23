#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace offload {

struct ScalarProbe {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a maximum on [lo, hi]; stops when the bracket is
/// narrower than rel_tol * max(|lo|, |hi|, abs_floor). Every probe is reported to `seen`.
inline ScalarProbe golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                      double rel_tol, std::vector<ScalarProbe>* seen = nullptr,
                                      double abs_floor = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto probe = [&](double x) {
    const double v = f(x);
    if (seen) seen->push_back({x, v});
    return v;
  };
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = probe(c), fd = probe(d);
  ScalarProbe best = fc >= fd ? ScalarProbe{c, fc} : ScalarProbe{d, fd};
  for (int it = 0; it < 500; ++it) {
    if (hi - lo <= rel_tol * std::max({std::abs(lo), std::abs(hi), abs_floor})) break;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = probe(c);
      if (fc > best.value) best = {c, fc};
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = probe(d);
      if (fd > best.value) best = {d, fd};
    }
  }
  return best;
}

/// Smallest x in [lo, hi] with pred(x) true, for pred monotone false->true and
/// pred(hi) true. Returns a point on the true side within rel_tol.
inline double bisect_threshold(const std::function<bool(double)>& pred, double lo, double hi,
                               double rel_tol) {
  for (int it = 0; it < 400; ++it) {
    if (hi - lo <= rel_tol * std::max(std::abs(hi), 1e-300)) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace offload
