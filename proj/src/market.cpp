#include "offload/market.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "offload/errors.hpp"

namespace offload {

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) comp_ += (sum_ - t) + v;
  else comp_ += (v - t) + sum_;
  sum_ = t;
}

MarketOutcome aggregate(std::span<const UserResponse> responses, std::span<const UserModel> users,
                        const ModelConfig& cfg) {
  if (responses.size() != users.size()) throw ContractViolation("aggregate: one response per user");
  const int T = cfg.num_slots, S = cfg.num_cells;
  std::vector<CompensatedSum> x(static_cast<std::size_t>(T)), load(static_cast<std::size_t>(T * S));
  CompensatedSum pay, util, net, subs, adopt, mass;
  for (std::size_t i = 0; i < users.size(); ++i) {
    const UserResponse& r = responses[i];
    const UserModel& u = users[i];
    const double w = u.weight();
    mass.add(w);
    if (!r.subscribed) continue;
    subs.add(w);
    if (r.adopts_delayed) adopt.add(w);
    pay.add(w * r.payment);
    util.add(w * r.utility);
    net.add(w * r.net_utility);
    for (int t = 0; t < T; ++t) {
      if (r.x(t) != 0.0) x[static_cast<std::size_t>(t)].add(w * r.x(t));
      if (r.y(t) != 0.0) load[static_cast<std::size_t>(t * S + u.cell_path()(t))].add(w * r.y(t));
    }
  }

  MarketOutcome o;
  o.capacity = cfg.capacity_per_cell;
  o.total_x.resize(T);
  o.total_y.resize(T);
  o.cell_load.resize(T, S);
  CompensatedSum sum_x, sum_y;
  for (int t = 0; t < T; ++t) {
    o.total_x(t) = x[static_cast<std::size_t>(t)].value();
    CompensatedSum yt;
    for (int s = 0; s < S; ++s) {
      const double v = load[static_cast<std::size_t>(t * S + s)].value();
      o.cell_load(t, s) = v;
      yt.add(v);
    }
    o.total_y(t) = yt.value();
    sum_x.add(o.total_x(t));
    sum_y.add(o.total_y(t));
  }
  const double X = sum_x.value(), Y = sum_y.value();
  o.population = mass.value();
  o.kappa_undefined = !(X > 0.0);
  o.peak_cell_load = o.cell_load.size() ? o.cell_load.maxCoeff() : 0.0;
  if (!o.kappa_undefined) {
    o.kappa_avg = Y / X;
    o.kappa_peak = o.total_y.maxCoeff() / X;
    o.kappa_peak_cell = o.peak_cell_load / X;
  }
  o.revenue = pay.value() - cfg.eta * Y;
  o.surplus = net.value();
  o.welfare = util.value() - cfg.eta * Y;
  o.subscription_ratio = o.population > 0.0 ? subs.value() / o.population : 0.0;
  o.adoption_fraction = subs.value() > 0.0 ? adopt.value() / subs.value() : 0.0;
  o.payment_per_unit_traffic = X > 0.0 ? pay.value() / X : 0.0;
  o.feasible = o.revenue > 0.0 && o.peak_cell_load <= cfg.capacity_per_cell;
  return o;
}

Eigen::VectorXd cell_load_variance(const MarketOutcome& o) {
  if (o.cell_load.cols() < 2) throw ContractViolation("cell_load_variance needs at least two cells");
  if (!(o.capacity > 0.0)) throw ContractViolation("cell_load_variance needs a positive capacity");
  const Eigen::MatrixXd norm = o.cell_load / o.capacity;
  const Eigen::VectorXd mean = norm.rowwise().mean();
  return (norm.colwise() - mean).array().square().rowwise().mean();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_outcome_csv(std::ostream& os, const MarketOutcome& o) {
  os << "slot,total_x,total_y";
  for (Eigen::Index s = 0; s < o.cell_load.cols(); ++s) os << ",cell_" << s;
  os << '\n';
  for (Eigen::Index t = 0; t < o.total_x.size(); ++t) {
    os << t << ',' << format_number(o.total_x(t)) << ',' << format_number(o.total_y(t));
    for (Eigen::Index s = 0; s < o.cell_load.cols(); ++s) os << ',' << format_number(o.cell_load(t, s));
    os << '\n';
  }
}

void write_summary_csv(std::ostream& os, const MarketOutcome& o, const std::string& scheme) {
  os << "key,value\n";
  os << "scheme," << scheme << '\n';
  auto row = [&](const char* k, double v) { os << k << ',' << format_number(v) << '\n'; };
  row("kappa_avg", o.kappa_avg);
  row("kappa_peak", o.kappa_peak);
  row("kappa_peak_cell", o.kappa_peak_cell);
  row("peak_cell_load", o.peak_cell_load);
  row("capacity", o.capacity);
  row("revenue", o.revenue);
  row("surplus", o.surplus);
  row("welfare", o.welfare);
  row("subscription_ratio", o.subscription_ratio);
  row("payment_per_unit_traffic", o.payment_per_unit_traffic);
  row("adoption_fraction", o.adoption_fraction);
  row("population", o.population);
  os << "feasible," << (o.feasible ? "true" : "false") << '\n';
  os << "kappa_undefined," << (o.kappa_undefined ? "true" : "false") << '\n';
}

}  // namespace offload
