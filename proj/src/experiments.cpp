#include "offload/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "offload/errors.hpp"

namespace offload {

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::delay_scenario: return "delay_scenario";
    case SweepAxis::demand_mean: return "demand_mean";
    case SweepAxis::capacity: return "capacity";
    case SweepAxis::scheme: return "scheme";
    case SweepAxis::mix: return "mix";
    case SweepAxis::disutility: return "disutility";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (auto a : {SweepAxis::delay_scenario, SweepAxis::demand_mean, SweepAxis::capacity,
                 SweepAxis::scheme, SweepAxis::mix, SweepAxis::disutility}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("not a number: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::map<std::string, double> parse_portions(std::string_view text) {
  std::map<std::string, double> out;
  for (auto item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      out[std::string(item)] += 1.0;
      continue;
    }
    out[std::string(item.substr(0, colon))] += parse_double(item.substr(colon + 1));
  }
  double total = 0.0;
  for (const auto& [name, w] : out) {
    scenario_deadlines(name);
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mix portions must sum to 1: '" + std::string(text) + "'");
  return out;
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  if (repetitions < 1) throw ConfigError("sweep repetitions must be >= 1");
  if (schemes.empty()) throw ConfigError("sweep needs at least one pricing scheme");
  if (!baseline.empty() && std::find(values.begin(), values.end(), baseline) == values.end())
    throw ConfigError("sweep baseline '" + baseline + "' is not one of the values");
  if (saturation_ratio < 0.0) throw ConfigError("saturation ratio must be non-negative");
  scenario.validate();
  for (const auto& v : values) override_for(v);
}

PointOverride SweepSpec::override_for(const std::string& value) const {
  PointOverride o;
  switch (axis) {
    case SweepAxis::delay_scenario:
      scenario_deadlines(value);
      o.delay_portions = std::map<std::string, double>{{value, 1.0}};
      break;
    case SweepAxis::mix: o.delay_portions = parse_portions(value); break;
    case SweepAxis::demand_mean: {
      const double m = parse_double(value);
      if (!(m > 0.0)) throw ConfigError("demand mean must be positive");
      o.demand_mean = m;
      break;
    }
    case SweepAxis::capacity: {
      const double f = parse_double(value);
      if (!(f > 0.0)) throw ConfigError("capacity factor must be positive");
      o.capacity_factor = f;
      break;
    }
    case SweepAxis::scheme: o.schemes = std::vector<SchemeFamily>{parse_scheme_family(value)}; break;
    case SweepAxis::disutility: {
      const double f = parse_double(value);
      if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("disutility factor must lie in [0,1]");
      o.disutility = f;
      break;
    }
  }
  return o;
}

Spread spread_of(const std::vector<double>& v) {
  Spread s;
  if (v.empty()) return s;
  CompensatedSum sum;
  for (double x : v) sum.add(x);
  s.mean = sum.value() / static_cast<double>(v.size());
  if (v.size() > 1) {
    CompensatedSum sq;
    for (double x : v) sq.add((x - s.mean) * (x - s.mean));
    s.sd = std::sqrt(sq.value() / static_cast<double>(v.size() - 1));
  }
  return s;
}

const PointSummary* ComparisonReport::find(const std::string& value, SchemeFamily scheme) const {
  for (const auto& p : points) {
    if (p.value == value && p.scheme == scheme) return &p;
  }
  return nullptr;
}

const PointSummary& ComparisonReport::at(const std::string& value, SchemeFamily scheme) const {
  if (const auto* p = find(value, scheme)) return *p;
  throw ContractViolation("report '" + name + "' has no point " + value + "/" + std::string(to_string(scheme)));
}

double reference_peak_load(const Population& pop) {
  Population zero = pop;
  assign_delay_portions(zero, {{"zero", 1.0}}, ClassMix{});
  set_disutility(zero, 0.0);
  return Market(zero).evaluate(FlatPricing{0.0}).peak_cell_load;
}

namespace {

std::vector<double> scheme_params(const PricingScheme& s) {
  switch (family_of(s)) {
    case SchemeFamily::flat: return {std::get<FlatPricing>(s).fee};
    case SchemeFamily::two_tier: {
      const auto& t = std::get<TwoTierPricing>(s);
      return {t.fee1, t.fee2, t.cap1};
    }
    case SchemeFamily::volume: return {std::get<VolumePricing>(s).unit_price};
    case SchemeFamily::congestion: {
      const auto& m = std::get<CongestionPricing>(s).unit_price;
      return {m.mean(), m.minCoeff(), m.maxCoeff()};
    }
  }
  return {};
}

SeedMetrics metrics_of(std::uint64_t seed, const EquilibriumResult& r) {
  SeedMetrics m;
  m.seed = seed;
  m.saturation = r.saturation;
  m.multimodal = r.multimodal;
  const MarketOutcome& o = r.outcome;
  m.capacity = o.capacity;
  if (r.saturation == Saturation::infeasible) return m;
  m.price = scheme_params(r.scheme);
  m.revenue = o.revenue;
  m.surplus = o.surplus;
  m.welfare = o.welfare;
  m.subscription_ratio = o.subscription_ratio;
  m.payment_per_unit_traffic = o.payment_per_unit_traffic;
  m.kappa_avg = o.kappa_avg;
  m.kappa_peak = o.kappa_peak;
  m.kappa_peak_cell = o.kappa_peak_cell;
  m.peak_load_ratio = o.capacity > 0.0 ? o.peak_cell_load / o.capacity : 0.0;
  m.adoption_fraction = o.adoption_fraction;
  if (o.cell_load.cols() >= 2) m.load_variance = cell_load_variance(o);
  m.traffic = o.total_x;
  return m;
}

void summarize(PointSummary& p) {
  auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& s : p.seeds) {
      if (s.saturation != Saturation::infeasible) v.push_back(field(s));
    }
    return spread_of(v);
  };
  p.revenue = collect([](const SeedMetrics& s) { return s.revenue; });
  p.surplus = collect([](const SeedMetrics& s) { return s.surplus; });
  p.welfare = collect([](const SeedMetrics& s) { return s.welfare; });
  p.subscription_ratio = collect([](const SeedMetrics& s) { return s.subscription_ratio; });
  p.payment_per_unit_traffic = collect([](const SeedMetrics& s) { return s.payment_per_unit_traffic; });
  p.kappa_avg = collect([](const SeedMetrics& s) { return s.kappa_avg; });
  p.kappa_peak = collect([](const SeedMetrics& s) { return s.kappa_peak; });
  p.kappa_peak_cell = collect([](const SeedMetrics& s) { return s.kappa_peak_cell; });
  p.peak_load_ratio = collect([](const SeedMetrics& s) { return s.peak_load_ratio; });
  p.adoption_fraction = collect([](const SeedMetrics& s) { return s.adoption_fraction; });
  std::size_t np = 0;
  for (const auto& s : p.seeds) np = std::max(np, s.price.size());
  p.price.clear();
  for (std::size_t k = 0; k < np; ++k) {
    p.price.push_back(collect([k](const SeedMetrics& s) { return k < s.price.size() ? s.price[k] : 0.0; }));
  }
  p.saturated = 0;
  p.infeasible = 0;
  int with_var = 0, with_traffic = 0;
  for (const auto& s : p.seeds) {
    if (s.traffic.size() > 0) {
      if (with_traffic++ == 0) p.traffic = s.traffic;
      else p.traffic += s.traffic;
    }
    p.saturated += s.saturation == Saturation::opt_saturated;
    p.infeasible += s.saturation == Saturation::infeasible;
    if (s.load_variance.size() == 0) continue;
    if (with_var++ == 0) p.load_variance = s.load_variance;
    else p.load_variance += s.load_variance;
  }
  if (with_var > 0) p.load_variance /= with_var;
  if (with_traffic > 0) p.traffic /= with_traffic;
}

struct NamedPoint {
  std::string label;
  PointOverride change;
};

ComparisonReport run_points(const std::string& name, SweepAxis axis, const std::string& baseline,
                            const std::vector<NamedPoint>& points, const SweepSpec& spec) {
  if (spec.repetitions < 1) throw ConfigError("sweep repetitions must be >= 1");
  spec.scenario.validate();
  ComparisonReport report;
  report.name = name;
  report.axis = axis;
  report.baseline = baseline;
  for (const auto& pt : points) {
    for (SchemeFamily f : pt.change.schemes.value_or(spec.schemes)) {
      PointSummary s;
      s.value = pt.label;
      s.scheme = f;
      report.points.push_back(std::move(s));
    }
  }
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t seed = spec.first_seed + static_cast<std::uint64_t>(rep);
    ScenarioSpec sc = spec.scenario;
    sc.model.rng_seed = seed;
    const Population base = build_population(sc);
    const double capacity = spec.saturation_ratio > 0.0
                                ? reference_peak_load(base) / spec.saturation_ratio
                                : sc.model.capacity_per_cell;
    for (const auto& pt : points) {
      Population pop = base;
      const PointOverride& c = pt.change;
      if (c.delay_portions) assign_delay_portions(pop, *c.delay_portions, sc.class_mix);
      if (c.demand_mean) scale_demand(pop, *c.demand_mean / sc.demand.mean());
      if (c.disutility) set_disutility(pop, *c.disutility);
      pop.config.capacity_per_cell = capacity * c.capacity_factor.value_or(1.0);
      const Market market(pop);
      for (SchemeFamily f : c.schemes.value_or(spec.schemes)) {
        const EquilibriumResult r = solve_numeric(market, f, spec.solver);
        for (auto& p : report.points) {
          if (p.value != pt.label || p.scheme != f) continue;
          p.seeds.push_back(metrics_of(seed, r));
          if (r.saturation == Saturation::infeasible)
            report.infeasible.push_back(pt.label + "/" + std::string(to_string(f)) + "/" + std::to_string(seed));
        }
      }
    }
  }
  for (auto& p : report.points) summarize(p);
  if (!baseline.empty()) {
    for (auto& p : report.points) {
      const PointSummary* b = report.find(baseline, p.scheme);
      if (b && b->revenue.mean > 0.0) p.relative_gain = (p.revenue.mean - b->revenue.mean) / b->revenue.mean;
    }
  }
  return report;
}

}  // namespace

ComparisonReport run_scenario_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<NamedPoint> points;
  for (const auto& v : spec.values) points.push_back({v, spec.override_for(v)});
  return run_points(std::string(to_string(spec.axis)), spec.axis, spec.baseline, points, spec);
}

ComparisonReport run_capacity_comparison(const SweepSpec& base, double upgrade_factor) {
  if (!(upgrade_factor > 0.0)) throw ConfigError("capacity upgrade factor must be positive");
  std::vector<NamedPoint> points;
  for (const auto& [tag, factor] : {std::pair{"3g", 1.0}, std::pair{"4g", upgrade_factor}}) {
    for (const char* sc : {"zero", "long"}) {
      PointOverride o;
      o.delay_portions = std::map<std::string, double>{{sc, 1.0}};
      o.capacity_factor = factor;
      points.push_back({std::string(tag) + ":" + sc, o});
    }
  }
  SweepSpec spec = base;
  spec.schemes = {SchemeFamily::flat, SchemeFamily::volume};
  return run_points("capacity", SweepAxis::capacity, "3g:zero", points, spec);
}

ComparisonReport run_price_dynamics(const SweepSpec& base) {
  SweepSpec spec = base;
  spec.axis = SweepAxis::delay_scenario;
  spec.values = {"zero", "short", "medium", "long"};
  spec.baseline = "zero";
  spec.schemes = {SchemeFamily::flat, SchemeFamily::volume};
  return run_scenario_sweep(spec);
}

ComparisonReport run_granularity_comparison(const SweepSpec& base) {
  SweepSpec spec = base;
  spec.axis = SweepAxis::delay_scenario;
  spec.values = {"zero", "long"};
  spec.baseline = "zero";
  spec.schemes = {SchemeFamily::flat, SchemeFamily::two_tier, SchemeFamily::volume, SchemeFamily::congestion};
  ComparisonReport r = run_scenario_sweep(spec);
  r.name = "granularity";
  return r;
}

ComparisonReport run_disutility_sweep(const SweepSpec& base, const std::vector<std::string>& profiles,
                                      const std::vector<double>& factors) {
  std::vector<NamedPoint> points;
  PointOverride zero;
  zero.delay_portions = std::map<std::string, double>{{"zero", 1.0}};
  zero.disutility = 0.0;
  points.push_back({"zero@0", zero});
  for (const auto& prof : profiles) {
    for (double f : factors) {
      if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("disutility factor must lie in [0,1]");
      PointOverride o;
      o.delay_portions = std::map<std::string, double>{{prof, 1.0}};
      o.disutility = f;
      points.push_back({prof + "@" + format_number(f), o});
    }
  }
  SweepSpec spec = base;
  spec.schemes = {SchemeFamily::volume};
  return run_points("disutility", SweepAxis::disutility, "zero@0", points, spec);
}

ComparisonReport run_low_demand_comparison(const SweepSpec& base, double demand_mean, double upgrade_factor) {
  if (!(demand_mean > 0.0)) throw ConfigError("demand mean must be positive");
  std::vector<NamedPoint> points;
  for (const char* sc : {"zero", "short", "medium", "long"}) {
    PointOverride o;
    o.delay_portions = std::map<std::string, double>{{sc, 1.0}};
    o.demand_mean = demand_mean;
    points.push_back({sc, o});
  }
  PointOverride up = points.front().change;
  up.capacity_factor = upgrade_factor;
  points.push_back({"4g:zero", up});
  SweepSpec spec = base;
  spec.schemes = {SchemeFamily::flat, SchemeFamily::volume};
  return run_points("low_demand", SweepAxis::demand_mean, "zero", points, spec);
}

double scheme_gain(const ComparisonReport& report, const std::string& value, SchemeFamily scheme,
                   SchemeFamily reference) {
  const double a = report.at(value, scheme).revenue.mean, b = report.at(value, reference).revenue.mean;
  if (!(b > 0.0)) throw ContractViolation("reference revenue is not positive");
  return (a - b) / b;
}

// ------------------------------------------------------------------- output

void write_report_csv(std::ostream& os, const ComparisonReport& r) {
  os << "axis,value,scheme,seeds,infeasible,saturated,revenue_mean,revenue_sd,surplus_mean,surplus_sd,"
        "welfare_mean,welfare_sd,price1_mean,price2_mean,price3_mean,subscription_ratio_mean,"
        "payment_per_unit_traffic_mean,kappa_avg_mean,kappa_peak_mean,kappa_peak_cell_mean,"
        "peak_load_ratio_mean,adoption_fraction_mean,relative_gain\n";
  for (const auto& p : r.points) {
    os << to_string(r.axis) << ',' << '"' << p.value << '"' << ',' << to_string(p.scheme) << ','
       << p.seeds.size() << ',' << p.infeasible << ',' << p.saturated << ',' << format_number(p.revenue.mean)
       << ',' << format_number(p.revenue.sd) << ',' << format_number(p.surplus.mean) << ','
       << format_number(p.surplus.sd) << ',' << format_number(p.welfare.mean) << ','
       << format_number(p.welfare.sd);
    for (std::size_t k = 0; k < 3; ++k) os << ',' << (k < p.price.size() ? format_number(p.price[k].mean) : "");
    os << ',' << format_number(p.subscription_ratio.mean) << ',' << format_number(p.payment_per_unit_traffic.mean)
       << ',' << format_number(p.kappa_avg.mean) << ',' << format_number(p.kappa_peak.mean) << ','
       << format_number(p.kappa_peak_cell.mean) << ',' << format_number(p.peak_load_ratio.mean) << ','
       << format_number(p.adoption_fraction.mean) << ','
       << (p.relative_gain ? format_number(*p.relative_gain) : "") << '\n';
  }
}

void write_seed_csv(std::ostream& os, const ComparisonReport& r) {
  os << "axis,value,scheme,seed,saturation,revenue,surplus,welfare,price1,price2,price3,"
        "subscription_ratio,payment_per_unit_traffic,kappa_avg,kappa_peak,kappa_peak_cell,"
        "peak_load_ratio,adoption_fraction,capacity,multimodal\n";
  for (const auto& p : r.points) {
    for (const auto& s : p.seeds) {
      os << to_string(r.axis) << ',' << '"' << p.value << '"' << ',' << to_string(p.scheme) << ',' << s.seed
         << ',' << to_string(s.saturation) << ',' << format_number(s.revenue) << ','
         << format_number(s.surplus) << ',' << format_number(s.welfare);
      for (std::size_t k = 0; k < 3; ++k) os << ',' << (k < s.price.size() ? format_number(s.price[k]) : "");
      os << ',' << format_number(s.subscription_ratio) << ',' << format_number(s.payment_per_unit_traffic)
         << ',' << format_number(s.kappa_avg) << ',' << format_number(s.kappa_peak) << ','
         << format_number(s.kappa_peak_cell) << ',' << format_number(s.peak_load_ratio) << ','
         << format_number(s.adoption_fraction) << ',' << format_number(s.capacity) << ','
         << (s.multimodal ? 1 : 0) << '\n';
    }
  }
}

void write_variance_csv(std::ostream& os, const ComparisonReport& r) {
  os << "value,scheme,slot,normalized_load_variance\n";
  for (const auto& p : r.points) {
    for (Eigen::Index t = 0; t < p.load_variance.size(); ++t) {
      os << '"' << p.value << '"' << ',' << to_string(p.scheme) << ',' << t << ','
         << format_number(p.load_variance(t)) << '\n';
    }
  }
}

// ----------------------------------------------------------------- orderings

FigureSuite run_figure_suite(const FigureSuiteSpec& spec) {
  FigureSuite s;
  s.scenarios = run_price_dynamics(spec.base);
  SweepSpec mix = spec.base;
  mix.axis = SweepAxis::mix;
  mix.values = spec.mix_values;
  mix.baseline = spec.mix_values.front();
  mix.schemes = {SchemeFamily::flat, SchemeFamily::volume};
  s.mix = run_scenario_sweep(mix);
  s.capacity = run_capacity_comparison(spec.base);
  s.granularity = run_granularity_comparison(spec.base);
  s.disutility = run_disutility_sweep(spec.base, {"short", "long"}, spec.disutility_factors);
  s.low_demand =
      run_low_demand_comparison(spec.base, spec.base.scenario.demand.mean() * spec.low_demand_factor);
  s.checks = evaluate_orderings(s);
  return s;
}

namespace {

std::string pct(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << 100.0 * v << '%';
  return os.str();
}

std::string num(double v) { return format_number(v); }

OrderingCheck band(const std::string& name, double value, double lo, double hi) {
  OrderingCheck c;
  c.name = name;
  c.soft = true;
  const double a = 0.7 * lo, b = 1.3 * hi;
  c.passed = value >= a && value <= b;
  c.detail = "observed " + pct(value) + ", target " + pct(lo) + (lo == hi ? "" : "-" + pct(hi)) +
             " (accepted " + pct(a) + "-" + pct(b) + ")";
  return c;
}

}  // namespace

std::vector<OrderingCheck> evaluate_orderings(const FigureSuite& s) {
  std::vector<OrderingCheck> out;
  const std::vector<std::string> sc = {"zero", "short", "medium", "long"};
  const auto F = SchemeFamily::flat, V = SchemeFamily::volume, TT = SchemeFamily::two_tier,
             CG = SchemeFamily::congestion;
  const ComparisonReport& r = s.scenarios;

  {
    OrderingCheck c{"volume revenue >= flat revenue in every delay scenario", true, false, ""};
    for (const auto& v : sc) {
      const double fv = r.at(v, F).revenue.mean, vv = r.at(v, V).revenue.mean;
      c.passed = c.passed && vv >= fv;
      c.detail += v + ": flat " + num(fv) + " volume " + num(vv) + "; ";
    }
    out.push_back(c);
  }
  {
    OrderingCheck c{"flat relative gain exceeds volume relative gain", true, false, ""};
    for (std::size_t k = 1; k < sc.size(); ++k) {
      const double gf = r.at(sc[k], F).relative_gain.value_or(NAN), gv = r.at(sc[k], V).relative_gain.value_or(NAN);
      c.passed = c.passed && gf > gv;
      c.detail += sc[k] + ": flat " + pct(gf) + " volume " + pct(gv) + "; ";
    }
    out.push_back(c);
  }
  for (SchemeFamily f : {F, V}) {
    OrderingCheck c{std::string(to_string(f)) + " revenue gain strictly increases short < medium < long", true, false, ""};
    double prev = -INFINITY;
    for (std::size_t k = 1; k < sc.size(); ++k) {
      const double g = r.at(sc[k], f).relative_gain.value_or(NAN);
      c.passed = c.passed && g > prev;
      prev = g;
      c.detail += sc[k] + " " + pct(g) + "; ";
    }
    out.push_back(c);
  }
  {
    OrderingCheck fee{"flat fee strictly decreases zero -> long", true, false, ""};
    OrderingCheck sub{"flat subscription ratio strictly increases zero -> long", true, false, ""};
    OrderingCheck ppu{"volume payment per unit traffic strictly decreases zero -> long", true, false, ""};
    for (std::size_t k = 0; k < sc.size(); ++k) {
      const auto& pf = r.at(sc[k], F);
      const auto& pv = r.at(sc[k], V);
      fee.detail += sc[k] + " " + num(pf.price[0].mean) + "; ";
      sub.detail += sc[k] + " " + num(pf.subscription_ratio.mean) + "; ";
      ppu.detail += sc[k] + " " + num(pv.payment_per_unit_traffic.mean) + "; ";
      if (k == 0) continue;
      const auto& qf = r.at(sc[k - 1], F);
      const auto& qv = r.at(sc[k - 1], V);
      fee.passed = fee.passed && pf.price[0].mean < qf.price[0].mean;
      sub.passed = sub.passed && pf.subscription_ratio.mean > qf.subscription_ratio.mean;
      ppu.passed = ppu.passed && pv.payment_per_unit_traffic.mean < qv.payment_per_unit_traffic.mean;
    }
    const auto& z = r.at("zero", F);
    fee.detail += "zero-scenario flat optimum saturated in " + std::to_string(z.saturated) + "/" +
                  std::to_string(z.seeds.size()) + " seeds";
    out.push_back(fee);
    out.push_back(sub);
    out.push_back(ppu);
  }
  for (SchemeFamily f : {F, V}) {
    const ComparisonReport& m = s.mix;
    OrderingCheck c{std::string(to_string(f)) + " revenue non-decreasing as mix shifts toward long", true, false, ""};
    for (std::size_t k = 0; k < m.points.size(); ++k) {
      if (m.points[k].scheme != f) continue;
      c.detail += m.points[k].value + " " + num(m.points[k].revenue.mean) + "; ";
    }
    double prev = -INFINITY;
    for (const auto& p : m.points) {
      if (p.scheme != f) continue;
      c.passed = c.passed && p.revenue.mean >= prev;
      prev = p.revenue.mean;
    }
    out.push_back(c);
  }
  const ComparisonReport& g = s.granularity;
  const double tz = scheme_gain(g, "zero", TT, F), tl = scheme_gain(g, "long", TT, F);
  const double cz = scheme_gain(g, "zero", CG, V), cl = scheme_gain(g, "long", CG, V);
  out.push_back({"two-tier gain over flat shrinks zero -> long", tz > tl, false,
                 "zero " + pct(tz) + ", long " + pct(tl)});
  out.push_back({"congestion gain over volume shrinks zero -> long", cz > cl, false,
                 "zero " + pct(cz) + ", long " + pct(cl)});
  {
    OrderingCheck c{"finer schemes never lose revenue (two-tier >= flat, congestion >= volume, every seed)", true, false, ""};
    int violations = 0;
    for (const auto& v : {"zero", "long"}) {
      for (auto [fine, coarse] : {std::pair{TT, F}, std::pair{CG, V}}) {
        const auto& a = g.at(v, fine).seeds;
        const auto& b = g.at(v, coarse).seeds;
        for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
          if (a[k].revenue < b[k].revenue * (1.0 - 1e-9)) ++violations;
        }
      }
    }
    c.passed = violations == 0;
    c.detail = std::to_string(violations) + " violations";
    out.push_back(c);
  }
  {
    // Peak hours: the quarter of slots with the most generated traffic.
    const auto& vz = g.at("zero", V).load_variance;
    const auto& vl = g.at("long", V).load_variance;
    const auto& x = g.at("zero", V).traffic;
    const bool ok = vz.size() > 0 && vl.size() == vz.size() && x.size() == vz.size();
    if (ok) {
      std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
      for (Eigen::Index t = 0; t < x.size(); ++t) order[static_cast<std::size_t>(t)] = t;
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x(a) > x(b); });
      order.resize(std::max<std::size_t>(1, order.size() / 4));
      std::sort(order.begin(), order.end());
      double pz = 0.0, pl = 0.0;
      std::string slots;
      for (auto t : order) {
        pz += vz(t);
        pl += vl(t);
        slots += (slots.empty() ? "" : " ") + std::to_string(t);
      }
      out.push_back({"cell-load variance lower under long than zero at peak hours (volume equilibrium)", pl < pz, false,
                     "slots " + slots + ": zero " + num(pz / order.size()) + ", long " + num(pl / order.size())});
      const double az = vz.mean(), al = vl.mean();
      out.push_back({"cell-load variance lower under long than zero, all-day average", al < az, true,
                     "zero " + num(az) + ", long " + num(al)});
    } else {
      out.push_back({"cell-load variance lower under long than zero at peak hours (volume equilibrium)", false, false,
                     "no variance series"});
    }
  }
  {
    const ComparisonReport& d = s.disutility;
    std::map<std::string, std::vector<const PointSummary*>> by_profile;
    for (const auto& p : d.points) {
      const auto at = p.value.find('@');
      const std::string prof = p.value.substr(0, at);
      if (prof != "zero") by_profile[prof].push_back(&p);
    }
    OrderingCheck mono{"disutility: gain and adoption non-increasing in factor", true, false, ""};
    OrderingCheck zero{"disutility: factor >= 0.4 gives zero adoption and zero gain", true, false, ""};
    std::map<std::string, double> threshold;
    for (const auto& [prof, pts] : by_profile) {
      double prev_gain = INFINITY, prev_adopt = INFINITY;
      const double g0 = pts.front()->relative_gain.value_or(NAN);
      threshold[prof] = 0.0;
      for (const auto* p : pts) {
        const double f = std::stod(p->value.substr(p->value.find('@') + 1));
        const double gain = p->relative_gain.value_or(NAN), adopt = p->adoption_fraction.mean;
        mono.passed = mono.passed && gain <= prev_gain + 1e-12 && adopt <= prev_adopt + 1e-12;
        prev_gain = gain;
        prev_adopt = adopt;
        if (gain > 0.5 * g0) threshold[prof] = std::max(threshold[prof], f);
        if (f >= 0.4 - 1e-12) zero.passed = zero.passed && adopt == 0.0 && std::abs(gain) <= 1e-9;
        mono.detail += p->value + " gain " + pct(gain) + " adopt " + num(adopt) + "; ";
      }
    }
    out.push_back(mono);
    out.push_back(zero);
    if (threshold.count("short") && threshold.count("long")) {
      out.push_back({"disutility: long profile tolerates a larger factor than short before losing half its gain",
                     threshold["long"] > threshold["short"], false,
                     "short " + num(threshold["short"]) + ", long " + num(threshold["long"])});
    }
  }
  if (!s.low_demand.points.empty()) {
    const ComparisonReport& lo = s.low_demand;
    OrderingCheck gains{"low demand: delayed offloading and 4G upgrade gains each below 10%", true, true, ""};
    int saturated = 0;
    for (SchemeFamily f : {F, V}) {
      saturated += lo.at("zero", f).saturated;
      for (const char* v : {"long", "4g:zero"}) {
        const double gain = lo.at(v, f).relative_gain.value_or(NAN);
        gains.passed = gains.passed && std::abs(gain) < 0.10;
        gains.detail += std::string(to_string(f)) + " " + v + " " + pct(gain) + "; ";
      }
    }
    gains.detail += "saturated zero-scenario solves " + std::to_string(saturated);
    out.push_back(gains);
    const double f0 = r.at("zero", F).price[0].mean, fl = r.at("long", F).price[0].mean;
    const double g0 = lo.at("zero", F).price[0].mean, gl = lo.at("long", F).price[0].mean;
    const double sat_drop = (f0 - fl) / f0, unsat_drop = (g0 - gl) / g0;
    const std::string drops = "low demand " + pct(unsat_drop) + ", calibrated demand " + pct(sat_drop);
    out.push_back({"low demand: flat fee drop zero -> long smaller than the saturated drop", unsat_drop < sat_drop,
                   false, drops});
    out.push_back({"low demand: flat fee drop below half the saturated drop", unsat_drop < 0.5 * sat_drop, true, drops});
  }
  {
    OrderingCheck c{"structural: kappa_peak <= kappa_avg <= 1 at every solved point", true, false, ""};
    for (const ComparisonReport* rep : {&s.scenarios, &s.mix, &s.capacity, &s.granularity, &s.disutility, &s.low_demand}) {
      for (const auto& p : rep->points) {
        for (const auto& x : p.seeds) {
          if (x.saturation == Saturation::infeasible) continue;
          if (!(x.kappa_peak <= x.kappa_avg && x.kappa_avg <= 1.0)) c.passed = false;
        }
      }
    }
    out.push_back(c);
  }

  // Soft magnitude targets.
  out.push_back(band("flat zero->short gain (target low end)", r.at("short", F).relative_gain.value_or(NAN), 0.61, 0.61));
  out.push_back(band("flat zero->long gain (target high end)", r.at("long", F).relative_gain.value_or(NAN), 1.52, 1.52));
  out.push_back(band("volume zero->short gain (target low end)", r.at("short", V).relative_gain.value_or(NAN), 0.21, 0.21));
  out.push_back(band("volume zero->long gain (target high end)", r.at("long", V).relative_gain.value_or(NAN), 0.43, 0.43));
  const ComparisonReport& cap = s.capacity;
  out.push_back(band("flat 3G->4G upgrade gain", cap.at("4g:zero", F).relative_gain.value_or(NAN), 1.15, 1.15));
  out.push_back(band("volume 3G->4G upgrade gain", cap.at("4g:zero", V).relative_gain.value_or(NAN), 0.30, 0.30));
  {
    const double f0 = r.at("zero", F).price[0].mean, fl = r.at("long", F).price[0].mean;
    out.push_back(band("flat fee drop zero->long", (f0 - fl) / f0, 0.15, 0.44));
    const double p0 = r.at("zero", V).payment_per_unit_traffic.mean, pl = r.at("long", V).payment_per_unit_traffic.mean;
    out.push_back(band("payment per unit traffic drop zero->long", (p0 - pl) / p0, 0.28, 0.59));
  }
  out.push_back(band("two-tier gain over flat, zero", tz, 0.94, 0.94));
  out.push_back(band("two-tier gain over flat, long", tl, 0.25, 0.25));
  out.push_back(band("congestion gain over volume, zero", cz, 0.12, 0.12));
  out.push_back(band("congestion gain over volume, long", cl, 0.07, 0.07));
  return out;
}

void write_ordering_report(std::ostream& os, const std::vector<OrderingCheck>& checks) {
  int hard_fail = 0, soft_miss = 0;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS" : (c.soft ? "MISS" : "FAIL")) << (c.soft ? " [soft] " : " [order] ") << c.name
       << " :: " << c.detail << '\n';
    if (!c.passed) (c.soft ? soft_miss : hard_fail)++;
  }
  os << "orderings failed: " << hard_fail << ", bands missed: " << soft_miss << '\n';
}

}  // namespace offload
