#include "horolab/expcli.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <sstream>

#include "horolab/error.hpp"
#include "horolab/heckelab.hpp"
#include "horolab/horoflow.hpp"
#include "horolab/measures.hpp"
#include "horolab/parallel.hpp"
#include "horolab/sieve.hpp"

namespace horolab::cli {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<Experiment, std::string_view>, 11> kNames{{
    {Experiment::Orbit, "orbit"},
    {Experiment::PrimeOrbit, "prime-orbit"},
    {Experiment::Period, "period"},
    {Experiment::DaniCheck, "dani-check"},
    {Experiment::Discrepancy, "discrepancy"},
    {Experiment::Selberg, "selberg"},
    {Experiment::Type1, "type1"},
    {Experiment::Type2, "type2"},
    {Experiment::HeckePrime, "hecke-prime"},
    {Experiment::Linnik, "linnik"},
    {Experiment::AlmostPrime, "almost-prime"},
}};

constexpr double kPeriodRatioLow = 1.0 / 64.0;
constexpr double kPeriodRatioHigh = 64.0;
constexpr double kPeriodHeightFloor = 1.0 / 16.0;

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  fail(ErrorCode::ConfigError, "field '" + field + "': " + what);
}

// Recursive descent over the expression grammar; positions are offsets into
// the full spec string so base-point errors point at the right character.
class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::size_t offset) : text_(text), offset_(offset) {}

  double parse_all() {
    const double v = expr();
    skip_space();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    if (!std::isfinite(v)) error("expression is not finite");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::ParseError, "position " + std::to_string(offset_ + pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) v += term();
      else if (accept('-')) v -= term();
      else return v;
    }
  }

  double term() {
    double v = factor();
    for (;;) {
      if (accept('*')) {
        v *= factor();
      } else if (accept('/')) {
        const std::size_t at = pos_;
        const double den = factor();
        if (den == 0.0) {
          pos_ = at;
          error("division by zero");
        }
        v /= den;
      } else {
        return v;
      }
    }
  }

  double factor() {
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    return primary();
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const double v = expr();
      if (!accept(')')) error("expected ')'");
      return v;
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      double v = 0.0;
      const char* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
      if (ec != std::errc{}) error("malformed number");
      pos_ += static_cast<std::size_t>(ptr - first);
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "pi") return std::numbers::pi;
      if (name == "sqrt2") return std::numbers::sqrt2;
      if (name == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
      if (name == "sqrt") {
        if (!accept('(')) error("expected '(' after sqrt");
        const std::size_t at = pos_;
        const double v = expr();
        if (!accept(')')) error("expected ')'");
        if (v < 0.0) {
          pos_ = at;
          error("sqrt of a negative number");
        }
        return std::sqrt(v);
      }
      pos_ = start;
      error("unknown identifier '" + std::string(name) + "'");
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

double parse_expression_at(std::string_view text, std::size_t offset) {
  return ExpressionParser(text, offset).parse_all();
}

struct Field {
  std::string_view key;
  std::string_view value;
  std::size_t value_offset;
};

// Splits "k<sep>v,k<sep>v" into fields; offsets are relative to the full spec.
std::vector<Field> split_fields(std::string_view body, std::size_t offset, char sep) {
  std::vector<Field> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find(',', start);
    if (end == std::string_view::npos) end = body.size();
    const std::string_view item = body.substr(start, end - start);
    const std::size_t eq = item.find(sep);
    if (eq == std::string_view::npos) {
      fail(ErrorCode::ParseError,
           "position " + std::to_string(offset + start) + ": expected '" + std::string(1, sep) + "'");
    }
    out.push_back({item.substr(0, eq), item.substr(eq + 1), offset + start + eq + 1});
    start = end + 1;
  }
  return out;
}

GroupElement from_alpha(double alpha, double y, double theta) {
  const double s = std::sin(theta);
  require(std::fabs(s) > 1e-12, ErrorCode::ParseError, "theta must not be a multiple of pi for an alpha point");
  require(y > 0.0, ErrorCode::ParseError, "y must be positive");
  return iwasawa_compose({alpha + y * std::cos(theta) / s, y, theta});
}

std::string matrix_entry(const BigInt& v) { return v.str(); }

// Adding +0.0 folds negative zero so reports never print "-0".
double clean(double v) { return v + 0.0; }

json to_json(const IwasawaPoint& p) { return {{"x", clean(p.x)}, {"y", clean(p.y)}, {"theta", clean(p.theta)}}; }

json to_json(const GroupElement& g) { return json::array({g.a, g.b, g.c, g.d}); }

json to_json(const IntegerMatrix& m) {
  return json::array({matrix_entry(m.a), matrix_entry(m.b), matrix_entry(m.c), matrix_entry(m.d)});
}

json to_json(const ExponentConfig& e) {
  return {{"q_exponent", e.q_exponent}, {"bound_exponent", e.bound_exponent}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string format_unsigned(std::uint64_t v) { return std::to_string(v); }

GroupElement base_of(const ExperimentConfig& c) {
  if (!c.alpha.empty()) return parse_base_point("alpha:" + c.alpha + ",y:1,theta:pi/2");
  return parse_base_point(c.base);
}

IndexSet index_set_of(const ExperimentConfig& c) {
  if (c.index_set == "all") return AllIndices{};
  if (c.index_set == "primes") return PrimeIndices{};
  if (c.index_set == "progression") return ProgressionIndices{c.modulus};
  if (c.index_set == "almost-primes") return AlmostPrimeIndices{c.max_factors, false};
  config_error("index_set", "expected all, primes, progression or almost-primes");
}

OrbitSpec orbit_spec_of(const ExperimentConfig& c, IndexSet set) {
  OrbitSpec spec;
  spec.base = base_of(c);
  spec.step = c.s;
  spec.count = c.N;
  spec.mode = c.mode == "continuous" ? FlowMode::Continuous : FlowMode::Discrete;
  spec.index_set = std::move(set);
  return spec;
}

IntegrationConfig integration_of(const ExperimentConfig& c) { return {c.budget, c.shifts, c.seed}; }

json tolerances_of(const ExperimentConfig& c) {
  return {
      {"delta", c.delta},
      {"mass_floor", c.mass_floor},
      {"window_low", c.window_low},
      {"window_high", c.window_high},
      {"ratio_cap", c.ratio_cap},
      {"period_ratio_low", kPeriodRatioLow},
      {"period_ratio_high", kPeriodRatioHigh},
      {"period_height_floor", kPeriodHeightFloor},
      {"cusp_cutoff", c.cusp_cutoff},
      {"precision_floor_height", kPrecisionFloorHeight},
      {"linnik_window_low", LinnikReport{}.window_low},
      {"linnik_window_high", LinnikReport{}.window_high},
  };
}

json header_of(const ExperimentConfig& c) {
  return {{"schema_version", kSchemaVersion}, {"experiment", std::string(to_string(c.experiment))}};
}

// Orbit-type experiments: point list.
ExperimentResult run_orbit(const ExperimentConfig& c) {
  const OrbitSpec spec = orbit_spec_of(c, index_set_of(c));
  const OrbitBatch batch = orbit_points(spec);
  ExperimentResult r;
  r.report = header_of(c);
  r.report["base"] = to_json(iwasawa_decompose(spec.base));
  r.report["base_matrix"] = to_json(spec.base);
  r.report["count"] = batch.points.size();
  r.report["low_precision"] = batch.low_precision;
  json pts = json::array();
  r.table.header = {"n", "x", "y", "theta"};
  for (std::size_t i = 0; i < batch.points.size(); ++i) {
    const IwasawaPoint& p = batch.points[i];
    pts.push_back({{"n", batch.indices[i]}, {"x", clean(p.x)}, {"y", clean(p.y)}, {"theta", clean(p.theta)}});
    r.table.rows.push_back({format_unsigned(batch.indices[i]), format_number(p.x), format_number(p.y),
                            format_number(p.theta)});
  }
  r.report["points"] = std::move(pts);
  r.summary = std::to_string(batch.points.size()) + " reduced points";
  return r;
}

json ratio_json(const RatioReport& rr, const std::vector<TestFunction>& family, Table& table) {
  json balls = json::array();
  table.header = {"ball", "x", "y", "theta", "radius", "mass", "ratio"};
  for (std::size_t k = 0; k < rr.used.size(); ++k) {
    const auto& ball = std::get<BallIndicator>(family[rr.used[k]].kind());
    balls.push_back({{"ball", rr.used[k]},
                     {"center", to_json(ball.center)},
                     {"radius", ball.radius},
                     {"mass", rr.masses[k]},
                     {"ratio", rr.ratios[k]}});
    table.rows.push_back({std::to_string(rr.used[k]), format_number(ball.center.x), format_number(ball.center.y),
                          format_number(ball.center.theta), format_number(ball.radius), format_number(rr.masses[k]),
                          format_number(rr.ratios[k])});
  }
  return {{"N", rr.N},
          {"sample_size", rr.sample_size},
          {"escaped_mass", rr.escaped_mass},
          {"min_ratio", rr.min_ratio},
          {"max_ratio", rr.max_ratio},
          {"max_deviation", rr.max_deviation},
          {"balls", std::move(balls)}};
}

// Ball-ratio experiments: prime-orbit, almost-prime and hecke-prime.
ExperimentResult run_ratio(const ExperimentConfig& c) {
  const std::vector<TestFunction> family = ball_family(c.spacing, c.radius, c.y_cap);
  const std::vector<Estimate> masses = integrate_family(family, VolumeMeasure{}, integration_of(c));
  ExperimentResult r;
  RatioReport rr;
  if (c.experiment == Experiment::HeckePrime) {
    rr = prime_hecke_experiment(c.N, family, masses, c.mass_floor, true);
  } else {
    const IndexSet set = c.experiment == Experiment::PrimeOrbit ? IndexSet{PrimeIndices{}}
                                                                : IndexSet{AlmostPrimeIndices{c.max_factors, false}};
    const OrbitSpec spec = orbit_spec_of(c, set);
    rr = ratio_report(empirical_measure(spec, c.cusp_cutoff), family, masses, c.mass_floor);
    rr.N = c.N;
  }
  r.report = header_of(c);
  r.report["ratios"] = ratio_json(rr, family, r.table);
  std::ostringstream s;
  switch (c.experiment) {
    case Experiment::HeckePrime:
      r.assertion_ok = rr.min_ratio >= c.window_low && rr.max_ratio <= c.window_high;
      s << "ratios in [" << rr.min_ratio << ", " << rr.max_ratio << "], window [" << c.window_low << ", "
        << c.window_high << "]";
      break;
    case Experiment::PrimeOrbit:
      r.assertion_ok = rr.max_ratio <= c.ratio_cap;
      s << "max ratio " << rr.max_ratio << ", cap " << c.ratio_cap;
      break;
    default:
      r.assertion_ok = rr.min_ratio > 0.0;
      s << "min ratio " << rr.min_ratio << " over " << rr.used.size() << " balls";
      break;
  }
  r.report["assertion_ok"] = r.assertion_ok;
  r.summary = s.str();
  return r;
}

ExperimentResult run_period(const ExperimentConfig& c) {
  const GroupElement g = base_of(c);
  const PeriodReport p = fundamental_period_oracle(g, c.T, c.entry_bound);
  const double formula = fundamental_period_formula(g, c.T);
  const double ratio = formula / p.y_T;
  ExperimentResult r;
  r.report = header_of(c);
  r.report["T"] = c.T;
  r.report["entry_bound"] = c.entry_bound;
  r.report["base"] = to_json(iwasawa_decompose(g));
  r.report["y_T"] = p.y_T;
  r.report["y_T_times_T"] = p.y_T * c.T;
  r.report["gamma"] = to_json(p.gamma);
  r.report["endpoint"] = p.endpoint == Endpoint::Start ? "start" : "end";
  r.report["peak"] = to_json(p.peak);
  r.report["alpha_T"] = optional_json(p.alpha_T);
  r.report["W_T"] = optional_json(p.W_T);
  r.report["formula"] = formula;
  r.report["formula_over_oracle"] = ratio;
  r.assertion_ok = ratio >= kPeriodRatioLow && ratio <= kPeriodRatioHigh && p.y_T * c.T >= kPeriodHeightFloor;
  r.report["assertion_ok"] = r.assertion_ok;
  r.table.header = {"field", "value"};
  r.table.rows = {{"T", format_number(c.T)},
                  {"y_T", format_number(p.y_T)},
                  {"formula", format_number(formula)},
                  {"formula_over_oracle", format_number(ratio)},
                  {"peak_x", format_number(p.peak.x)},
                  {"peak_y", format_number(p.peak.y)},
                  {"peak_theta", format_number(p.peak.theta)}};
  r.summary = "y_T " + format_number(p.y_T) + ", formula/oracle " + format_number(ratio);
  return r;
}

ExperimentResult run_dani(const ExperimentConfig& c) {
  const GroupElement g = base_of(c);
  const bool continuous = c.mode == "continuous";
  DaniSearchConfig search;
  search.gamma_entry_bound = c.gamma_entry_bound;
  search.q_cap = c.q_cap;
  const DaniConditionVerdict v = continuous ? dani_condition_continuous(g, c.T, c.delta, c.exponents)
                                            : dani_condition_discrete(g, c.s, c.N, c.delta, c.exponents, search);
  const bool verified = !v.satisfied || verify_witness(v, g, continuous ? c.T : c.s, c.N, c.delta);
  ExperimentResult r;
  r.report = header_of(c);
  r.report["kind"] = continuous ? "continuous" : "discrete";
  r.report["satisfied"] = v.satisfied;
  r.report["witness_q"] = v.witness_q ? json(*v.witness_q) : json(nullptr);
  r.report["witness_gamma"] = v.witness_gamma ? to_json(*v.witness_gamma) : json(nullptr);
  r.report["witness_point"] = v.witness_point ? to_json(*v.witness_point) : json(nullptr);
  r.report["q2"] = v.q2 ? json(*v.q2) : json(nullptr);
  r.report["lhs"] = v.lhs;
  r.report["rhs"] = v.rhs;
  r.report["condition_i"] = v.condition_i ? json(*v.condition_i) : json(nullptr);
  r.report["forms_agree"] = v.forms_agree ? json(*v.forms_agree) : json(nullptr);
  r.report["base_within_bound"] = v.base_within_bound;
  r.report["exponents"] = to_json(v.exponents);
  r.report["note"] = v.note;
  r.report["witness_verified"] = verified;
  r.assertion_ok = verified;
  r.table.header = {"field", "value"};
  r.table.rows = {{"satisfied", v.satisfied ? "true" : "false"},
                  {"witness_q", v.witness_q ? format_unsigned(*v.witness_q) : ""},
                  {"lhs", format_number(v.lhs)},
                  {"rhs", format_number(v.rhs)},
                  {"witness_verified", verified ? "true" : "false"}};
  r.summary = std::string(v.satisfied ? "condition satisfied" : "condition not satisfied") +
              (verified ? "" : ", witness failed re-check");
  return r;
}

ExperimentResult run_discrepancy(const ExperimentConfig& c) {
  const std::vector<TestFunction> family = standard_test_family(c.spacing, c.radius, c.y_cap);
  const std::vector<Estimate> reference = integrate_family(family, VolumeMeasure{}, integration_of(c));
  const EmpiricalMeasure mu = empirical_measure(orbit_spec_of(c, index_set_of(c)), c.cusp_cutoff);
  const EquidistributionVerdict v = discrepancy(mu, VolumeMeasure{}, family, c.delta, integration_of(c), &reference);
  const std::vector<double> pairs = pair_with_family(mu, family);
  ExperimentResult r;
  r.report = header_of(c);
  r.report["sample_size"] = mu.points.size();
  r.report["escaped_mass"] = mu.escaped_mass;
  r.report["max_discrepancy"] = v.max_discrepancy;
  r.report["worst_index"] = v.worst_index;
  r.report["pass"] = v.pass;
  json rows = json::array();
  r.table.header = {"test", "x", "y", "theta", "lipschitz", "empirical", "integral", "integral_error"};
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& b = std::get<Bump>(family[k].kind());
    rows.push_back({{"test", k},
                    {"center", to_json(b.center)},
                    {"lipschitz", family[k].lipschitz_norm()},
                    {"empirical", pairs[k]},
                    {"integral", reference[k].value},
                    {"integral_error", reference[k].error}});
    r.table.rows.push_back({std::to_string(k), format_number(b.center.x), format_number(b.center.y),
                            format_number(b.center.theta), format_number(family[k].lipschitz_norm()),
                            format_number(pairs[k]), format_number(reference[k].value),
                            format_number(reference[k].error)});
  }
  r.report["tests"] = std::move(rows);
  r.assertion_ok = v.pass;
  r.summary = "max discrepancy " + format_number(v.max_discrepancy);
  return r;
}

TestFunction bump_of(const ExperimentConfig& c) {
  return TestFunction::bump(iwasawa_decompose(parse_base_point(c.center)), c.radius);
}

ExperimentResult run_selberg(const ExperimentConfig& c) {
  const std::uint64_t T = c.N;
  const PrimeTable primes = primes_up_to(T);
  std::vector<double> a(T + 1, 1.0);
  MainTerm mode = MainTerm::Exact;
  if (c.sequence == "bump") {
    OrbitSpec spec = orbit_spec_of(c, AllIndices{});
    spec.mode = FlowMode::Discrete;
    spec.count = T + 1;
    const OrbitBatch batch = orbit_points(spec);
    const TestFunction f = bump_of(c);
    for (std::size_t n = 0; n <= T; ++n) a[n] = f.evaluate_reduced(batch.points[n]);
    mode = MainTerm::ProgressionMean;
  }
  const SieveReport s = selberg_upper_bound(a, T, c.D, mode, static_cast<double>(T), primes);
  ExperimentResult r;
  r.report = header_of(c);
  r.report["sequence"] = c.sequence;
  r.report["T"] = s.T;
  r.report["D"] = s.D;
  r.report["A"] = s.A;
  r.report["main_term"] = s.main_term;
  r.report["remainder_term"] = s.remainder_term;
  r.report["upper_bound"] = s.upper_bound;
  r.report["actual"] = s.actual;
  r.report["holds"] = s.holds;
  json rd = json::array();
  r.table.header = {"d", "tau3", "remainder"};
  for (std::uint64_t d = 1; d < s.D; ++d) {
    rd.push_back({{"d", d}, {"tau3", divisor_tau3(d)}, {"r_d", s.remainders[d]}});
    r.table.rows.push_back({format_unsigned(d), format_unsigned(divisor_tau3(d)), format_number(s.remainders[d])});
  }
  r.report["remainders"] = std::move(rd);
  r.assertion_ok = s.holds;
  r.summary = "actual " + format_number(s.actual) + " <= bound " + format_number(s.upper_bound) + ": " +
              (s.holds ? "holds" : "fails");
  return r;
}

ExperimentResult run_type(const ExperimentConfig& c) {
  const TestFunction f = bump_of(c);
  const double mean = integrate(f, VolumeMeasure{}, integration_of(c)).value;
  ExperimentResult r;
  r.report = header_of(c);
  r.report["N"] = c.N;
  r.report["volume_mean"] = mean;
  r.table.header = {"field", "value"};
  if (c.experiment == Experiment::Type1) {
    const double v = type1_sum(f, mean, c.N, c.D);
    r.report["D"] = c.D;
    r.report["type1"] = v;
    r.table.rows = {{"D", format_unsigned(c.D)}, {"type1", format_number(v)}};
    r.summary = "type I sum " + format_number(v);
  } else {
    const double v = type2_sum(f, mean, f, c.N, c.d1, c.d2);
    r.report["d1"] = c.d1;
    r.report["d2"] = c.d2;
    r.report["type2"] = v;
    r.table.rows = {{"d1", format_unsigned(c.d1)}, {"d2", format_unsigned(c.d2)}, {"type2", format_number(v)}};
    r.summary = "type II sum " + format_number(v);
  }
  return r;
}

ExperimentResult run_linnik(const ExperimentConfig& c) {
  const IwasawaPoint center = iwasawa_decompose(parse_base_point(c.center));
  const LinnikReport l = linnik_projection_experiment(static_cast<std::int64_t>(c.N), center, c.radius, c.cusp_cutoff);
  json U = {{"center", to_json(center)}, {"radius", std::isinf(c.radius) ? json("inf") : json(c.radius)}};
  if (!std::isinf(c.radius)) {
    U["mass"] = integrate(TestFunction::ball(center, c.radius), VolumeMeasure{}, integration_of(c)).value;
  }
  ExperimentResult r;
  r.report = header_of(c);
  r.report["N"] = l.N;
  r.report["U"] = std::move(U);
  r.report["total"] = l.in_region;
  r.report["b1_prime"] = l.b1_prime;
  r.report["ratio"] = l.ratio;
  r.report["ratio_times_log_N"] = l.ratio_times_log;
  r.report["window"] = json::array({l.window_low, l.window_high});
  r.report["total_reps"] = l.total_reps;
  r.report["escaped"] = l.escaped;
  r.report["non_invertible"] = l.non_invertible;
  r.assertion_ok = l.within_window;
  r.table.header = {"field", "value"};
  r.table.rows = {{"N", std::to_string(l.N)},
                  {"total", std::to_string(l.in_region)},
                  {"b1_prime", std::to_string(l.b1_prime)},
                  {"ratio", format_number(l.ratio)},
                  {"ratio_times_log_N", format_number(l.ratio_times_log)},
                  {"escaped", std::to_string(l.escaped)},
                  {"non_invertible", std::to_string(l.non_invertible)}};
  r.summary = "ratio * log N = " + format_number(l.ratio_times_log);
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void apply_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("HOROLAB_THREADS")) {
      const std::string_view text(env);
      int parsed = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), parsed);
      if (ec != std::errc{} || ptr != text.data() + text.size() || parsed < 1) {
        config_error("HOROLAB_THREADS", "expected a positive integer");
      }
      n = parsed;
    }
  }
  set_thread_limit(n);
}

}  // namespace

std::string_view to_string(Experiment e) {
  for (const auto& [k, name] : kNames) {
    if (k == e) return name;
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& entry : kNames) v.push_back(entry.first);
    return v;
  }();
  return all;
}

void validate(const ExperimentConfig& c) {
  if (!(c.s > 0.0) || !std::isfinite(c.s)) config_error("s", "must be positive and finite");
  if (c.N < 1) config_error("N", "must be >= 1");
  if (!(c.T > 0.0) || !std::isfinite(c.T)) config_error("T", "must be positive and finite");
  if (!(c.delta > 0.0 && c.delta < 1.0)) config_error("delta", "must lie in (0, 1)");
  if (c.entry_bound < 1) config_error("entry_bound", "must be >= 1");
  if (!(c.exponents.q_exponent > 0.0)) config_error("q_exponent", "must be positive");
  if (!(c.exponents.bound_exponent > 0.0)) config_error("bound_exponent", "must be positive");
  if (c.gamma_entry_bound < 1) config_error("gamma_entry_bound", "must be >= 1");
  if (c.q_cap < 1) config_error("q_cap", "must be >= 1");
  if (c.modulus < 1) config_error("modulus", "must be >= 1");
  if (c.max_factors < 1) config_error("max_factors", "must be >= 1");
  if (!(c.mass_floor >= 0.0)) config_error("mass_floor", "must be >= 0");
  if (!(c.radius > 0.0)) config_error("radius", "must be positive");
  if (!(c.spacing > 0.0)) config_error("spacing", "must be positive");
  if (!(c.y_cap > 1.0)) config_error("y_cap", "must exceed 1");
  if (!(c.cusp_cutoff > 1.0)) config_error("cusp_cutoff", "must exceed 1");
  if (!(c.window_low <= c.window_high)) config_error("window_low", "must not exceed window_high");
  if (!(c.ratio_cap > 0.0)) config_error("ratio_cap", "must be positive");
  if (c.budget < 1000) config_error("budget", "must be >= 1000");
  if (c.shifts < 2) config_error("shifts", "must be >= 2");
  if (c.mode != "discrete" && c.mode != "continuous") config_error("mode", "expected discrete or continuous");
  if (c.sequence != "ones" && c.sequence != "bump") config_error("sequence", "expected ones or bump");
  (void)index_set_of(c);
  try {
    (void)base_of(c);
  } catch (const Error& e) {
    config_error(c.alpha.empty() ? "base" : "alpha", e.what());
  }
  try {
    (void)parse_base_point(c.center);
  } catch (const Error& e) {
    config_error("center", e.what());
  }
  const bool ball_region = c.experiment == Experiment::Linnik;
  if (std::isinf(c.radius) && !ball_region) config_error("radius", "must be finite");
  switch (c.experiment) {
    case Experiment::Selberg:
      if (c.N < 2 || c.D < 2 || c.D > c.N) config_error("D", "needs 1 < D <= N");
      break;
    case Experiment::Type1:
      if (c.D < 1 || c.D >= c.N) config_error("D", "needs 1 <= D < N");
      break;
    case Experiment::Type2:
      if (!is_prime_slow(c.d1)) config_error("d1", "must be prime");
      if (!is_prime_slow(c.d2)) config_error("d2", "must be prime");
      if (c.d1 == c.d2) config_error("d2", "must differ from d1");
      break;
    case Experiment::Linnik:
    case Experiment::HeckePrime:
    case Experiment::PrimeOrbit:
      if (c.N < 2) config_error("N", "must be >= 2");
      break;
    case Experiment::DaniCheck:
      if (c.mode == "discrete" && !(c.s > 1.0 / (c.delta * static_cast<double>(c.N)))) {
        config_error("s", "discrete check needs s > 1 / (delta N)");
      }
      break;
    default:
      break;
  }
  if (c.mode == "continuous" && c.index_set != "all") config_error("mode", "continuous mode needs index_set all");
}

json to_json(const ExperimentConfig& c) {
  return {
      {"experiment", std::string(to_string(c.experiment))},
      {"base", c.base},
      {"alpha", c.alpha},
      {"center", c.center},
      {"index_set", c.index_set},
      {"mode", c.mode},
      {"sequence", c.sequence},
      {"s", c.s},
      {"N", c.N},
      {"T", c.T},
      {"delta", c.delta},
      {"entry_bound", c.entry_bound},
      {"exponents", to_json(c.exponents)},
      {"gamma_entry_bound", c.gamma_entry_bound},
      {"q_cap", c.q_cap},
      {"modulus", c.modulus},
      {"max_factors", c.max_factors},
      {"D", c.D},
      {"d1", c.d1},
      {"d2", c.d2},
      {"mass_floor", c.mass_floor},
      {"radius", std::isinf(c.radius) ? json("inf") : json(c.radius)},
      {"spacing", c.spacing},
      {"y_cap", c.y_cap},
      {"cusp_cutoff", c.cusp_cutoff},
      {"window_low", c.window_low},
      {"window_high", c.window_high},
      {"ratio_cap", c.ratio_cap},
      {"budget", c.budget},
      {"shifts", c.shifts},
      {"seed", c.seed},
      {"output_dir", c.output_dir.string()},
      {"format", c.format == OutputFormat::Csv ? "csv" : "json"},
      {"threads", c.threads},
  };
}

double parse_expression(std::string_view text) { return parse_expression_at(text, 0); }

GroupElement parse_base_point(std::string_view spec) {
  if (spec == "identity") return GroupElement::identity();
  if (spec == "sqrt2") return from_alpha(std::numbers::sqrt2 - 1.0, 1.0, std::numbers::pi / 2);
  if (spec == "golden") return from_alpha((std::sqrt(5.0) - 1.0) / 2.0, 1.0, std::numbers::pi / 2);
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::ParseError, "position 0: unknown base point '" + std::string(spec) + "'");
  }
  const std::string_view head = spec.substr(0, colon);
  const std::string_view body = spec.substr(colon + 1);
  const std::size_t offset = colon + 1;
  if (head == "hecke") {
    std::uint64_t N = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), N);
    if (ec != std::errc{} || ptr != body.data() + body.size() || N < 1) {
      fail(ErrorCode::ParseError,
           "position " + std::to_string(offset + static_cast<std::size_t>(ptr - body.data())) +
               ": expected a positive integer");
    }
    return hecke_base(N);
  }
  if (head == "iwasawa" || head == "alpha") {
    const bool alpha_form = head == "alpha";
    const char sep = alpha_form ? ':' : '=';
    // The alpha form starts with its own value: "alpha:<e>,y:<e>,theta:<e>".
    const std::string prefixed = alpha_form ? "alpha:" + std::string(body) : std::string(body);
    const std::size_t base_offset = alpha_form ? 0 : offset;
    const std::vector<Field> fields = split_fields(prefixed, base_offset, sep);
    const std::array<std::string_view, 3> keys = alpha_form ? std::array<std::string_view, 3>{"alpha", "y", "theta"}
                                                            : std::array<std::string_view, 3>{"x", "y", "theta"};
    std::array<std::optional<double>, 3> values;
    for (const Field& f : fields) {
      std::size_t k = 0;
      while (k < keys.size() && keys[k] != f.key) ++k;
      if (k == keys.size()) {
        fail(ErrorCode::ParseError, "position " + std::to_string(f.value_offset - f.key.size() - 1) +
                                        ": unknown key '" + std::string(f.key) + "'");
      }
      if (values[k]) {
        fail(ErrorCode::ParseError, "position " + std::to_string(f.value_offset - f.key.size() - 1) +
                                        ": duplicate key '" + std::string(f.key) + "'");
      }
      values[k] = parse_expression_at(f.value, f.value_offset);
    }
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (!values[k]) {
        fail(ErrorCode::ParseError,
             "position " + std::to_string(spec.size()) + ": missing key '" + std::string(keys[k]) + "'");
      }
    }
    if (alpha_form) return from_alpha(*values[0], *values[1], *values[2]);
    if (!(*values[1] > 0.0)) fail(ErrorCode::ParseError, "position " + std::to_string(offset) + ": y must be positive");
    return iwasawa_compose({*values[0], *values[1], *values[2]});
  }
  fail(ErrorCode::ParseError, "position 0: unknown base point kind '" + std::string(head) + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  const auto emit_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      const std::string& f = row[i];
      if (f.find_first_of(",\"\r\n") == std::string::npos) {
        out += f;
        continue;
      }
      out += '"';
      for (char ch : f) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    }
    out += "\r\n";
  };
  emit_row(table.header);
  for (const auto& row : table.rows) emit_row(row);
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  switch (c.experiment) {
    case Experiment::Orbit:
      return run_orbit(c);
    case Experiment::PrimeOrbit:
    case Experiment::AlmostPrime:
    case Experiment::HeckePrime:
      return run_ratio(c);
    case Experiment::Period:
      return run_period(c);
    case Experiment::DaniCheck:
      return run_dani(c);
    case Experiment::Discrepancy:
      return run_discrepancy(c);
    case Experiment::Selberg:
      return run_selberg(c);
    case Experiment::Type1:
    case Experiment::Type2:
      return run_type(c);
    case Experiment::Linnik:
      return run_linnik(c);
  }
  fail(ErrorCode::ConfigError, "unknown experiment");
}

int run(const ExperimentConfig& c, std::string* message) {
  const auto started = std::chrono::steady_clock::now();
  try {
    apply_threads(c.threads);
    const ExperimentResult result = run_experiment(c);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::filesystem::create_directories(c.output_dir);
    const bool csv = c.format == OutputFormat::Csv;
    const std::string report_name = csv ? "report.csv" : "report.json";
    {
      std::ofstream out(c.output_dir / report_name, std::ios::binary);
      if (csv) {
        out << to_csv(result.table);
      } else {
        out << result.report.dump(2) << '\n';
      }
      if (!out) fail(ErrorCode::ConfigError, "cannot write " + (c.output_dir / report_name).string());
    }
    const json manifest = {
        {"schema_version", kSchemaVersion},
        {"library_version", std::string(kLibraryVersion)},
        {"experiment", std::string(to_string(c.experiment))},
        {"config", to_json(c)},
        {"exponents", to_json(c.exponents)},
        {"tolerances", tolerances_of(c)},
        {"threads", thread_limit()},
        {"wall_time_seconds", wall},
        {"timestamp", utc_timestamp()},
        {"report_file", report_name},
        {"assertion_ok", result.assertion_ok},
        {"summary", result.summary},
    };
    std::ofstream(c.output_dir / "manifest.json", std::ios::binary) << manifest.dump(2) << '\n';
    if (message) *message = result.summary;
    return result.assertion_ok ? 0 : 2;
  } catch (const std::exception& e) {
    if (message) *message = e.what();
    return 1;
  }
}

}  // namespace horolab::cli
