#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hyperlab/corpus.hpp"
#include "hyperlab/hjb.hpp"
#include "hyperlab/hypercheck.hpp"
#include "hyperlab/levy.hpp"
#include "hyperlab/transport.hpp"

#ifndef HYPERLAB_VERSION
#define HYPERLAB_VERSION "0.0.0"
#endif

namespace hyperlab {

inline constexpr const char* kCsvSchema = "hyperlab-csv/1";

enum class OutputFormat { json, csv };

struct Range {
  std::string param;
  double lo = 0, hi = 0;
  int steps = 1;

  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < steps; ++i)
      v.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
    return v;
  }
};

/// PARAM=LO:HI:STEPS
inline Range parse_range(const std::string& text) {
  const auto eq = text.find('=');
  require(eq != std::string::npos && eq > 0, ErrorKind::invalid_argument,
          "range must look like PARAM=LO:HI:STEPS, got '" + text + "'");
  Range r;
  r.param = text.substr(0, eq);
  std::stringstream ss(text.substr(eq + 1));
  std::string lo, hi, steps;
  if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, steps))
    fail(ErrorKind::invalid_argument, "range must look like PARAM=LO:HI:STEPS, got '" + text + "'");
  try {
    r.lo = std::stod(lo);
    r.hi = std::stod(hi);
    r.steps = std::stoi(steps);
  } catch (const std::exception&) {
    fail(ErrorKind::invalid_argument, "range '" + text + "' has a non-numeric field");
  }
  require(r.steps >= 1, ErrorKind::invalid_argument, "range '" + text + "' is empty");
  return r;
}

struct RunConfig {
  std::optional<double> half_width;
  std::optional<std::size_t> points;
  std::optional<double> tolerance;
  std::optional<double> saturation_tolerance;
  /// Comma separated corpus descriptors; "default" expands to the built-in set.
  std::string corpus = "default";
  int random_members = 2;
  std::uint64_t seed = 7;
  std::map<std::string, double> params;
  std::vector<Range> sweep;
  OutputFormat format = OutputFormat::json;
  std::string out;
  unsigned workers = 0;

  /// Applies one key=value setting (dotted keys for nested fields).
  void set(const std::string& key, const std::string& value) {
    auto num = [&]() {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        fail(ErrorKind::invalid_argument, "config key '" + key + "' needs a number, got '" +
                                              value + "'");
      }
    };
    if (key == "grid.half_width") {
      half_width = num();
    } else if (key == "grid.points") {
      points = static_cast<std::size_t>(num());
    } else if (key == "tolerance") {
      tolerance = num();
    } else if (key == "saturation_tolerance") {
      saturation_tolerance = num();
    } else if (key == "corpus") {
      corpus = value;
    } else if (key == "corpus.random") {
      random_members = static_cast<int>(num());
    } else if (key == "seed") {
      seed = static_cast<std::uint64_t>(num());
    } else if (key == "workers") {
      workers = static_cast<unsigned>(num());
    } else if (key == "output.format") {
      format = parse_format(value);
    } else if (key == "output.path") {
      out = value;
    } else if (key.rfind("param.", 0) == 0) {
      params[key.substr(6)] = num();
    } else if (key.rfind("sweep.", 0) == 0) {
      sweep.push_back(parse_range(key.substr(6) + "=" + value));
    } else {
      fail(ErrorKind::invalid_argument, "unknown config key '" + key + "'");
    }
  }

  static OutputFormat parse_format(const std::string& v) {
    if (v == "json") return OutputFormat::json;
    if (v == "csv") return OutputFormat::csv;
    fail(ErrorKind::invalid_argument, "output format must be json or csv, got '" + v + "'");
  }

  /// Reads key = value lines; '#' starts a comment.
  static RunConfig load(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::invalid_argument, "cannot read config " + path);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
      ++lineno;
      line = trim(line.substr(0, line.find('#')));
      if (line.empty()) continue;
      const auto eq = line.find('=');
      require(eq != std::string::npos, ErrorKind::invalid_argument,
              path + ":" + std::to_string(lineno) + ": expected key = value");
      base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
  }

  static RunConfig load(const std::string& path);

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["grid"] = {{"half_width", half_width ? nlohmann::ordered_json(*half_width) : nullptr},
                 {"points", points ? nlohmann::ordered_json(*points) : nullptr}};
    j["tolerance"] = tolerance ? nlohmann::ordered_json(*tolerance) : nullptr;
    j["saturation_tolerance"] =
        saturation_tolerance ? nlohmann::ordered_json(*saturation_tolerance) : nullptr;
    j["corpus"] = {{"members", corpus}, {"random", random_members}};
    j["seed"] = seed;
    j["params"] = params;
    auto sw = nlohmann::ordered_json::array();
    for (const auto& r : sweep)
      sw.push_back({{"param", r.param}, {"lo", r.lo}, {"hi", r.hi}, {"steps", r.steps}});
    j["sweep"] = sw;
    j["output"] = {{"format", format == OutputFormat::json ? "json" : "csv"}, {"path", out}};
    return j;
  }
};

inline RunConfig RunConfig::load(const std::string& path) { return load(path, RunConfig()); }

/// Parameters of one check invocation: catalog defaults overridden by the
/// config and, in sweeps, by the lattice point.
class CheckContext {
 public:
  CheckContext(const RunConfig& cfg, Params values) : cfg_(cfg), values_(std::move(values)) {}

  double operator[](const std::string& key) const {
    for (const auto& [k, v] : values_)
      if (k == key) return v;
    fail(ErrorKind::invalid_argument, "check has no parameter '" + key + "'");
  }
  int integer(const std::string& key) const { return static_cast<int>(std::lround((*this)[key])); }
  const Params& values() const { return values_; }
  const RunConfig& config() const { return cfg_; }

  Grid grid(double half_width, std::size_t points) const {
    return make_grid(cfg_.half_width.value_or(half_width), cfg_.points.value_or(points));
  }

  std::vector<TestFunction> corpus() const { return build_corpus(cfg_); }

  static std::vector<TestFunction> build_corpus(const RunConfig& cfg) {
    std::vector<TestFunction> out;
    std::stringstream ss(cfg.corpus);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      const std::string name = item.substr(0, colon);
      const bool has = colon != std::string::npos;
      const double v = has ? std::stod(item.substr(colon + 1)) : NAN;
      if (name == "default") {
        for (auto& f : default_corpus(cfg.seed, cfg.random_members)) out.push_back(std::move(f));
      } else if (name == "bump") {
        out.push_back(bump(has ? v : 0.2));
      } else if (name == "quadratic") {
        out.push_back(quadratic_bump(has ? v : 0.1));
      } else if (name == "capped-quadratic") {
        out.push_back(capped_quadratic());
      } else if (name == "kink") {
        out.push_back(smooth_kink());
      } else if (name == "exp-linear") {
        out.push_back(from_closed("exp(" + std::to_string(has ? v : 0.3) + "x)",
                                  exp_linear(has ? v : 0.3)));
      } else if (name == "square-exp") {
        out.push_back(from_closed("exp(" + std::to_string(has ? v : 0.05) + "x^2)",
                                  square_exponential(has ? v : 0.05)));
      } else if (name == "mixture") {
        for (auto& f : random_mixtures(cfg.seed, has ? static_cast<int>(v) : 1))
          out.push_back(std::move(f));
      } else if (name == "file") {
        fail(ErrorKind::invalid_argument, "file corpus members are written file=PATH");
      } else if (name.rfind("file=", 0) == 0) {
        out.push_back(load_samples(item.substr(5)));
      } else {
        fail(ErrorKind::invalid_argument, "unknown corpus member '" + item + "'");
      }
    }
    require(!out.empty(), ErrorKind::invalid_argument, "corpus is empty");
    return out;
  }

  /// Two-column "x value" samples on a symmetric uniform grid.
  static TestFunction load_samples(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::invalid_argument, "cannot read samples " + path);
    std::vector<double> xs, vs;
    double x, v;
    while (in >> x >> v) {
      xs.push_back(x);
      vs.push_back(v);
    }
    require(xs.size() >= kMinGridPoints, ErrorKind::invalid_argument,
            path + ": need at least 8 samples");
    const Grid g = make_grid(xs.back(), xs.size());
    require(std::abs(xs.front() + xs.back()) <= 1e-9 * xs.back(), ErrorKind::invalid_argument,
            path + ": samples must cover a symmetric interval");
    for (std::size_t i = 0; i < xs.size(); ++i)
      require(std::abs(xs[i] - g.node(i)) <= 1e-9 * g.half_width, ErrorKind::invalid_argument,
              path + ": samples must be uniformly spaced");
    return from_grid(path, GridFunction(g, std::move(vs)));
  }

 private:
  const RunConfig& cfg_;
  Params values_;
};

using CheckFn = std::function<std::vector<InequalityReport>(const CheckContext&)>;

struct CatalogEntry {
  std::string name;
  std::string summary;
  Params defaults;
  CheckFn run;
};

namespace detail {

inline InequalityReport bound_report(std::string check, std::string subject, double value,
                                     double bound, Params params) {
  InequalityReport r = make_report(std::move(check), value, bound, 0.0, std::move(params));
  r.subject = std::move(subject);
  return r;
}

// Density of N(mean + m, var) against N(mean, var).
inline TestFunction kernel_shift_tilt(double m, double mean, double var) {
  const double b = m / var;
  ClosedForm cf{GaussExp{std::exp(-b * mean - 0.5 * m * m / var), 0.0, b, 1}};
  return from_closed("shift(" + std::to_string(m) + ")", cf);
}

// (1 + c (y - mean)^2)/(1 + c var), mean one under N(mean, var).
inline TestFunction kernel_quadratic_tilt(double c, double mean, double var) {
  TestFunction f = from_function("quadratic-tilt(" + std::to_string(c) + ")", [=](double y) {
    return (1 + c * (y - mean) * (y - mean)) / (1 + c * var);
  });
  f.gradient = [=](double y) { return 2 * c * (y - mean) / (1 + c * var); };
  f.laplacian = [=](double) { return 2 * c / (1 + c * var); };
  return f;
}

inline Semigroup semigroup_for_rho(double rho) {
  if (rho == 0) return heat_semigroup(1);
  if (rho == 1) return ou_semigroup(1);
  fail(ErrorKind::invalid_argument, "rho must be 0 (heat) or 1 (Ornstein-Uhlenbeck)");
}

inline InequalityReport error_report(std::string check, std::string subject, Params params,
                                     const Error& err) {
  InequalityReport r;
  r.check = std::move(check);
  r.subject = std::move(subject);
  r.params = std::move(params);
  r.lhs = r.rhs = r.margin = r.log_ratio = NAN;
  r.status = Status::warning;
  r.notes.push_back(std::string(to_string(err.kind())) + ": " + err.what());
  return r;
}

// Runs body for one corpus member; a domain error skips only that member.
template <class F>
void per_subject(std::vector<InequalityReport>& out, const CheckContext& c, const char* check,
                 const TestFunction& f, F&& body) {
  try {
    out.push_back(body(f));
  } catch (const Error& e) {
    out.push_back(error_report(check, f.name, c.values(), e));
  }
}

inline double sup_on(const GridFunction& a, const GridFunction& b, double radius) {
  double e = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.grid().node(i)) <= radius) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace detail

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> c;

    c.push_back({"nelson",
                 "||N_t g||_{q2} <= ||g||_{q1}, q2 - 1 = e^{2t}(q1 - 1), Mehler and heat routes",
                 {{"q1", 2.0}, {"t", 0.5 * std::log(3.0)}},
                 [](const CheckContext& c) {
                   std::vector<InequalityReport> out;
                   for (const auto& g : c.corpus()) try {
                     auto a = check_nelson(c["q1"], c["t"], g);
                     auto b = check_nelson_via_heat(c["q1"], c["t"], g);
                     const double gap = std::max(std::abs(a.lhs - b.lhs), std::abs(a.rhs - b.rhs));
                     b.extras.push_back({"route_gap", gap});
                     if (gap > 1e-8) {
                       b.status = Status::fail;
                       b.notes.push_back("heat route disagrees with the Mehler route");
                     }
                     out.push_back(std::move(a));
                     out.push_back(std::move(b));
                   } catch (const Error& e) {
                     out.push_back(detail::error_report("nelson", g.name, c.values(), e));
                   }
                   return out;
                 }});

    c.push_back({"cd-rho-infty",
                 "P_s((P_{t-s} f)^{q2})^{1/q2} <= P_t(f^{q1})^{1/q1} under CD(rho, inf)",
                 {{"q1", 2.0}, {"s", 0.5}, {"t", 1.0}, {"rho", 0.0}, {"x", 0.0}},
                 [](const CheckContext& c) {
                   const auto sch = ExponentSchedule::cd_rho_infty(c["q1"], c["s"], c["t"], c["rho"]);
                   const auto sg = detail::semigroup_for_rho(c["rho"]);
                   CheckOptions o;
                   o.x = c["x"];
                   std::vector<InequalityReport> out;
                   for (const auto& f : c.corpus())
                     detail::per_subject(out, c, "cd-rho-infty", f, [&](const TestFunction& g) {
                       return check_cd_rho_infty(sch, g, sg, o);
                     });
                   return out;
                 }});

    c.push_back({"cd0n",
                 "CD(0,n) bound with constant M (N when exponents are below one); "
                 "s = s_ratio t, u1 = u1_ratio t, u2 = u2_ratio s, q2 from t - s = u1 q1 - u2 q2",
                 {{"q1", 2.0}, {"t", 1.0}, {"s_ratio", 0.5}, {"u1_ratio", 1.0}, {"u2_ratio", 0.8},
                  {"n", 1.0}, {"x", 0.0}},
                 [](const CheckContext& c) {
                   const double t = c["t"], s = c["s_ratio"] * t;
                   const double u1 = c["u1_ratio"] * t, u2 = c["u2_ratio"] * s;
                   const double q1 = c["q1"];
                   const double q2 = (u1 * q1 - (t - s)) / u2;
                   const int n = c.integer("n");
                   const auto sch = ExponentSchedule::cd0n(q1, q2, u1, u2, s, n);
                   CheckOptions o;
                   o.x = c["x"];
                   std::vector<InequalityReport> out;
                   if (n == 1)
                     for (const auto& f : c.corpus())
                       detail::per_subject(out, c, "cd0n", f, [&](const TestFunction& g) {
                         return check_cd0n(sch, g, o);
                       });
                   if (sch.constraint == Constraint::CD0n) {
                     const double a = cd0n_extremal_coefficient(sch);
                     if (1 - 4 * std::max(t, u1) * a > 0) {
                       auto r = check_cd0n(sch, from_closed("extremal exp(a|x|^2)",
                                                            square_exponential(a, n)), o);
                       r.extras.push_back({"a", a});
                       out.push_back(std::move(r));
                     }
                   }
                   return out;
                 }});

    c.push_back({"local-lsi",
                 "local log-Sobolev bounds for the kernel measure: rho form (heat, OU), "
                 "dimensional form, lambda family and the Li-Yau lower bound",
                 {{"t", 0.5}, {"lambda", 0.5}, {"x", 0.0}},
                 [](const CheckContext& c) {
                   CheckOptions o;
                   o.x = c["x"];
                   std::vector<InequalityReport> out;
                   const auto heat = heat_semigroup(1), ou = ou_semigroup(1);
                   for (const auto& f : c.corpus()) try {
                     for (auto fl : {LsiFlavor::rho_form, LsiFlavor::zero_n_form,
                                     LsiFlavor::lambda_family, LsiFlavor::li_yau})
                       out.push_back(check_local_lsi(heat, f, c["t"], fl, c["lambda"], o));
                     out.push_back(check_local_lsi(ou, f, c["t"], LsiFlavor::rho_form, 1.0, o));
                   } catch (const Error& e) {
                     out.push_back(detail::error_report("local-lsi", f.name, c.values(), e));
                   }
                   return out;
                 }});

    c.push_back({"ou-dimensional",
                 "||N_t f||_{q2} <= M^{n/2} ||T_{-a} f||_{q1}, q2 - 1 = e^{2t}(q1 e^{-a} - 1)",
                 {{"q1", 2.0}, {"t", 0.5 * std::log(3.0)}, {"a", 0.0}, {"n", 1.0}},
                 [](const CheckContext& c) {
                   const auto sch = ExponentSchedule::ou_dimensional(c["q1"], c["t"], c["a"], c["n"]);
                   std::vector<InequalityReport> out;
                   for (const auto& f : c.corpus())
                     detail::per_subject(out, c, "ou-dimensional", f, [&](const TestFunction& g) {
                       return check_ou_dimensional(sch, g);
                     });
                   return out;
                 }});

    c.push_back({"kernel-diagonal",
                 "n_{2t}(x,x) = V_t(x)^2 on x in [-4, 4]",
                 {{"t", 0.3}, {"n", 1.0}},
                 [](const CheckContext& c) {
                   std::vector<InequalityReport> out;
                   for (int k = 0; k <= 16; ++k)
                     out.push_back(kernel_diagonal_identity(c["t"], -4 + 0.5 * k, c.integer("n")));
                   return out;
                 }});

    c.push_back({"ou-trace",
                 "trace of N_t: quadrature, integral of V_{t/2}^2 and sum of e^{-t|k|}",
                 {{"t", std::log(2.0)}, {"n", 1.0}},
                 [](const CheckContext& c) {
                   return std::vector<InequalityReport>{
                       trace_report(ou_trace(c["t"], c.integer("n")))};
                 }});

    c.push_back({"hopf-lax",
                 "Q_t(x^2/2) = x^2/(2(1+t)), Q_{t/2}Q_{t/2} = Q_t, Lipschitz envelope",
                 {{"t", 1.0}},
                 [](const CheckContext& c) {
                   const Grid g = c.grid(8.0, 2049);
                   const double t = c["t"], h = g.spacing;
                   const auto f = sample(g, [](double x) { return 0.5 * x * x; });
                   const auto q = hopf_lax(f, t).values;
                   const auto exact = sample(g, [t](double x) { return x * x / (2 * (1 + t)); });
                   const auto qq = hopf_lax(hopf_lax(f, 0.5 * t).values, 0.5 * t).values;
                   const Params p{{"t", t}, {"h", h}};
                   std::vector<InequalityReport> out;
                   out.push_back(detail::bound_report("hopf-lax", "x^2/2 vs closed form",
                                                      detail::sup_on(q, exact, 4), 2 * h, p));
                   out.push_back(detail::bound_report("hopf-lax", "x^2/2 semigroup law",
                                                      detail::sup_on(qq, q, 4), h, p));
                   // 2-Lipschitz data: f - 2t <= Q_t f <= f.
                   const auto k = sample(g, [](double x) { return 2 * std::abs(x); });
                   const auto qk = hopf_lax(k, t).values;
                   double viol = 0;
                   for (std::size_t i = 0; i < g.points; ++i)
                     viol = std::max({viol, qk[i] - k[i], k[i] - 2 * t - qk[i]});
                   out.push_back(detail::bound_report("hopf-lax", "2|x| envelope", viol, 0.0, p));
                   return out;
                 }});

    c.push_back({"viscous-hj",
                 "-2 eps log P_{eps t}(e^{-f/(2 eps)}) against Q_t f on |x| <= 4",
                 {{"t", 1.0}, {"eps", 0.1}},
                 [](const CheckContext& c) {
                   const Grid g = c.grid(8.0, 2049);
                   const double t = c["t"], eps = c["eps"];
                   const double band = 5 * eps * std::max(1.0, std::log(1 / eps));
                   std::vector<InequalityReport> out;
                   for (const auto& [name, fn] :
                        std::vector<std::pair<std::string, RealFn>>{
                            {"x^2/2", [](double x) { return 0.5 * x * x; }},
                            {"|x|", [](double x) { return std::abs(x); }}}) {
                     const auto f = sample(g, fn);
                     out.push_back(detail::bound_report(
                         "viscous-hj", name,
                         detail::sup_on(viscous_hj(f, t, eps), hopf_lax(f, t).values, 4), band,
                         {{"t", t}, {"eps", eps}}));
                   }
                   return out;
                 }});

    c.push_back({"hj-rho",
                 "P_u(e^{q1 Q_t f})^{1/q1} <= P_u(e^{q2 f})^{1/q2}, q1 = q2 + rho t/(1 - e^{-2 rho u})",
                 {{"q2", 0.5}, {"t", 1.0}, {"u", 1.0}, {"rho", 0.0}, {"x", 0.0}},
                 [](const CheckContext& c) {
                   const auto sch = ExponentSchedule::hj_rho(c["q2"], c["t"], c["u"], c["rho"]);
                   const auto sg = detail::semigroup_for_rho(c["rho"]);
                   const Grid g = c.grid(16.0, 16007);
                   CheckOptions o;
                   o.x = c["x"];
                   std::vector<InequalityReport> out;
                   for (const auto& [name, fn] : hj_corpus()) {
                     auto r = check_hj_hyper_rho(sch, sample(g, fn), sg, o);
                     r.subject = name + " / " + r.subject;
                     out.push_back(std::move(r));
                   }
                   return out;
                 }});

    c.push_back({"hj-0n",
                 "P_{u1}(e^{q1 Q_t f})^{1/q1} <= P_{u2}(e^{q2 f})^{1/q2} B^{n/2}, t = 2(u1 q1 - u2 q2)",
                 {{"q1", 1.0}, {"q2", 0.5}, {"u1", 1.0}, {"u2", 0.5}, {"x", 0.0}},
                 [](const CheckContext& c) {
                   const auto sch = ExponentSchedule::hj_0n(c["q1"], c["q2"], c["u1"], c["u2"], 1);
                   const Grid g = c.grid(16.0, 16007);
                   CheckOptions o;
                   o.x = c["x"];
                   std::vector<InequalityReport> out;
                   for (const auto& [name, fn] : hj_corpus()) {
                     auto r = check_hj_hyper_0n(sch, sample(g, fn), o);
                     r.subject = name;
                     out.push_back(std::move(r));
                   }
                   return out;
                 }});

    c.push_back({"w2-gaussian",
                 "quantile W2^2 (half cost) against the Gaussian closed form",
                 {{"m", 1.0}, {"sigma1", 1.0}, {"sigma2", 2.0}},
                 [](const CheckContext& c) {
                   const double m = c["m"], s1 = c["sigma1"], s2 = c["sigma2"];
                   const Grid g = c.grid(std::abs(m) + 14 * std::max(s1, s2), 4097);
                   const auto pair = w2_quantile(gaussian(0, s1 * s1), gaussian(m, s2 * s2), g, {}, true);
                   const double exact = w2_gaussian_closed_form(0, s1, m, s2, 1);
                   auto r = detail::bound_report("w2-gaussian", "N(0,s1^2) vs N(m,s2^2)",
                                                 std::abs(pair.w2_squared - exact), 1e-6,
                                                 {{"m", m}, {"sigma1", s1}, {"sigma2", s2}});
                   r.extras = {{"w2_squared", pair.w2_squared}, {"closed_form", exact},
                               {"dual_value", pair.dual_value}};
                   // node-only infimum: Q_1 is overestimated by at most h^2/8
                   if (pair.dual_value > pair.w2_squared + g.spacing * g.spacing / 8) {
                     r.status = Status::fail;
                     r.notes.push_back("dual value exceeds the primal");
                   }
                   return std::vector<InequalityReport>{r};
                 }});

    c.push_back({"talagrand-local",
                 "W2^2(h P_u^x, P_u^x) <= ((1 - e^{-2 rho u})/rho) Ent_{P_u^x}(h)",
                 {{"u", 1.0}, {"rho", 0.0}, {"x", 0.0}, {"m", 0.8}},
                 [](const CheckContext& c) {
                   const auto sg = detail::semigroup_for_rho(c["rho"]);
                   const double u = c["u"], x = c["x"];
                   const double mean = sg.kernel_mean(x, u), var = sg.kernel_variance(u);
                   TransportOptions o;
                   o.x = x;
                   std::vector<InequalityReport> out;
                   for (const auto& h : {detail::kernel_shift_tilt(c["m"], mean, var),
                                         detail::kernel_quadratic_tilt(0.3, mean, var)})
                     out.push_back(check_talagrand_local(u, h, sg, o));
                   return out;
                 }});

    c.push_back({"talagrand-dimensional",
                 "W2^2(h P_{u1}^x, P_{u2}^x) <= 2 u1 (Ent(h) + (n/2) A_{u2/u1}), heat semigroup",
                 {{"u1", 0.5}, {"u2", 0.4}, {"x", 0.0}, {"m", 0.6}},
                 [](const CheckContext& c) {
                   const double u1 = c["u1"], x = c["x"];
                   TransportOptions o;
                   o.x = x;
                   std::vector<InequalityReport> out;
                   for (const auto& h : {detail::kernel_shift_tilt(c["m"], x, 2 * u1),
                                         detail::kernel_quadratic_tilt(0.3, x, 2 * u1)}) {
                     auto r = check_talagrand_dimensional(u1, c["u2"], h, 1, o);
                     const double at_u1 = 2 * u1 * r.extra("entropy") -
                                          check_talagrand_dimensional(u1, u1, h, 1, o).lhs;
                     if (r.extra("best_margin") > at_u1 + 1e-9) {
                       r.status = Status::fail;
                       r.notes.push_back("u2 sweep best margin above the u2 = u1 margin");
                     }
                     out.push_back(std::move(r));
                   }
                   return out;
                 }});

    c.push_back({"refined-talagrand",
                 "W2^2(h gamma, gamma) against Ent(h), the lambda family and the optimized bound",
                 {{"lambda", 0.5}},
                 [](const CheckContext& c) {
                   std::vector<InequalityReport> out;
                   for (const auto& h : talagrand_corpus()) {
                     RefinedTalagrandOptions o;
                     o.lambda = c["lambda"];
                     for (auto mode : {TalagrandMode::classical, TalagrandMode::lambda_family,
                                       TalagrandMode::optimized})
                       out.push_back(check_refined_talagrand(h, 1, mode, o));
                     o.nonsmooth = true;
                     out.push_back(check_refined_talagrand(h, 1, TalagrandMode::optimized, o));
                   }
                   return out;
                 }});

    c.push_back({"refined-poincare",
                 "Var(f) <= int |grad f|^2 dgamma - (int Delta f dgamma)^2/(2n)",
                 {},
                 [](const CheckContext& c) {
                   std::vector<InequalityReport> out;
                   auto fs = c.corpus();
                   fs.push_back(from_closed("x", linear(1)));
                   fs.push_back(from_closed("x^2", polynomial({0, 0, 1})));
                   for (const auto& f : fs)
                     detail::per_subject(out, c, "refined-poincare", f, [](const TestFunction& g) {
                       return check_refined_poincare(g, 1);
                     });
                   return out;
                 }});

    c.push_back({"stable-kernel",
                 "alpha-stable kernels: alpha = 2 against the heat kernel, alpha = 1 against "
                 "Cauchy, unit mass",
                 {{"t", 0.5}},
                 [](const CheckContext& c) {
                   const Grid g = c.grid(20.0, 2049);
                   const double t = c["t"];
                   const auto k2 = stable_kernel(2.0, t, g), k1 = stable_kernel(1.0, t, g);
                   const auto heat = sample(g, [t](double x) {
                     return std::exp(-x * x / (4 * t)) / std::sqrt(4 * std::numbers::pi * t);
                   });
                   const auto cauchy = sample(g, [t](double x) {
                     return t / (std::numbers::pi * (t * t + x * x));
                   });
                   const Params p{{"t", t}};
                   std::vector<InequalityReport> out;
                   out.push_back(detail::bound_report("stable-kernel", "alpha=2 vs heat",
                                                      detail::sup_on(k2, heat, g.half_width), 1e-8, p));
                   out.push_back(detail::bound_report("stable-kernel", "alpha=1 vs Cauchy",
                                                      detail::sup_on(k1, cauchy, 0.5 * g.half_width),
                                                      1e-6, p));
                   return out;
                 }});

    c.push_back({"levy-bregman",
                 "Ent_{L_t}(f) <= t L_t(int D(f(.+z), f) dnu(z)) for a unit jump and a "
                 "truncated Cauchy ladder",
                 {{"t", 0.5}},
                 [](const CheckContext& c) {
                   const Grid g = c.grid(20.0, 2049);
                   const auto f = sample(g, [](double x) { return 1 + 0.3 * std::exp(-x * x); });
                   std::vector<InequalityReport> out;
                   auto r = bregman_entropy_check(LevyEngine(compound_poisson({1.0}, {1.0}), g), f,
                                                  c["t"]);
                   r.subject = "unit jump at 1";
                   out.push_back(std::move(r));
                   for (auto& l : bregman_truncation_ladder(1.0, f, c["t"], {0.4, 0.2, 0.1})) {
                     l.subject = "truncated Cauchy";
                     out.push_back(std::move(l));
                   }
                   return out;
                 }});

    c.push_back({"levy-hyper",
                 "L_t(f^{q1})^{1/q1} <= L_s((L_{t-s} f)^{q2})^{1/q2}: fine (stable) and coarse "
                 "(unit jump, with its constant)",
                 {{"q1", 0.8}, {"s", 0.5}, {"t", 1.0}, {"alpha", 1.0}},
                 [](const CheckContext& c) {
                   const Grid g = c.grid(20.0, 2049);
                   const auto f = sample(g, [](double x) { return 1 + 0.2 * std::exp(-x * x); });
                   std::vector<InequalityReport> out;
                   auto fine = check_levy_hyper(LevyEngine(stable(c["alpha"]), g),
                                                ExponentSchedule::levy_fine(c["q1"], c["s"], c["t"]),
                                                f, LevyVariant::fine);
                   fine.subject = "stable alpha=" + std::to_string(c["alpha"]);
                   out.push_back(std::move(fine));
                   auto coarse = check_levy_hyper(
                       LevyEngine(compound_poisson({1.0}, {1.0}), g),
                       ExponentSchedule::levy_coarse(c["q1"], c["s"], c["t"]), f, LevyVariant::coarse);
                   coarse.subject = "unit jump at 1";
                   out.push_back(std::move(coarse));
                   return out;
                 }});

    c.push_back({"levy-ou",
                 "||f||_{q1} <= ||P_t f||_{q2} in L^q of the invariant stable law",
                 {{"alpha", 1.0}, {"t", 0.3}, {"q1", 0.9}},
                 [](const CheckContext& c) {
                   const Grid g = c.grid(20.0, 2049);
                   const auto f = sample(g, [](double x) { return 1 + 0.2 * std::exp(-x * x); });
                   auto r = check_levy_ou_corollary(c["alpha"], c["t"], c["q1"], f);
                   r.subject = "1+0.2exp(-x^2)";
                   return std::vector<InequalityReport>{r};
                 }});

    c.push_back({"levy-commutation",
                 "L_t T_a f = T_a L_{t e^{a alpha/2}} f",
                 {{"alpha", 1.0}, {"a", 0.4}, {"t", 0.5}},
                 [](const CheckContext& c) {
                   const Grid g = c.grid(20.0, 2049);
                   const auto res = levy_dilation_commutation(
                       c["alpha"], c["a"], c["t"], [](double x) { return std::exp(-x * x); }, g);
                   return std::vector<InequalityReport>{detail::bound_report(
                       "levy-commutation", "exp(-x^2)", res.max_deviation, 1e-8, c.values())};
                 }});

    c.push_back({"ultracontractive",
                 "fitted t-exponent of sup ||L_t f||_{q2}/||f||_{q1} against -(q2 - q1)/(alpha q1 q2)",
                 {{"alpha", 2.0}, {"q1", 2.0}, {"q2", 4.0}},
                 [](const CheckContext& c) {
                   const auto fit = ultracontractive_exponent(c["alpha"], c["q1"], c["q2"]);
                   auto r = detail::bound_report("ultracontractive", "Gaussian probes",
                                                 std::abs(fit.slope - fit.predicted), 0.02,
                                                 c.values());
                   r.extras = {{"slope", fit.slope}, {"predicted", fit.predicted},
                               {"fit_residual", fit.residual}};
                   if (fit.low_confidence) {
                     r.notes.push_back("low confidence: fit residual above 1e-2");
                     if (r.status != Status::fail) r.status = Status::warning;
                   }
                   return std::vector<InequalityReport>{r};
                 }});

    return c;
  }();
  return entries;
}

inline const CatalogEntry* find_check(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return &e;
  return nullptr;
}

struct Summary {
  std::size_t run = 0, passed = 0, failed = 0, saturated = 0, warnings = 0;
};

struct RunReport {
  std::string tool_version = HYPERLAB_VERSION;
  RunConfig config;
  std::vector<InequalityReport> reports;
  Summary summary;
  std::vector<std::pair<std::string, double>> wall_clock_ms;

  const InequalityReport* worst_failure() const {
    const InequalityReport* w = nullptr;
    for (const auto& r : reports)
      if (r.status == Status::fail && (!w || r.margin < w->margin)) w = &r;
    return w;
  }
  int exit_code() const { return summary.failed == 0 ? 0 : 1; }
};

namespace detail {

inline Params merge_params(const Params& defaults, const std::map<std::string, double>& over,
                           const Params& point = {}) {
  Params p = defaults;
  auto put = [&](const std::string& k, double v) {
    for (auto& [key, val] : p)
      if (key == k) {
        val = v;
        return;
      }
    fail(ErrorKind::invalid_argument, "unknown parameter '" + k + "'");
  };
  for (const auto& [k, v] : over) put(k, v);
  for (const auto& [k, v] : point) put(k, v);
  return p;
}

inline void apply_tolerances(InequalityReport& r, const RunConfig& cfg) {
  if (!cfg.tolerance && !cfg.saturation_tolerance) return;
  if (cfg.tolerance) r.tolerance = *cfg.tolerance;
  if (cfg.saturation_tolerance) r.saturation_tolerance = *cfg.saturation_tolerance;
  const bool forced = r.status == Status::warning;
  const bool failed_extra = r.status == Status::fail && r.margin >= -r.tolerance;
  r.finalize(forced);
  if (failed_extra) r.status = Status::fail;
}

inline std::vector<InequalityReport> run_point(const CatalogEntry& e, const RunConfig& cfg,
                                               const Params& params) {
  try {
    auto reports = e.run(CheckContext(cfg, params));
    for (auto& r : reports) apply_tolerances(r, cfg);
    return reports;
  } catch (const Error& err) {
    return {error_report(e.name, "error", params, err)};
  }
}

// Sort key: check name, then parameters in their fixed order.
inline bool report_less(const InequalityReport& a, const InequalityReport& b) {
  if (a.check != b.check) return a.check < b.check;
  const std::size_t n = std::min(a.params.size(), b.params.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.params[i].first != b.params[i].first) return a.params[i].first < b.params[i].first;
    if (a.params[i].second != b.params[i].second) return a.params[i].second < b.params[i].second;
  }
  return a.params.size() < b.params.size();
}

inline void finish(RunReport& rep) {
  std::stable_sort(rep.reports.begin(), rep.reports.end(), report_less);
  Summary s;
  for (const auto& r : rep.reports) {
    ++s.run;
    switch (r.status) {
      case Status::pass: ++s.passed; break;
      case Status::saturated: ++s.passed; ++s.saturated; break;
      case Status::fail: ++s.failed; break;
      case Status::warning: ++s.warnings; break;
    }
  }
  rep.summary = s;
}

template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Runs one catalog check ("all" runs every entry) with config parameters.
inline RunReport run_check(const std::string& name, const RunConfig& cfg) {
  std::vector<const CatalogEntry*> entries;
  if (name == "all") {
    for (const auto& e : catalog()) entries.push_back(&e);
  } else {
    const auto* e = find_check(name);
    require(e != nullptr, ErrorKind::invalid_argument, "unknown check '" + name + "'");
    entries.push_back(e);
  }
  RunReport rep;
  rep.config = cfg;
  std::vector<Params> params;
  for (const auto* e : entries) {
    std::map<std::string, double> own;
    for (const auto& [k, v] : cfg.params)
      for (const auto& d : e->defaults)
        if (d.first == k) own[k] = v;
    if (name != "all") own = cfg.params;
    params.push_back(detail::merge_params(e->defaults, own));
  }
  std::vector<std::vector<InequalityReport>> results(entries.size());
  std::vector<double> ms(entries.size());
  detail::parallel_for(entries.size(), cfg.workers, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    results[i] = detail::run_point(*entries[i], cfg, params[i]);
    ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
  });
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (auto& r : results[i]) rep.reports.push_back(std::move(r));
    rep.wall_clock_ms.push_back({entries[i]->name, ms[i]});
  }
  detail::finish(rep);
  return rep;
}

/// One report set per point of the cartesian lattice of cfg.sweep.
inline RunReport run_sweep(const std::string& name, const RunConfig& cfg) {
  const auto* e = find_check(name);
  require(e != nullptr, ErrorKind::invalid_argument, "unknown check '" + name + "'");
  require(!cfg.sweep.empty(), ErrorKind::invalid_argument, "sweep lattice is empty");
  std::vector<Params> lattice{{}};
  for (const auto& r : cfg.sweep) {
    std::vector<Params> next;
    for (const auto& p : lattice)
      for (double v : r.values()) {
        Params q = p;
        q.push_back({r.param, v});
        next.push_back(std::move(q));
      }
    lattice = std::move(next);
  }
  std::vector<Params> params;
  for (const auto& point : lattice) params.push_back(detail::merge_params(e->defaults, cfg.params, point));
  RunReport rep;
  rep.config = cfg;
  std::vector<std::vector<InequalityReport>> results(lattice.size());
  std::vector<double> ms(lattice.size());
  detail::parallel_for(lattice.size(), cfg.workers, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    results[i] = detail::run_point(*e, cfg, params[i]);
    ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
  });
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    for (auto& r : results[i]) rep.reports.push_back(std::move(r));
    std::ostringstream label;
    label << name;
    for (const auto& [k, v] : lattice[i]) label << ' ' << k << '=' << v;
    rep.wall_clock_ms.push_back({label.str(), ms[i]});
  }
  detail::finish(rep);
  return rep;
}

// ---- serialization ------------------------------------------------------------

inline nlohmann::ordered_json number(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json to_json(const Params& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : p) j[k] = number(v);
  return j;
}

inline nlohmann::ordered_json to_json(const InequalityReport& r) {
  nlohmann::ordered_json j;
  j["check"] = r.check;
  j["subject"] = r.subject;
  j["params"] = to_json(r.params);
  if (r.schedule) {
    j["schedule"] = to_json(r.schedule->parameters());
    j["schedule"]["constraint"] = to_string(r.schedule->constraint);
    j["schedule"]["residual"] = r.schedule->residual;
  } else {
    j["schedule"] = nullptr;
  }
  j["lhs"] = number(r.lhs);
  j["rhs"] = number(r.rhs);
  j["margin"] = number(r.margin);
  j["log_ratio"] = number(r.log_ratio);
  j["tolerance"] = r.tolerance;
  j["status"] = to_string(r.status);
  j["extras"] = to_json(r.extras);
  j["notes"] = r.notes;
  return j;
}

inline nlohmann::ordered_json to_json(const RunReport& rep, bool with_meta = true) {
  nlohmann::ordered_json payload;
  payload["config"] = rep.config.to_json();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rep.reports) arr.push_back(to_json(r));
  payload["reports"] = arr;
  payload["summary"] = {{"checks_run", rep.summary.run},
                        {"passed", rep.summary.passed},
                        {"failed", rep.summary.failed},
                        {"saturated", rep.summary.saturated},
                        {"warnings", rep.summary.warnings}};
  nlohmann::ordered_json j;
  if (with_meta) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    nlohmann::ordered_json wall = nlohmann::ordered_json::object();
    for (const auto& [k, v] : rep.wall_clock_ms) wall[k] = v;
    j["meta"] = {{"tool_version", rep.tool_version}, {"timestamp", ts.str()},
                 {"wall_clock_ms", wall}};
  }
  j["payload"] = payload;
  return j;
}

/// Schema line, then check, subject, the union of parameter names, lhs, rhs,
/// margin, log_ratio, status.
inline std::string to_csv(const RunReport& rep) {
  std::vector<std::string> names;
  for (const auto& r : rep.reports)
    for (const auto& [k, v] : r.params)
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  auto num = [](double v) {
    if (!std::isfinite(v)) return std::string();
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
  };
  std::ostringstream out;
  out << "# schema " << kCsvSchema << "\n";
  out << "check,subject";
  for (const auto& n : names) out << ',' << quote(n);
  out << ",lhs,rhs,margin,log_ratio,status\n";
  for (const auto& r : rep.reports) {
    out << quote(r.check) << ',' << quote(r.subject);
    for (const auto& n : names) {
      out << ',';
      for (const auto& [k, v] : r.params)
        if (k == n) {
          out << num(v);
          break;
        }
    }
    out << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.margin) << ','
        << num(r.log_ratio) << ',' << to_string(r.status) << "\n";
  }
  return out.str();
}

}  // namespace hyperlab
