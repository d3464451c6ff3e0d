#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "permuton/decay.hpp"
#include "permuton/entropy.hpp"
#include "permuton/entropy_curve.hpp"
#include "permuton/error.hpp"
#include "permuton/estimator.hpp"
#include "permuton/exact.hpp"
#include "permuton/fourier.hpp"
#include "permuton/json_io.hpp"
#include "permuton/models.hpp"
#include "permuton/profile.hpp"
#include "permuton/report.hpp"
#include "permuton/roots.hpp"
#include "permuton/tree.hpp"

namespace fs = std::filesystem;
using namespace permuton;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Globals {
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_dir = "out";
  bool plot = false;
  bool allow_biased = false;
  std::string config_path;
  std::string base = "e";
  json inline_model;  // from a config file's "model" object
};

// Collects outputs and writes the manifest last.
class Run {
 public:
  Run(std::string command, const Globals& g, json config)
      : command_(std::move(command)), g_(g), config_(std::move(config)), started_(utc_now()) {}

  void write(const std::string& name, const std::string& content) {
    write_file_atomic(fs::path(g_.out_dir) / name, content);
    outputs_.push_back(name);
  }
  void ledger(const std::string& key, double v) { ledger_[key] = v; }
  void note(const std::string& key, json v) { extra_[key] = std::move(v); }

  void finish() {
    json m;
    m["command"] = command_;
    m["code_version"] = PERMUTON_VERSION;
    m["config"] = config_;
    m["started_at"] = started_;
    m["finished_at"] = utc_now();
    m["outputs"] = outputs_;
    m["error_ledger"] = ledger_;
    for (const auto& [k, v] : extra_.items()) m[k] = v;
    write_file_atomic(fs::path(g_.out_dir) / "run_manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  const Globals& g_;
  json config_;
  std::string started_;
  std::vector<std::string> outputs_;
  json ledger_ = json::object();
  json extra_ = json::object();
};

double display(double nats, const std::string& base) {
  if (base == "e") return nats;
  if (base == "2") return nats / std::log(2.0);
  if (base == "10") return nats / std::log(10.0);
  throw ValidationError("--base must be e, 2 or 10");
}

void require_seed(const Globals& g, const std::string& what) {
  if (g.seed_opt->count() == 0) throw ValidationError(what + " is stochastic; --seed is required");
}

struct ModelArgs {
  std::string model_path;
  std::string preset;
};

json resolve_model_json(const ModelArgs& a, const Globals& g) {
  if (!a.model_path.empty()) return read_json_file(a.model_path);
  if (!a.preset.empty()) {
    if (a.preset == "lebesgue") return {{"type", "lebesgue"}};
    return {{"type", "function"}, {"preset", a.preset}};
  }
  if (!g.inline_model.is_null()) return g.inline_model;
  throw ValidationError("no model given; pass --model FILE or --preset NAME");
}

void add_model_options(CLI::App* cmd, ModelArgs& a, const std::string& suffix = "") {
  cmd->add_option("--model" + suffix, a.model_path, "Model JSON file");
  cmd->add_option("--preset" + suffix, a.preset, "Built-in model: lebesgue, identity, doubling, tent");
}

// ---- entropy-curve

struct CurveArgs {
  ModelArgs model;
  int n_max = 8;
  bool exact = false;
  std::uint64_t samples = 200000;
  std::string method = "plugin";
};

void cmd_entropy_curve(const CurveArgs& a, const Globals& g, Run& run) {
  const json mj = resolve_model_json(a.model, g);
  const PermutonModel mu = model_from_json(mj);
  run.note("model_hash", hex64(fnv1a(mj.dump())));
  if (a.n_max < 1) throw ValidationError("--n-max must be >= 1");
  EntropyCurve curve;
  if (a.exact) {
    curve = exact_entropy_curve(mu, a.n_max);
  } else {
    require_seed(g, "entropy-curve without --exact");
    Rng rng(g.seed);
    EstimateOptions opt;
    opt.threads = g.threads;
    opt.allow_biased = g.allow_biased;
    curve = estimated_entropy_curve(mu, a.n_max, a.samples, rng, entropy_method_from_string(a.method), opt);
  }
  run.write("entropy_curve.csv", curve.to_csv());
  for (const auto& r : curve.rows) {
    std::printf("n=%d H=%.10g", r.n, display(r.H, g.base));
    if (curve.estimated) {
      std::printf(" stderr=%.3g saturation=%.4g", display(r.stderr_, g.base),
                  static_cast<double>(r.distinct_patterns) / static_cast<double>(a.samples));
    }
    std::printf("\n");
  }
  if (g.plot) {
    SvgChart chart;
    chart.title = "Sampling entropy (" + model_kind(mu) + ")";
    chart.x_label = "n";
    chart.y_label = "normalized entropy (nats)";
    SvgSeries per_n{"H_n / n", {}, {}}, per_nlogn{"H_n / (n log n)", {}, {}};
    for (const auto& r : curve.rows) {
      per_n.x.push_back(r.n);
      per_n.y.push_back(r.H_per_n);
      per_nlogn.x.push_back(r.n);
      per_nlogn.y.push_back(r.H_per_nlogn);
    }
    chart.series = {per_n, per_nlogn};
    const double n0 = 1.0, n1 = a.n_max;
    chart.series.push_back({"1.0", {n0, n1}, {1.0, 1.0}, true});
    if (const auto* f = std::get_if<FunctionPermuton>(&mu)) {
      const double kse = integral_log_abs_derivative(f->f);
      chart.series.push_back({"int log|f'|", {n0, n1}, {kse, kse}, true});
    }
    run.write("entropy_curve.svg", chart.render());
  }
}

// ---- tree-experiment

struct TreeArgs {
  int d = 2;
  std::string law = "uniform";
  std::string gap_mode = "equal";
  int n_min = 2;
  int n_max = 7;
  int realizations = 200;
  std::uint64_t samples = 200000;
  std::string method = "plugin";
  double max_draws = 2e10;
};

PermutationLaw resolve_law(const TreeArgs& a) {
  if (a.law == "uniform") return PermutationLaw::uniform(a.d);
  if (a.law.rfind("dirac:", 0) == 0) {
    const Permutation pi = Permutation::parse(a.law.substr(6));
    if (pi.size() != a.d) throw ValidationError("dirac permutation length must equal --d");
    return PermutationLaw::dirac(pi);
  }
  const PermutationLaw law = law_from_json(read_json_file(a.law));
  if (law.d() != a.d) throw ValidationError("law file arity differs from --d");
  return law;
}

void cmd_tree_experiment(const TreeArgs& a, const Globals& g, Run& run) {
  require_seed(g, "tree-experiment");
  const PermutationLaw law = resolve_law(a);
  const GapMode mode = gap_mode_from_string(a.gap_mode);
  if (a.n_min < 1 || a.n_max < a.n_min) throw ValidationError("need 1 <= --n-min <= --n-max");
  const double draws = static_cast<double>(a.realizations) * static_cast<double>(a.samples) * (a.n_max - a.n_min + 1);
  if (draws > a.max_draws) {
    std::ostringstream os;
    os << "budget refused: " << draws << " pattern draws exceed --max-draws " << a.max_draws
       << "; reduce --realizations to " << static_cast<long long>(a.max_draws / (a.samples * (a.n_max - a.n_min + 1)))
       << " or --samples to " << static_cast<long long>(a.max_draws / (a.realizations * (a.n_max - a.n_min + 1)));
    throw CapExceeded(os.str());
  }
  run.note("law", to_json(law));
  EstimateOptions opt;
  opt.threads = g.threads;
  opt.allow_biased = g.allow_biased;
  const EntropyMethod method = entropy_method_from_string(a.method);

  std::vector<double> mean(a.n_max + 1, 0.0), ci(a.n_max + 1, 0.0);
  std::ostringstream table, conc;
  table << "n,mean_H,ci_radius,mean_H_per_n,ci_per_n,spread_per_n,realizations,samples\n";
  conc << "n,realization,seed,H,H_per_n\n";
  for (int n = a.n_min; n <= a.n_max; ++n) {
    Rng rng = Rng(g.seed).split(static_cast<std::uint64_t>(n));
    const MeanEntropyEstimate e = estimate_mean_entropy(law, mode, n, a.realizations, a.samples, rng, method, opt);
    mean[n] = e.mean;
    ci[n] = e.ci_radius;
    table << n << ',' << format_double(e.mean) << ',' << format_double(e.ci_radius) << ','
          << format_double(e.mean / n) << ',' << format_double(e.ci_radius / n) << ','
          << format_double(e.spread_per_n) << ',' << a.realizations << ',' << a.samples << "\n";
    for (int r = 0; r < e.realization_count; ++r) {
      conc << n << ',' << r << ',' << e.realization_seeds[r] << ',' << format_double(e.per_realization[r]) << ','
           << format_double(e.per_realization[r] / n) << "\n";
    }
    std::printf("n=%d mean H=%.6g +- %.3g  H/n=%.6g\n", n, display(e.mean, g.base), display(e.ci_radius, g.base),
                display(e.mean / n, g.base));
  }
  run.write("tree_mean_entropy.csv", table.str());
  run.write("concentration.csv", conc.str());

  if (a.n_min <= 2) {
    const RhoSequence rho = implied_rho(mean, ci, a.d, mode);
    std::ostringstream rs;
    rs << "n,rho,radius,upper_bound,within_bound\n";
    for (int n = 2; n <= a.n_max; ++n) {
      const double ub = rho_upper_bound(a.d, n);
      const bool ok = rho.value(n) >= -rho.radius_at(n) && rho.value(n) <= ub + rho.radius_at(n);
      rs << n << ',' << format_double(rho.value(n)) << ',' << format_double(rho.radius_at(n)) << ','
         << format_double(ub) << ',' << (ok ? 1 : 0) << "\n";
    }
    run.write("implied_rho.csv", rs.str());
  } else {
    std::printf("implied rho skipped: needs --n-min <= 2\n");
  }

  if (g.plot) {
    SvgChart chart;
    chart.title = "Tree permuton mean entropy, d=" + std::to_string(a.d) + ", " + to_string(mode) + " gaps";
    chart.x_label = "n";
    chart.y_label = "E H_n / n (nats)";
    SvgSeries m{"mean", {}, {}}, lo{"mean - CI", {}, {}, true}, hi{"mean + CI", {}, {}, true};
    for (int n = a.n_min; n <= a.n_max; ++n) {
      m.x.push_back(n);
      m.y.push_back(mean[n] / n);
      lo.x.push_back(n);
      lo.y.push_back((mean[n] - ci[n]) / n);
      hi.x.push_back(n);
      hi.y.push_back((mean[n] + ci[n]) / n);
    }
    chart.series = {m, lo, hi};
    run.write("tree_mean_entropy.svg", chart.render());
  }
}

// ---- decay

struct DecayArgs {
  double q = 0.5;
  int l = 1;
  int N = 65536;
  int R = 8;
  int m_min = 10;
  int m_max = 15;
  int x_points = 256;
  int tied_l_max = 64;
  int tied_n_max = 1000;
};

void cmd_decay(const DecayArgs& a, const Globals& g, Run& run) {
  const DecayTable t = binomial_decay_table({a.q, a.l}, a.N);
  {
    std::ostringstream os;
    os << "n,delta,tied_winner\n";
    for (int n = 0; n <= a.N; ++n) {
      os << n << ',' << format_double(t.delta[n]) << ',' << format_double(tied_winner_probability(t, n)) << "\n";
    }
    run.write("decay_table.csv", os.str());
  }
  run.ledger("decay_truncated_mass", t.error_ledger);

  const int tn = std::min(a.tied_n_max, a.N);
  if (tn >= 1) {
    const int lmax = std::min(a.tied_l_max, tn);
    const auto tables = binomial_decay_tables(a.q, lmax, tn);
    std::ostringstream os;
    os << "n,tied_winner_sum\n";
    double worst = 0.0;
    for (int n = 1; n <= tn; ++n) {
      double s = 0.0, c = 0.0;
      for (int l = 1; l <= std::min(lmax, n); ++l) {
        const double y = tied_winner_probability(tables[l - 1], n) - c;
        const double z = s + y;
        c = (z - s) - y;
        s = z;
      }
      worst = std::max(worst, std::abs(s - 1.0));
      os << n << ',' << format_double(s) << "\n";
    }
    run.write("tied_winner.csv", os.str());
    std::printf("tied-winner sums: max |sum - 1| = %.3g over n <= %d\n", worst, tn);
  }

  const FourierLimit L = log_periodic_limit_L({a.q, a.l}, a.R);
  run.write("fourier_limit.json", to_json(L).dump(2) + "\n");
  run.ledger("fourier_error_bar", L.error_bar());

  std::vector<int> ms;
  for (int m = a.m_min; m <= a.m_max; ++m) ms.push_back(m);
  const auto grid = uniform_x_grid(a.x_points);
  const LogPeriodicProfile p = log_periodic_profile(
      [&](std::uint64_t n) { return t.delta[n]; }, 1.0 / a.q, ms, grid, static_cast<std::uint64_t>(a.N));
  const auto to_limit = p.distances_to([&](double x) { return L.evaluate(x); });
  {
    std::ostringstream os;
    os << "m,x,value,limit\n";
    for (std::size_t i = 0; i < ms.size(); ++i) {
      for (std::size_t j = 0; j < grid.size(); ++j) {
        os << ms[i] << ',' << format_double(grid[j]) << ',' << format_double(p.values[i][j]) << ','
           << format_double(L.evaluate(grid[j])) << "\n";
      }
    }
    run.write("profile.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "m,sup_to_limit,sup_to_previous\n";
    for (std::size_t i = 0; i < ms.size(); ++i) {
      os << ms[i] << ',' << format_double(to_limit[i]) << ','
         << (i == 0 ? std::string("nan") : format_double(p.sup_distances[i - 1])) << "\n";
    }
    run.write("profile_distances.csv", os.str());
  }
  std::printf("delta_%d(2) = %.17g, c_0 = %.17g, oscillation amplitude = %.3g\n", a.l,
              a.N >= 2 ? t.delta[2] : 0.0, L.coefficient(0).real(), L.oscillation_amplitude());

  if (g.plot) {
    SvgChart chart;
    chart.title = "Binomial decay, l=" + std::to_string(a.l);
    chart.x_label = "x";
    chart.y_label = "delta_l(floor(eta^(x+m)))";
    for (std::size_t i = 0; i < ms.size(); ++i) chart.series.push_back({"m=" + std::to_string(ms[i]), grid, p.values[i]});
    SvgSeries lim{"L(x)", grid, {}, true};
    for (double x : grid) lim.y.push_back(L.evaluate(x));
    chart.series.push_back(lim);
    run.write("decay_profile.svg", chart.render());
  }
}

// ---- roots

struct RootsArgs {
  int d_min = 2;
  int d_max = 8;
  int l = 1;
  int n_max = 100;
};

void cmd_roots(const RootsArgs& a, const Globals&, Run& run) {
  if (a.d_min < 2 || a.d_max < a.d_min) throw ValidationError("need 2 <= --d-min <= --d-max");
  json results = json::array();
  std::ostringstream csv;
  csv << "d,index,root_re,root_im,exponent_re,exponent_im,residual\n";
  double worst = 0.0;
  for (int d = a.d_min; d <= a.d_max; ++d) {
    const FallingFactorialRoots r = falling_factorial_roots(d);
    json entry = to_json(r);
    json residuals = json::array();
    for (std::size_t i = 0; i < r.roots.size(); ++i) {
      const double res = hypergeometric_solution_check(d, a.l, r.exponents[i], a.n_max);
      worst = std::max(worst, res);
      residuals.push_back(res);
      csv << d << ',' << i << ',' << format_double(r.roots[i].real()) << ',' << format_double(r.roots[i].imag())
          << ',' << format_double(r.exponents[i].real()) << ',' << format_double(r.exponents[i].imag()) << ','
          << format_double(res) << "\n";
    }
    entry["residuals"] = residuals;
    results.push_back(entry);
  }
  run.write("roots.json", json{{"l", a.l}, {"n_max", a.n_max}, {"results", results}}.dump(2) + "\n");
  run.write("roots.csv", csv.str());
  run.ledger("max_hypergeometric_residual", worst);
  std::printf("roots for d=%d..%d, max residual %.3g\n", a.d_min, a.d_max, worst);
}

// ---- sample

struct SampleArgs {
  ModelArgs model;
  int n = 4;
  std::uint64_t count = 1000;
};

void cmd_sample(const SampleArgs& a, const Globals& g, Run& run) {
  require_seed(g, "sample");
  const json mj = resolve_model_json(a.model, g);
  const PermutonModel mu = model_from_json(mj);
  run.note("model_hash", hex64(fnv1a(mj.dump())));
  if (a.n < 1 || a.n > kMaxDistributionLength) throw ValidationError("--n must be in 1..12");
  Rng rng(g.seed);
  PatternSampler sampler(mu);
  std::map<std::uint64_t, std::uint64_t> counts;
  std::ostringstream os;
  os << "index,pattern\n";
  for (std::uint64_t i = 0; i < a.count; ++i) {
    const auto s = sampler.draw(a.n, rng);
    const Permutation pi(std::vector<int>(s.begin(), s.end()));
    os << i << ',' << csv_field(pi.to_string()) << "\n";
    ++counts[pi.rank()];
  }
  run.write("samples.csv", os.str());
  std::optional<PatternDistribution> exact;
  try {
    exact = exact_distribution(mu, a.n);
  } catch (const Error&) {
  }
  std::ostringstream fs_;
  fs_ << "pattern,count,frequency" << (exact ? ",exact" : "") << "\n";
  double tv = 0.0;
  for (std::uint64_t r = 0; r < factorial_u64(a.n); ++r) {
    const auto it = counts.find(r);
    const std::uint64_t c = it == counts.end() ? 0 : it->second;
    const double p = exact ? exact->probability_of_rank(r) : 0.0;
    if (c == 0 && p == 0.0) continue;
    const double freq = static_cast<double>(c) / static_cast<double>(a.count);
    tv += std::abs(freq - p);
    fs_ << csv_field(Permutation::from_rank(a.n, r).to_string()) << ',' << c << ',' << format_double(freq);
    if (exact) fs_ << ',' << format_double(p);
    fs_ << "\n";
  }
  run.write("pattern_frequencies.csv", fs_.str());
  std::printf("%llu samples of size %d, %zu distinct", static_cast<unsigned long long>(a.count), a.n, counts.size());
  if (exact) std::printf(", total variation to exact %.4g", tv / 2);
  std::printf("\n");
}

// ---- box-distance

struct BoxArgs {
  ModelArgs first, second;
  int grid = 64;
};

void cmd_box_distance(const BoxArgs& a, const Globals& g, Run& run) {
  const PermutonModel mu1 = model_from_json(resolve_model_json(a.first, g));
  if (a.second.model_path.empty() && a.second.preset.empty()) throw ValidationError("pass --model2 or --preset2");
  const PermutonModel mu2 = model_from_json(resolve_model_json(a.second, g));
  const double dist = box_distance(mu1, mu2, a.grid);
  run.write("box_distance.json", json{{"grid", a.grid}, {"distance", dist}}.dump(2) + "\n");
  std::printf("box distance on %dx%d grid: %.10g\n", a.grid, a.grid, dist);
}

// ---- class-check

struct ClassArgs {
  int d = 2;
  std::string generators;
  std::string pattern;
  int n_max = 4;
};

void cmd_class_check(const ClassArgs& a, const Globals&, Run& run) {
  std::vector<Permutation> gens;
  if (!a.generators.empty()) {
    std::stringstream ss(a.generators);
    std::string tok;
    while (std::getline(ss, tok, ' ')) {
      if (!tok.empty()) gens.push_back(Permutation::parse(tok));
    }
  } else {
    gens = PermutationLaw::uniform(a.d).support();
  }
  if (gens.empty()) throw ValidationError("no generators");
  const Permutation forbidden = forbidden_pattern(gens.front().size());
  std::vector<Permutation> targets;
  if (!a.pattern.empty()) {
    targets.push_back(Permutation::parse(a.pattern));
  } else {
    if (a.n_max < 1 || a.n_max > 8) throw CapExceeded("class-check enumeration: --n-max above cap 8");
    for (int n = 1; n <= a.n_max; ++n) {
      for (std::uint64_t r = 0; r < factorial_u64(n); ++r) targets.push_back(Permutation::from_rank(n, r));
    }
  }
  std::ostringstream os;
  os << "pattern,member,contains_forbidden\n";
  std::size_t members = 0;
  for (const auto& s : targets) {
    const bool m = class_membership(s, gens);
    members += m;
    os << csv_field(s.to_string()) << ',' << (m ? 1 : 0) << ',' << (contains_pattern(s, forbidden) ? 1 : 0) << "\n";
  }
  run.write("class_check.csv", os.str());
  run.note("forbidden_pattern", forbidden.to_string());
  std::printf("%zu of %zu patterns in the class\n", members, targets.size());
}

// Expands a JSON config into argument tokens placed before the user's own,
// so later (user) values win.
std::vector<std::string> config_tokens(const json& cfg, Globals& g) {
  std::vector<std::string> out;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    if (key == "model" && value.is_object()) {
      g.inline_model = value;
      continue;
    }
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_string()) {
      out.push_back(flag);
      out.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      out.push_back(flag);
      out.push_back(value.dump());
    } else if (value.is_number()) {
      out.push_back(flag);
      out.push_back(format_double(value.get<double>()));
    } else {
      throw ValidationError("config key '" + key + "' must be a scalar");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  Globals g;
  json config_echo = json::object();

  try {
    // --config is resolved before parsing so its values can be overridden.
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        g.config_path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        g.config_path = args[i].substr(9);
      }
    }
    std::vector<std::string> tokens;
    if (!g.config_path.empty()) {
      const json cfg = read_json_file(g.config_path);
      if (!cfg.is_object()) throw ValidationError("config must be a JSON object");
      config_echo = cfg;
      const bool has_command = !args.empty() && args[0].rfind("-", 0) != 0;
      if (has_command) {
        tokens.push_back(args[0]);
      } else if (cfg.contains("command")) {
        tokens.push_back(cfg["command"].get<std::string>());
      }
      for (auto& t : config_tokens(cfg, g)) tokens.push_back(std::move(t));
      tokens.insert(tokens.end(), args.begin() + (has_command ? 1 : 0), args.end());
    } else {
      tokens = args;
    }

    CLI::App app{"Permuton sampling entropy experiments"};
    app.set_version_flag("--version", PERMUTON_VERSION);
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    g.seed_opt = app.add_option("--seed", g.seed, "Seed for every stochastic command");
    app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "Output directory");
    app.add_flag("--plot", g.plot, "Also write SVG charts");
    app.add_flag("--allow-biased", g.allow_biased, "Allow plug-in estimates above n = 7");
    app.add_option("--config", g.config_path, "JSON config; flags override its values");
    app.add_option("--base", g.base, "Display base for printed entropies (e, 2, 10); files stay in nats")
        ->check(CLI::IsMember({"e", "2", "10"}));

    CurveArgs curve;
    auto* c1 = app.add_subcommand("entropy-curve", "Sampling entropy curve H_n");
    add_model_options(c1, curve.model);
    c1->add_option("--n-max", curve.n_max);
    c1->add_flag("--exact", curve.exact, "Exact enumeration instead of sampling");
    c1->add_option("--samples", curve.samples);
    c1->add_option("--method", curve.method)->check(CLI::IsMember({"plugin", "miller_madow"}));

    TreeArgs tree;
    auto* c2 = app.add_subcommand("tree-experiment", "Mean entropy of random tree permutons");
    c2->add_option("--d", tree.d);
    c2->add_option("--law", tree.law, "uniform, dirac:<perm> or a law JSON file");
    c2->add_option("--gap-mode", tree.gap_mode)->check(CLI::IsMember({"equal", "uniform"}));
    c2->add_option("--n-min", tree.n_min);
    c2->add_option("--n-max", tree.n_max);
    c2->add_option("--realizations", tree.realizations);
    c2->add_option("--samples", tree.samples);
    c2->add_option("--method", tree.method)->check(CLI::IsMember({"plugin", "miller_madow"}));
    c2->add_option("--max-draws", tree.max_draws, "Refuse runs needing more pattern draws");

    DecayArgs decay;
    auto* c3 = app.add_subcommand("decay", "Binomial decay tables, profiles and Fourier limit");
    c3->add_option("--q", decay.q);
    c3->add_option("--l", decay.l);
    c3->add_option("--N", decay.N);
    c3->add_option("--R", decay.R);
    c3->add_option("--m-min", decay.m_min);
    c3->add_option("--m-max", decay.m_max);
    c3->add_option("--x-points", decay.x_points);
    c3->add_option("--tied-l-max", decay.tied_l_max);
    c3->add_option("--tied-n-max", decay.tied_n_max);

    RootsArgs roots;
    auto* c4 = app.add_subcommand("roots", "Falling-factorial roots and hypergeometric residuals");
    c4->add_option("--d-min", roots.d_min);
    c4->add_option("--d-max", roots.d_max);
    c4->add_option("--l", roots.l);
    c4->add_option("--n-max", roots.n_max);

    SampleArgs sample;
    auto* c5 = app.add_subcommand("sample", "Draw pattern samples from a model");
    add_model_options(c5, sample.model);
    c5->add_option("--n", sample.n);
    c5->add_option("--count", sample.count);

    BoxArgs box;
    auto* c6 = app.add_subcommand("box-distance", "Grid box distance between two models");
    add_model_options(c6, box.first);
    add_model_options(c6, box.second, "2");
    c6->add_option("--grid", box.grid);

    ClassArgs cls;
    auto* c7 = app.add_subcommand("class-check", "Membership in the class generated by permutations");
    c7->add_option("--d", cls.d, "Use all of Sym(d) as generators");
    c7->add_option("--generators", cls.generators, "Space-separated generator permutations");
    c7->add_option("--pattern", cls.pattern);
    c7->add_option("--n-max", cls.n_max);

    std::vector<std::string> rev(tokens.rbegin(), tokens.rend());
    try {
      app.parse(rev);
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : 2;
    }

    auto* sub = app.get_subcommands().front();
    // Echo of the effective configuration, flags included.
    json echo = config_echo;
    for (const auto* opt : sub->get_options()) {
      if (opt->get_name() == "--help") continue;
      if (opt->count() > 0 || opt->get_default_str() != "") {
        std::string key = opt->get_name().substr(2);
        std::replace(key.begin(), key.end(), '-', '_');
        echo[key] = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
      }
    }
    if (g.seed_opt->count()) echo["seed"] = g.seed;
    echo["threads"] = g.threads;
    echo["allow_biased"] = g.allow_biased;

    Run run(sub->get_name(), g, echo);
    if (g.seed_opt->count()) run.note("seed", g.seed);
    const std::string name = sub->get_name();
    if (name == "entropy-curve") cmd_entropy_curve(curve, g, run);
    else if (name == "tree-experiment") cmd_tree_experiment(tree, g, run);
    else if (name == "decay") cmd_decay(decay, g, run);
    else if (name == "roots") cmd_roots(roots, g, run);
    else if (name == "sample") cmd_sample(sample, g, run);
    else if (name == "box-distance") cmd_box_distance(box, g, run);
    else if (name == "class-check") cmd_class_check(cls, g, run);
    run.finish();
    return 0;
  } catch (const NumericalError& e) {
    std::cerr << "numerical assertion failed: " << e.what() << "\n";
    return 3;
  } catch (const CollisionError& e) {
    std::cerr << "sampling failed: " << e.what() << "\n";
    return 3;
  } catch (const CapExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
