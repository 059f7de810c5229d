#include "dmgt/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "dmgt/errors.hpp"
#include "dmgt/parallel.hpp"

namespace dmgt {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join_key(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Strict reader: every key must be consumed before finish().
class ObjReader {
 public:
  ObjReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError((path_.empty() ? "config" : path_) + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string key(const std::string& k) const { return join_key(path_, k); }

  double number(const std::string& k, double def) {
    if (!has(k)) return def;
    const Json& v = raw(k);
    if (!v.is_number()) throw ValidationError(key(k) + ": expected a number");
    return v.get<double>();
  }
  int integer(const std::string& k, int def) {
    if (!has(k)) return def;
    const Json& v = raw(k);
    if (!v.is_number_integer()) throw ValidationError(key(k) + ": expected an integer");
    return v.get<int>();
  }
  std::string string(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    const Json& v = raw(k);
    if (!v.is_string()) throw ValidationError(key(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& k, const std::vector<double>& def) {
    if (!has(k)) return def;
    const Json& v = raw(k);
    if (!v.is_array()) throw ValidationError(key(k) + ": expected a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw ValidationError(key(k) + ": expected a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError(key(it.key()) + ": unknown key");
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void set_problem_defaults(ProblemSpec& p) {
  if (p.type == "quadratic") {
    p.d = 10, p.n = 0, p.m = 8;
  } else if (p.type == "phase_retrieval") {
    p.d = 10, p.n = 100, p.m = 8, p.noise_sd = std::sqrt(0.1);
  } else if (p.type == "poisson") {
    p.d = 200, p.n = 50, p.m = 8;
  } else if (p.type == "entropic_regression") {
    p.d = 20, p.n = 40, p.m = 8;
  } else if (p.type == "tv_deblur") {
    p.tv = TvOptions{};
    p.m = p.tv.m;
    p.d = p.tv.d_img * p.tv.d_img;
    p.n = 0;
  } else {
    throw ValidationError("problem.kind: unknown problem type '" + p.type + "'");
  }
}

ProblemSpec parse_problem(const Json& j) {
  ObjReader r(j, "problem");
  ProblemSpec p;
  p.type = r.string("kind", "quadratic");
  if (r.has("L")) p.L = r.number("L", 0.0);
  set_problem_defaults(p);
  p.m = r.integer("m", p.m);
  if (p.type == "tv_deblur") {
    p.tv.d_img = r.integer("d_img", p.tv.d_img);
    p.tv.blur_len = r.integer("blur_len", p.tv.blur_len);
    p.tv.alpha = r.number("alpha", p.tv.alpha);
    p.tv.lambda_tv = r.number("lambda_tv", p.tv.lambda_tv);
    p.tv.eps_tv = r.number("eps_tv", p.tv.eps_tv);
    p.tv.m = p.m;
    p.d = p.tv.d_img * p.tv.d_img;
  } else {
    p.d = r.integer("d", p.d);
    if (p.type != "quadratic") p.n = r.integer("n", p.n);
    if (p.type == "phase_retrieval") p.noise_sd = r.number("noise_sd", p.noise_sd);
  }
  r.finish();
  return p;
}

Json problem_to_json(const ProblemSpec& p) {
  Json j{{"kind", p.type}, {"m", p.m}};
  if (p.L) j["L"] = *p.L;
  if (p.type == "tv_deblur") {
    j["d_img"] = p.tv.d_img;
    j["blur_len"] = p.tv.blur_len;
    j["alpha"] = p.tv.alpha;
    j["lambda_tv"] = p.tv.lambda_tv;
    j["eps_tv"] = p.tv.eps_tv;
  } else {
    j["d"] = p.d;
    if (p.type != "quadratic") j["n"] = p.n;
    if (p.type == "phase_retrieval") j["noise_sd"] = p.noise_sd;
  }
  return j;
}

InitSpec parse_init(const Json& j, const std::string& path) {
  ObjReader r(j, path);
  InitSpec s;
  s.type = r.string("kind", s.type);
  s.scale = r.number("scale", s.scale);
  r.finish();
  static const std::set<std::string> kinds{"center", "ones", "gaussian_positive", "truth_perturbed"};
  if (!kinds.count(s.type)) throw ValidationError(r.key("kind") + ": unknown initialization '" + s.type + "'");
  if (!(s.scale > 0) || !std::isfinite(s.scale)) throw ValidationError(r.key("scale") + ": must be positive");
  return s;
}

Json init_to_json(const InitSpec& s) { return Json{{"kind", s.type}, {"scale", s.scale}}; }

AlgorithmSpec parse_algorithm(const Json& j, const std::string& path) {
  ObjReader r(j, path);
  AlgorithmSpec a;
  if (!r.has("kind")) throw ValidationError(r.key("kind") + ": required");
  std::string name = r.string("kind", "");
  try {
    a.kind = algorithm_from_string(name);
  } catch (const ValidationError&) {
    throw ValidationError(r.key("kind") + ": unknown algorithm '" + name + "'");
  }
  a.label = r.string("label", name);
  if (r.has("eta")) a.eta = r.number("eta", 0.0);
  if (r.has("delta")) a.delta = r.number("delta", 0.0);
  std::string step = r.string("step", "tuned");
  if (step == "theorem")
    a.theorem_step = true;
  else if (step != "tuned")
    throw ValidationError(r.key("step") + ": expected 'tuned' or 'theorem'");
  std::string y0 = r.string("y0", "grad");
  if (y0 == "zero")
    a.y0 = Y0Init::Zero;
  else if (y0 != "grad")
    throw ValidationError(r.key("y0") + ": expected 'grad' or 'zero'");
  if (r.has("init")) a.init = parse_init(r.raw("init"), r.key("init"));
  if (r.has("dda_shift")) a.dda_shift = r.number("dda_shift", 0.0);
  r.finish();

  static const std::regex label_re("[a-z0-9_]+");
  if (!std::regex_match(a.label, label_re))
    throw ValidationError(r.key("label") + ": labels use lowercase letters, digits and underscores");
  if (a.eta && !(*a.eta > 0 && std::isfinite(*a.eta))) throw ValidationError(r.key("eta") + ": must be positive");
  if (a.delta) {
    if (a.kind != AlgorithmKind::DMGT) throw ValidationError(r.key("delta") + ": only dmgt uses a clipping radius");
    if (!(*a.delta > 0 && std::isfinite(*a.delta))) throw ValidationError(r.key("delta") + ": must be positive");
  }
  if (a.theorem_step) {
    if (a.kind != AlgorithmKind::DMGT) throw ValidationError(r.key("step") + ": theorem parameters apply to dmgt only");
    if (a.eta || a.delta) throw ValidationError(r.key("step") + ": theorem step excludes explicit eta/delta");
  }
  if (a.dda_shift && a.kind != AlgorithmKind::DDA) throw ValidationError(r.key("dda_shift") + ": only dda uses a shift");
  return a;
}

Json algorithm_to_json(const AlgorithmSpec& a) {
  Json j{{"kind", to_string(a.kind)}, {"label", a.label}};
  if (a.eta) j["eta"] = *a.eta;
  if (a.delta) j["delta"] = *a.delta;
  j["step"] = a.theorem_step ? "theorem" : "tuned";
  j["y0"] = a.y0 == Y0Init::Zero ? "zero" : "grad";
  if (a.init) j["init"] = init_to_json(*a.init);
  if (a.dda_shift) j["dda_shift"] = *a.dda_shift;
  return j;
}

std::vector<AlgorithmSpec> default_algorithms() {
  std::vector<AlgorithmSpec> out;
  for (auto k : {AlgorithmKind::DMGT, AlgorithmKind::DMD, AlgorithmKind::DGT, AlgorithmKind::DDA}) {
    AlgorithmSpec a;
    a.kind = k;
    a.label = to_string(k);
    out.push_back(a);
  }
  return out;
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::vector<double> log_grid(int lo_exp, int hi_exp) {
  std::vector<double> g;
  for (int e = lo_exp; e <= hi_exp; ++e) g.push_back(std::stod("1e" + std::to_string(e)));
  return g;
}

ExperimentConfig parse_config_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    auto [line, col] = line_col(text, e.byte);
    std::string msg = e.what();
    throw ParseError("malformed config: " + msg, line, col);
  }
  ObjReader r(j, "");
  ExperimentConfig c;
  if (r.has("problem")) c.problem = parse_problem(r.raw("problem"));
  else set_problem_defaults(c.problem);
  if (r.has("kernel")) {
    c.kernel = r.raw("kernel");
    if (!c.kernel.is_object()) throw ValidationError("kernel: expected an object");
  }
  if (r.has("graph")) {
    ObjReader g(r.raw("graph"), "graph");
    c.graph.type = g.string("kind", c.graph.type);
    if (c.graph.type == "erdos_renyi") c.graph.p = g.number("p", c.graph.p);
    g.finish();
  }
  if (r.has("init")) c.init = parse_init(r.raw("init"), "init");
  if (r.has("algorithms")) {
    const Json& a = r.raw("algorithms");
    if (!a.is_array()) throw ValidationError("algorithms: expected a list");
    for (std::size_t i = 0; i < a.size(); ++i)
      c.algorithms.push_back(parse_algorithm(a[i], "algorithms[" + std::to_string(i) + "]"));
  } else {
    c.algorithms = default_algorithms();
  }
  c.tuning.eta_grid = log_grid(-4, 4);
  c.tuning.delta_grid = log_grid(-4, 4);
  if (r.has("tuning")) {
    ObjReader t(r.raw("tuning"), "tuning");
    c.tuning.eta_grid = t.numbers("eta_grid", c.tuning.eta_grid);
    c.tuning.delta_grid = t.numbers("delta_grid", c.tuning.delta_grid);
    c.tuning.select_by = t.string("select_by", c.tuning.select_by);
    t.finish();
  }
  if (r.has("seeds")) {
    const Json& s = r.raw("seeds");
    if (!s.is_array()) throw ValidationError("seeds: expected a list of nonnegative integers");
    c.seeds.clear();
    for (const auto& e : s) {
      if (!e.is_number_unsigned()) throw ValidationError("seeds: expected a list of nonnegative integers");
      c.seeds.push_back(e.get<std::uint64_t>());
    }
  }
  c.max_iter = r.integer("max_iter", c.max_iter);
  c.record_stride = r.integer("record_stride", c.record_stride);
  c.output = r.string("output", c.output);
  r.finish();
  validate_config(c);
  return c;
}

ExperimentConfig parse_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["problem"] = problem_to_json(c.problem);
  j["kernel"] = c.kernel;
  Json g{{"kind", c.graph.type}};
  if (c.graph.type == "erdos_renyi") g["p"] = c.graph.p;
  j["graph"] = g;
  j["init"] = init_to_json(c.init);
  Json algs = Json::array();
  for (const auto& a : c.algorithms) algs.push_back(algorithm_to_json(a));
  j["algorithms"] = algs;
  j["tuning"] = Json{{"eta_grid", c.tuning.eta_grid},
                     {"delta_grid", c.tuning.delta_grid},
                     {"select_by", c.tuning.select_by}};
  j["seeds"] = c.seeds;
  j["max_iter"] = c.max_iter;
  j["record_stride"] = c.record_stride;
  j["output"] = c.output;
  return j;
}

std::string serialize_config(const ExperimentConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

void validate_config(const ExperimentConfig& c) {
  const auto& p = c.problem;
  if (p.m < 1) throw ValidationError("problem.m: must be positive");
  if (p.L && !(*p.L > 0 && std::isfinite(*p.L))) throw ValidationError("problem.L: must be positive");
  if (p.type == "tv_deblur") {
    if (p.tv.d_img < 4) throw ValidationError("problem.d_img: must be at least 4");
    if (p.tv.blur_len < 1) throw ValidationError("problem.blur_len: must be positive");
    if (!(p.tv.alpha > 0)) throw ValidationError("problem.alpha: must be positive");
    if (!(p.tv.lambda_tv >= 0)) throw ValidationError("problem.lambda_tv: must be nonnegative");
    if (!(p.tv.eps_tv > 0)) throw ValidationError("problem.eps_tv: must be positive");
  } else {
    if (p.d < 1) throw ValidationError("problem.d: must be positive");
    if (p.type != "quadratic" && p.n < 1) throw ValidationError("problem.n: must be positive");
    if (p.type == "phase_retrieval" && !(p.noise_sd >= 0)) throw ValidationError("problem.noise_sd: must be nonnegative");
  }
  static const std::set<std::string> graphs{"erdos_renyi", "complete", "ring", "path"};
  if (!graphs.count(c.graph.type)) throw ValidationError("graph.kind: unknown graph '" + c.graph.type + "'");
  if (c.graph.type == "erdos_renyi" && !(c.graph.p > 0 && c.graph.p <= 1))
    throw ValidationError("graph.p: must lie in (0, 1]");
  if (c.algorithms.empty()) throw ValidationError("algorithms: must be nonempty");
  std::set<std::string> labels;
  for (std::size_t i = 0; i < c.algorithms.size(); ++i)
    if (!labels.insert(c.algorithms[i].label).second)
      throw ValidationError("algorithms[" + std::to_string(i) + "].label: duplicate label '" + c.algorithms[i].label + "'");
  if (c.tuning.eta_grid.empty()) throw ValidationError("tuning.eta_grid");
  if (c.tuning.delta_grid.empty()) throw ValidationError("tuning.delta_grid");
  for (double v : c.tuning.eta_grid)
    if (!(v > 0 && std::isfinite(v))) throw ValidationError("tuning.eta_grid: entries must be positive");
  for (double v : c.tuning.delta_grid)
    if (!(v > 0 && std::isfinite(v))) throw ValidationError("tuning.delta_grid: entries must be positive");
  static const std::set<std::string> metrics{"stationarity", "f_bar", "consensus_primal", "consensus_dual", "G_proxy"};
  if (!metrics.count(c.tuning.select_by))
    throw ValidationError("tuning.select_by: unknown metric '" + c.tuning.select_by + "'");
  if (c.seeds.empty()) throw ValidationError("seeds: must be nonempty");
  if (c.max_iter < 1) throw ValidationError("max_iter: must be positive");
  if (c.record_stride < 1) throw ValidationError("record_stride: must be positive");
  if (c.output.empty()) throw ValidationError("output: must be nonempty");

  Problem prob = problem_from_spec(c.problem, c.seeds.front());
  Kernel k = kernel_from_spec(c.kernel, prob);
  const Domain& kd = k.domain();
  const Domain& pd = prob.feasible;
  if (kd.is_interval() && pd.is_interval()) {
    bool inside = (kd.lower().array() >= pd.lower().array()).all() && (kd.upper().array() <= pd.upper().array()).all();
    if (!inside)
      throw ValidationError("kernel: domain " + kd.describe() + " is not contained in the feasible set " + pd.describe());
  }
}

Problem problem_from_spec(const ProblemSpec& s, std::uint64_t seed) {
  if (s.type == "quadratic") return quadratic_consensus(s.d, s.m, seed);
  if (s.type == "phase_retrieval") return phase_retrieval(s.d, s.n, s.m, s.noise_sd, seed);
  if (s.type == "poisson") return poisson_inverse(s.d, s.n, s.m, seed);
  if (s.type == "entropic_regression") return entropic_regression(s.d, s.n, s.m, seed);
  if (s.type == "tv_deblur") {
    TvOptions o = s.tv;
    o.m = s.m;
    o.seed = seed;
    return tv_deblur(o);
  }
  throw ValidationError("problem.kind: unknown problem type '" + s.type + "'");
}

namespace {

Kernel kernel_from_json(const Json& spec, const Problem& prob, const std::string& path) {
  ObjReader r(spec, path);
  if (!r.has("kind")) throw ValidationError(r.key("kind") + ": required");
  const std::string type = r.string("kind", "");
  const int d = prob.d;
  auto done = [&](Kernel k) {
    r.finish();
    return k;
  };
  if (type == "paired") {
    if (!prob.paired_kernel) throw ValidationError(r.key("kind") + ": problem has no paired kernel");
    return done(*prob.paired_kernel);
  }
  if (type == "euclidean") return done(euclidean(d));
  if (type == "boltzmann_shannon") return done(boltzmann_shannon(d));
  if (type == "quartic") return done(power(d, 1.0, 2.0));
  if (type == "norm_exponential") return done(norm_exponential(d));
  if (type == "hellinger") return done(hellinger(d));
  if (type == "fermi_dirac") return done(fermi_dirac(d));
  if (type == "shifted") {
    if (!r.has("base")) throw ValidationError(r.key("base") + ": required");
    Kernel base = kernel_from_json(r.raw("base"), prob, r.key("base"));
    Vec off = Vec::Zero(d);
    if (r.has("shift")) {
      const Json& o = r.raw("shift");
      if (o.is_number()) {
        off.setConstant(o.get<double>());
      } else if (o.is_array() && static_cast<int>(o.size()) == d) {
        for (int i = 0; i < d; ++i) {
          if (!o[i].is_number()) throw ValidationError(r.key("shift") + ": expected numbers");
          off(i) = o[i].get<double>();
        }
      } else {
        throw ValidationError(r.key("shift") + ": expected a number or a list of length " + std::to_string(d));
      }
    }
    return done(shifted(base, off));
  }
  const double mu = r.number("mu", 1.0);
  if (!(mu > 0)) throw ValidationError(r.key("mu") + ": must be positive");
  if (type == "lipschitz_hessian") return done(lipschitz_hessian(d, mu, r.number("rho", 1.0)));
  if (type == "power") return done(power(d, mu, r.number("r", 2.0)));
  if (type == "tsallis") return done(tsallis(d, mu, r.number("q", 0.5)));
  if (type == "burg") return done(burg(d, mu));
  if (type == "exponential") return done(exponential(d, mu));
  if (type == "harmonic") return done(harmonic(d, mu, r.number("p", 1.0)));
  if (type == "self_concordant") return done(self_concordant(d, mu, r.number("M", 1.0)));
  throw ValidationError(r.key("kind") + ": unknown kernel '" + type + "'");
}

}  // namespace

Kernel kernel_from_spec(const Json& spec, const Problem& prob) {
  try {
    return kernel_from_json(spec, prob, "kernel");
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("kernel: ") + e.what());
  }
}

Graph graph_from_spec(const GraphSpec& s, int m, std::uint64_t seed) {
  if (s.type == "erdos_renyi") return erdos_renyi(m, s.p, seed);
  if (s.type == "complete") return complete_graph(m);
  if (s.type == "ring") return ring_graph(m);
  if (s.type == "path") return path_graph(m);
  throw ValidationError("graph.kind: unknown graph '" + s.type + "'");
}

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  Problem prob = problem_from_spec(cfg.problem, seed);
  Kernel k = kernel_from_spec(cfg.kernel, prob);
  MixingMatrix W = metropolis_weights(graph_from_spec(cfg.graph, prob.m, seed));
  Instance inst{seed, std::move(prob), std::move(k), std::move(W)};
  if (cfg.problem.L) {
    inst.L = inst.L_raw = *cfg.problem.L;
  } else if (cfg.kernel.value("kind", "") == "paired" && inst.prob.L_analytic) {
    inst.L = inst.L_raw = *inst.prob.L_analytic;
  } else {
    auto est = estimate_rel_smoothness(inst.prob, inst.kernel, 20, seed);
    inst.L = est.working;
    inst.L_raw = est.raw;
    inst.L_estimated = true;
  }
  return inst;
}

Vec initial_point(const InitSpec& init, const Instance& inst) {
  const int d = inst.prob.d;
  Vec x;
  if (init.type == "center") {
    x = inst.kernel.domain().center();
  } else if (init.type == "ones") {
    x = Vec::Ones(d);
  } else if (init.type == "gaussian_positive") {
    auto rng = make_rng({inst.seed, 907});
    std::normal_distribution<double> nd(0.0, 1.0);
    x.resize(d);
    for (int i = 0; i < d; ++i) x(i) = init.scale * std::abs(nd(rng));
  } else if (init.type == "truth_perturbed") {
    if (inst.prob.x_true.size() != d) throw ValidationError("init.kind: problem has no ground truth");
    auto rng = make_rng({inst.seed, 911});
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    x = inst.prob.x_true;
    for (int i = 0; i < d; ++i) x(i) += init.scale * ud(rng);
  } else {
    throw ValidationError("init.kind: unknown initialization '" + init.type + "'");
  }
  return x;
}

ResolvedParams resolve_params(const AlgorithmSpec& a, const Instance& inst, double eta, double delta) {
  if (a.theorem_step) {
    auto tp = theorem_parameters(inst.kernel, inst.prob.m, inst.W.rho, inst.L);
    return {tp.eta, tp.delta};
  }
  return {eta, a.kind == AlgorithmKind::DMGT ? delta : kInf};
}

namespace {

RunOutcome execute(const ExperimentConfig& cfg, const AlgorithmSpec& a, const Instance& inst, double eta,
                   double delta, int stride) {
  RunOutcome o;
  o.label = a.label;
  o.seed = inst.seed;
  o.run_id = a.label + "_s" + std::to_string(inst.seed);
  o.kind = a.kind;
  auto p = resolve_params(a, inst, eta, delta);
  o.eta = p.eta;
  o.delta = p.delta;
  AlgoConfig c;
  c.algorithm = a.kind;
  c.eta = p.eta;
  c.delta = p.delta;
  c.max_iter = cfg.max_iter;
  c.y0 = a.y0;
  if (a.dda_shift) c.dda_shift = *a.dda_shift;
  Vec x0 = initial_point(a.init.value_or(cfg.init), inst);
  Recorder rec(inst.prob, inst.L, inst.W.rho, stride);
  o.summary = run(inst.prob, inst.kernel, inst.W, c, x0, &rec);
  o.lambda = rec.params().lambda;
  o.records = std::move(rec.records());
  o.stagnated = !o.summary.diverged && stagnated(o.records);
  o.kernel_id = a.kind == AlgorithmKind::DDA ? "shifted[" + inst.kernel.id() + "]" : inst.kernel.id();
  return o;
}

double metric_of(const RunRecord& r, const std::string& name) {
  if (name == "stationarity") return r.stationarity;
  if (name == "f_bar") return r.f_bar;
  if (name == "consensus_primal") return r.consensus_primal;
  if (name == "consensus_dual") return r.consensus_dual;
  if (name == "G_proxy") return r.G_proxy;
  throw ValidationError("tuning.select_by: unknown metric '" + name + "'");
}

bool needs_tuning(const AlgorithmSpec& a) {
  if (a.theorem_step) return false;
  if (!a.eta) return true;
  return a.kind == AlgorithmKind::DMGT && !a.delta;
}

TuneResult tune_instances(const ExperimentConfig& cfg, const std::vector<Instance>& insts, int threads) {
  TuneResult tr;
  struct Job {
    int cell;
    int inst;
  };
  std::vector<const AlgorithmSpec*> owners;
  for (const auto& a : cfg.algorithms) {
    if (!needs_tuning(a)) continue;
    std::vector<double> etas = a.eta ? std::vector<double>{*a.eta} : cfg.tuning.eta_grid;
    std::vector<double> deltas{kInf};
    if (a.kind == AlgorithmKind::DMGT) deltas = a.delta ? std::vector<double>{*a.delta} : cfg.tuning.delta_grid;
    for (double e : etas)
      for (double dl : deltas) {
        tr.cells.push_back(TuneCell{a.label, e, dl, 0.0, false});
        owners.push_back(&a);
      }
  }
  std::vector<Job> jobs;
  for (int c = 0; c < static_cast<int>(tr.cells.size()); ++c)
    for (int i = 0; i < static_cast<int>(insts.size()); ++i) jobs.push_back({c, i});
  std::vector<double> value(jobs.size());
  std::vector<char> div(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), threads, [&](int j) {
    const auto& job = jobs[j];
    const TuneCell& cell = tr.cells[job.cell];
    RunOutcome o = execute(cfg, *owners[job.cell], insts[job.inst], cell.eta, cell.delta, cfg.max_iter);
    div[j] = o.summary.diverged;
    value[j] = o.records.empty() ? kInf : metric_of(o.records.back(), cfg.tuning.select_by);
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    TuneCell& cell = tr.cells[jobs[j].cell];
    if (div[j] || !std::isfinite(value[j])) cell.diverged = true;
    cell.score += value[j] / static_cast<double>(insts.size());
  }
  for (auto& cell : tr.cells)
    if (cell.diverged) cell.score = kInf;

  for (const auto& a : cfg.algorithms) {
    if (!needs_tuning(a)) {
      TuneChoice ch{a.label, a.eta.value_or(kInf), a.delta.value_or(kInf), 0.0, false, false};
      tr.best.push_back(ch);
      continue;
    }
    const TuneCell* best = nullptr;
    for (const auto& cell : tr.cells) {
      if (cell.label != a.label) continue;
      auto key = [](const TuneCell& t) { return std::make_tuple(t.diverged, t.score, t.eta, t.delta); };
      if (!best || key(cell) < key(*best)) best = &cell;
    }
    tr.best.push_back(TuneChoice{a.label, best->eta, best->delta, best->score, best->diverged, true});
  }
  return tr;
}

}  // namespace

const TuneChoice& TuneResult::choice(const std::string& label) const {
  for (const auto& c : best)
    if (c.label == label) return c;
  throw std::out_of_range("no tuning entry for " + label);
}

std::string TuneResult::to_csv() const {
  std::ostringstream os;
  os << "label,eta,delta,score,diverged,selected\n";
  for (const auto& c : cells) {
    const TuneChoice& b = choice(c.label);
    bool sel = b.tuned && b.eta == c.eta && (b.delta == c.delta);
    os << c.label << ',' << format_double(c.eta) << ',' << format_double(c.delta) << ','
       << format_double(c.score) << ',' << (c.diverged ? 1 : 0) << ',' << (sel ? 1 : 0) << '\n';
  }
  return os.str();
}

TuneResult tune(const ExperimentConfig& cfg, int threads) {
  std::vector<Instance> insts;
  for (auto s : cfg.seeds) insts.push_back(build_instance(cfg, s));
  return tune_instances(cfg, insts, threads);
}

ExperimentConfig freeze_tuning(const ExperimentConfig& cfg, const TuneResult& tr) {
  ExperimentConfig out = cfg;
  for (auto& a : out.algorithms) {
    const TuneChoice& c = tr.choice(a.label);
    if (!c.tuned) continue;
    a.eta = c.eta;
    if (a.kind == AlgorithmKind::DMGT) a.delta = c.delta;
  }
  return out;
}

bool stagnated(const std::vector<RunRecord>& records, double factor) {
  if (records.size() < 2) return false;
  const int T = records.back().t;
  const RunRecord* half = nullptr;
  for (const auto& r : records)
    if (r.t >= T / 2) {
      half = &r;
      break;
    }
  if (!half || half == &records.back()) return false;
  return !(records.back().stationarity <= factor * half->stationarity);
}

const RunOutcome& BatchResult::find(const std::string& run_id) const {
  for (const auto& r : runs)
    if (r.run_id == run_id) return r;
  throw std::out_of_range("no run " + run_id);
}

fs::path resolve_output(const ExperimentConfig& cfg, const std::string& override_out) {
  fs::path p = override_out.empty() ? fs::path(cfg.output) : fs::path(override_out);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) p = fs::path(root) / p;
  }
  return p;
}

std::string git_blob_sha1(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw std::runtime_error("sha1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  if (!out.flush()) throw std::runtime_error("write failed for " + p.string());
}

const std::vector<std::string>& plot_metrics() {
  static const std::vector<std::string> m{"f_bar", "stationarity", "rel_error", "consensus_primal",
                                          "consensus_dual", "E_t_proxy", "M_t_proxy", "G_proxy"};
  return m;
}

double record_field(const RunRecord& r, const std::string& name) {
  if (name == "rel_error") return r.rel_error;
  if (name == "E_t_proxy") return r.E_t_proxy;
  if (name == "M_t_proxy") return r.M_t_proxy;
  return metric_of(r, name);
}

std::string plot_table(const std::vector<RunOutcome>& runs, const std::string& metric) {
  std::set<int> ts;
  for (const auto& r : runs)
    for (const auto& rec : r.records) ts.insert(rec.t);
  std::ostringstream os;
  os << 't';
  for (const auto& r : runs) os << ',' << r.run_id;
  os << '\n';
  std::vector<std::map<int, double>> cols(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (const auto& rec : runs[i].records) cols[i][rec.t] = record_field(rec, metric);
  for (int t : ts) {
    os << t;
    for (const auto& c : cols) {
      auto it = c.find(t);
      os << ',' << (it == c.end() ? std::string("nan") : format_double(it->second));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

BatchResult run_batch(const ExperimentConfig& cfg_in, const BatchOptions& opt) {
  validate_config(cfg_in);
  BatchResult br;
  std::vector<Instance> insts;
  for (auto s : cfg_in.seeds) insts.push_back(build_instance(cfg_in, s));

  ExperimentConfig cfg = cfg_in;
  bool any_tuning = std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(), needs_tuning);
  if (any_tuning) {
    br.tuning = tune_instances(cfg, insts, opt.threads);
    cfg = freeze_tuning(cfg, *br.tuning);
  }

  const int n_alg = static_cast<int>(cfg.algorithms.size());
  const int n_inst = static_cast<int>(insts.size());
  br.runs.resize(static_cast<std::size_t>(n_alg * n_inst));
  parallel_for(n_alg * n_inst, opt.threads, [&](int j) {
    const auto& a = cfg.algorithms[j % n_alg];
    const auto& inst = insts[j / n_alg];
    br.runs[j] = execute(cfg, a, inst, a.eta.value_or(kInf), a.delta.value_or(kInf), cfg.record_stride);
  });

  for (int i = 0; i < n_inst; ++i) {
    std::vector<std::vector<RunRecord>*> group;
    for (int a = 0; a < n_alg; ++a) group.push_back(&br.runs[i * n_alg + a].records);
    double fstar = fill_relative_error(group);
    const Instance& inst = insts[i];
    br.instances.push_back(Json{{"seed", inst.seed},
                                {"problem", inst.prob.name},
                                {"m", inst.prob.m},
                                {"d", inst.prob.d},
                                {"kernel", inst.kernel.id()},
                                {"edges", inst.W.graph.edge_count()},
                                {"graph_retries", inst.W.graph.retries},
                                {"rho", inst.W.rho},
                                {"L", inst.L},
                                {"L_raw", inst.L_raw},
                                {"L_estimated", inst.L_estimated},
                                {"f_lower", finite_or_null(inst.prob.f_lower)},
                                {"f_star", finite_or_null(fstar)}});
  }

  if (!opt.write) return br;

  const fs::path dir = resolve_output(cfg_in, opt.out);
  fs::path tmp = dir;
  tmp += ".partial";
  br.dir = dir;
  try {
    fs::remove_all(tmp);
    fs::create_directories(tmp / "runs");
    fs::create_directories(tmp / "plot");
    Json runs = Json::array();
    for (const auto& r : br.runs) {
      std::ostringstream os;
      os << csv_header() << '\n';
      write_records_csv(os, r.run_id, to_string(r.kind), r.kernel_id, r.records);
      const std::string rel = "runs/" + r.run_id + ".csv";
      write_file(tmp / rel, os.str());
      const RunRecord* last = r.records.empty() ? nullptr : &r.records.back();
      runs.push_back(Json{{"run_id", r.run_id},
                          {"label", r.label},
                          {"algorithm", to_string(r.kind)},
                          {"seed", r.seed},
                          {"eta", finite_or_null(r.eta)},
                          {"delta", finite_or_null(r.delta)},
                          {"lambda", finite_or_null(r.lambda)},
                          {"kernel", r.kernel_id},
                          {"iterations", r.summary.iterations},
                          {"diverged", r.summary.diverged},
                          {"diverged_at", r.summary.diverged_at},
                          {"reason", r.summary.reason},
                          {"clip_count", r.summary.clip_count},
                          {"last_clip", r.summary.last_clip},
                          {"stagnated", r.stagnated},
                          {"final_stationarity", last ? finite_or_null(last->stationarity) : Json(nullptr)},
                          {"final_f_bar", last ? finite_or_null(last->f_bar) : Json(nullptr)},
                          {"file", rel},
                          {"file_hash", git_blob_sha1(os.str())}});
    }
    for (const auto& m : plot_metrics()) write_file(tmp / "plot" / (m + ".csv"), plot_table(br.runs, m));
    Json tuning = Json::array();
    if (br.tuning) {
      write_file(tmp / "tuning.csv", br.tuning->to_csv());
      for (const auto& b : br.tuning->best)
        tuning.push_back(Json{{"label", b.label},
                              {"eta", finite_or_null(b.eta)},
                              {"delta", finite_or_null(b.delta)},
                              {"score", finite_or_null(b.score)},
                              {"all_diverged", b.all_diverged},
                              {"tuned", b.tuned}});
    }
    const std::string echo = serialize_config(cfg_in);
    Json man{{"config", config_to_json(cfg_in)},
             {"config_hash", git_blob_sha1(echo)},
             {"seeds", cfg_in.seeds},
             {"instances", br.instances},
             {"tuning", tuning},
             {"runs", runs}};
    br.manifest = man.dump(2) + "\n";
    write_file(tmp / "manifest.json", br.manifest);

    if (fs::exists(dir)) {
      if (!fs::exists(dir / "manifest.json"))
        throw std::runtime_error("output directory " + dir.string() + " exists and holds no previous batch");
      fs::remove_all(dir);
    }
    if (dir.has_parent_path()) fs::create_directories(dir.parent_path());
    fs::rename(tmp, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  return br;
}

}  // namespace dmgt
