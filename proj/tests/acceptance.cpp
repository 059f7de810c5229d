#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dmgt/algorithm.hpp"
#include "dmgt/diagnostics.hpp"
#include "dmgt/experiment.hpp"
#include "dmgt/hruc.hpp"
#include "dmgt/network.hpp"
#include "dmgt/parallel.hpp"
#include "dmgt/problem.hpp"

using namespace dmgt;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  char t[32];
  std::snprintf(t, sizeof t, "%.1fs", seconds);
  std::cout << (pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << detail << " (" << t << ")"
            << std::endl;
  if (!pass) ++failures;
}

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Vec randn(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = nd(rng);
  return v;
}

Mat random_spd(int d, std::mt19937_64& rng) {
  Mat B(d, d);
  for (int j = 0; j < d; ++j) B.col(j) = randn(d, rng);
  return B.transpose() * B / d + 0.1 * Mat::Identity(d, d);
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double hi = h * std::max(1.0, std::abs(x(i)));
    Vec a = x, b = x;
    a(i) += hi;
    b(i) -= hi;
    g(i) = (f(a) - f(b)) / (2 * hi);
  }
  return g;
}

Mat sym_pow(const Mat& A, double p) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  return es.eigenvectors() * es.eigenvalues().array().pow(p).matrix().asDiagonal() * es.eigenvectors().transpose();
}

// Every DMGT run in the acceptance matrix reports here.
struct ClipTally {
  int runs = 0, checks = 0, violations = 0;
  double worst = 0.0;
  void add(const ClipBoundMonitor& m) {
    ++runs;
    checks += m.checks();
    violations += m.violations();
    worst = std::max(worst, m.worst_ratio());
  }
} clip_tally;

RunSummary monitored_run(const Problem& p, const Kernel& k, const MixingMatrix& W, const AlgoConfig& c, const Vec& x0,
                         Recorder* rec) {
  ClipBoundMonitor mon(W.rho);
  std::vector<RunObserver*> obs{&mon};
  if (rec) obs.push_back(rec);
  ObserverList list(obs);
  RunSummary s = run(p, k, W, c, x0, &list);
  if (c.algorithm == AlgorithmKind::DMGT) clip_tally.add(mon);
  return s;
}

void criterion_hruc() {
  Timer t;
  std::string bad;
  int total_violations = 0;
  for (const auto& e : kernel_catalogue(5)) {
    HrucReport r = certify(e.kernel, {0.01, 0.1, 1.0}, 1000, 7);
    if (!r.consistent()) {
      total_violations += static_cast<int>(r.violations.size());
      bad += " " + e.name + "(gap " + num(r.worst_gap[2]) + " > zeta " + num(r.analytic_zeta[2]) + " at 1)";
    }
  }
  report(1, "curvature distortion catalogue", total_violations == 0,
         total_violations == 0 ? "all kernels consistent" : std::to_string(total_violations) + " violations:" + bad,
         t.seconds());
}

void criterion_euclidean_reduction() {
  Timer t;
  const int m = 8, d = 10;
  Problem p = quadratic_consensus(d, m, 2);
  MixingMatrix W = metropolis_weights(erdos_renyi(m, 0.3, 2));
  auto rng = make_rng({2});
  Vec x0 = randn(d, rng);
  const double eta = 0.5 / *p.L_analytic;
  AlgoConfig c;
  c.eta = eta;
  c.delta = 1e9;
  c.max_iter = 200;
  struct Log : RunObserver {
    std::vector<AgentSystem> s;
    void on_state(const AgentSystem& cur, const AgentSystem*, const StepEvents&) override { s.push_back(cur); }
  } log;
  run(p, euclidean(d), W, c, x0, &log);

  RowMat X(m, d), Y(m, d), G(m, d);
  for (int i = 0; i < m; ++i) {
    X.row(i) = x0.transpose();
    G.row(i) = p.local_grad(i, x0).transpose();
  }
  Y = G;
  double worst = 0.0;
  for (int k = 0; k <= 200; ++k) {
    worst = std::max({worst, (log.s[k].X - X).cwiseAbs().maxCoeff(), (log.s[k].Y - Y).cwiseAbs().maxCoeff()});
    RowMat Xn = W.W * X - eta * W.W * Y;
    RowMat Gn(m, d);
    for (int i = 0; i < m; ++i) Gn.row(i) = p.local_grad(i, Xn.row(i).transpose()).transpose();
    Y = W.W * Y + Gn - G;
    X = Xn;
    G = Gn;
  }
  report(2, "Euclidean reduction to gradient tracking", worst <= 1e-10 && log.s.size() == 201,
         "max coordinate deviation " + num(worst) + " over 200 iterations", t.seconds());
}

void criterion_potential() {
  Timer t;
  int bad = 0, pairs = 0;
  double worst = -kInf;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    Problem p = quadratic_consensus(10, 8, s);
    MixingMatrix W = metropolis_weights(erdos_renyi(8, 0.3, s));
    AlgoConfig c;
    c.eta = (1 - W.rho) * (1 - W.rho) / (25 * *p.L_analytic);
    c.max_iter = 500;
    Recorder rec(p, *p.L_analytic, W.rho);
    auto rng = make_rng({3, s});
    monitored_run(p, euclidean(10), W, c, randn(10, rng), &rec);
    const auto& r = rec.records();
    for (std::size_t k = 1; k < r.size(); ++k) {
      ++pairs;
      double inc = (r[k].M_t_proxy - r[k - 1].M_t_proxy) / (1 + std::abs(r[k - 1].M_t_proxy));
      worst = std::max(worst, inc);
      if (inc > 1e-12) ++bad;
    }
  }
  report(3, "potential monotonicity", bad == 0 && pairs == 20 * 500,
         std::to_string(bad) + " increases in " + std::to_string(pairs) + " steps, largest relative change " +
             num(worst),
         t.seconds());
}

void criterion_theorem_bound() {
  Timer t;
  int checks = 0, fails = 0;
  std::string detail;
  auto check = [&](const std::string& tag, const Problem& p, const Kernel& k, std::uint64_t s, const Vec& x0,
                   double slack) {
    MixingMatrix W = metropolis_weights(erdos_renyi(p.m, 0.3, s));
    AlgoConfig c;
    c.auto_step = true;
    c.max_iter = 1000;
    Recorder rec(p, *p.L_analytic, W.rho);
    RunSummary sum = monitored_run(p, k, W, c, x0, &rec);
    for (int T : {10, 100, 1000}) {
      BoundCheck b = theorem_bound_check(rec.records(), p.f(x0), p.f_lower, rec.params().eta, T, slack);
      ++checks;
      if (!b.holds || sum.diverged) {
        ++fails;
        detail += " " + tag + "/T=" + std::to_string(T);
      }
    }
  };
  for (std::uint64_t s = 1; s <= 5; ++s) {
    Problem q = quadratic_consensus(10, 8, s);
    auto rng = make_rng({4, s});
    check("euclidean", q, euclidean(10), s, randn(10, rng), 1.0);
  }
  for (std::uint64_t s = 1; s <= 3; ++s) {
    Problem e = entropic_regression(20, 40, 8, s);
    check("boltzmann_shannon", e, *e.paired_kernel, s, Vec::Ones(20), 1.1);
    Problem p = poisson_inverse(20, 10, 8, s);
    check("burg", p, *p.paired_kernel, s, Vec::Ones(20), 1.1);
  }
  report(4, "descent bound", fails == 0,
         std::to_string(checks - fails) + "/" + std::to_string(checks) + " checks hold" +
             (fails ? "; failing:" + detail : ""),
         t.seconds());
}

void criterion_finite_clipping() {
  Timer t;
  Problem p = poisson_inverse(200, 50, 8, 1);
  MixingMatrix W = metropolis_weights(erdos_renyi(8, 0.3, 1));
  AlgoConfig c;
  c.auto_step = true;
  c.max_iter = 5000;
  struct Late : RunObserver {
    int late = 0, all = 0;
    void on_state(const AgentSystem& cur, const AgentSystem* next, const StepEvents& ev) override {
      if (!next || !ev.clipped) return;
      ++all;
      if (cur.t >= 2500) ++late;
    }
  } late;
  ClipBoundMonitor mon(W.rho);
  ObserverList list({&late, &mon});
  RunSummary s = run(p, *p.paired_kernel, W, c, Vec::Ones(200), &list);
  clip_tally.add(mon);
  auto tp = theorem_parameters(*p.paired_kernel, 8, W.rho, *p.L_analytic);
  report(6, "finite clipping", !s.diverged && late.late == 0,
         std::to_string(late.late) + " clip events after t=2500 (" + std::to_string(late.all) +
             " in total; eta " + num(tp.eta) + ", delta " + num(tp.delta) + ")",
         t.seconds());
}

void criterion_clip_bounds() {
  Timer t;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    Problem po = poisson_inverse(20, 10, 8, s);
    Problem ph = phase_retrieval(10, 40, 8, std::sqrt(0.1), s);
    Problem en = entropic_regression(10, 20, 8, s);
    MixingMatrix W = metropolis_weights(erdos_renyi(8, 0.3, s));
    for (double delta : {0.01, 0.1, 1.0}) {
      AlgoConfig c;
      c.max_iter = 300;
      c.delta = delta;
      c.eta = 0.1;
      monitored_run(po, *po.paired_kernel, W, c, Vec::Ones(20), nullptr);
      c.eta = 1e-3;
      monitored_run(ph, *ph.paired_kernel, W, c, Vec::Constant(10, 0.5), nullptr);
      c.eta = 0.05;
      monitored_run(en, *en.paired_kernel, W, c, Vec::Ones(10), nullptr);
    }
  }
  report(5, "clipping bounds", clip_tally.violations == 0 && clip_tally.checks > 0,
         std::to_string(clip_tally.violations) + " violations in " + std::to_string(clip_tally.checks) +
             " steps over " + std::to_string(clip_tally.runs) + " runs, worst ratio " + num(clip_tally.worst),
         t.seconds());
}

void criterion_contraction() {
  Timer t;
  auto rng = make_rng({7});
  int fails = 0;
  for (int s = 0; s < 200; ++s) {
    int m = 2 + s % 15, d = 1 + s % 8;
    MixingMatrix W = metropolis_weights(erdos_renyi(m, 0.5, 700 + s));
    double alpha = 0.5 * (1 - W.rho) * std::uniform_real_distribution<double>(0, 1)(rng);
    Mat H = random_spd(d, rng);
    Mat V(m, d), U(m, d);
    for (int i = 0; i < m; ++i) {
      V.row(i) = randn(d, rng).transpose();
      U.row(i) = randn(d, rng).transpose();
    }
    if (!contraction_check(W, H, (1 + alpha) * H, V, U)) ++fails;
  }
  int bfails = 0;
  for (int s = 0; s < 200; ++s) {
    int d = 1 + s % 8;
    Mat B = random_spd(d, rng);
    Mat E = random_spd(d, rng) * std::uniform_real_distribution<double>(0, 0.5)(rng);
    Mat A = B + E;
    double alpha = Eigen::JacobiSVD<Mat>(A * B.inverse() - Mat::Identity(d, d)).singularValues()(0);
    double lhs = Eigen::JacobiSVD<Mat>(sym_pow(A, 0.5) * sym_pow(B, -0.5)).singularValues()(0);
    if (lhs > std::sqrt(1 + alpha) * (1 + 1e-10)) ++bfails;
  }
  report(7, "mixing contraction and square-root bound", fails == 0 && bfails == 0,
         std::to_string(fails) + "/200 contraction and " + std::to_string(bfails) + "/200 matrix bound violations",
         t.seconds());
}

void criterion_three_point() {
  Timer t;
  auto rng = make_rng({8});
  double worst = 0.0;
  std::string worst_name;
  for (const auto& e : kernel_catalogue(5)) {
    const Kernel& k = e.kernel;
    for (int s = 0; s < 100; ++s) {
      Vec x = k.domain().sample(rng), y = k.domain().sample(rng), z = k.domain().sample(rng);
      double dxz = k.bregman(x, z), dxy = k.bregman(x, y), dyz = k.bregman(y, z);
      double rhs = (k.grad(y) - k.grad(z)).dot(x - y);
      double err = std::abs((dxz - dxy - dyz) - rhs) / (1 + dxz + dxy + dyz + std::abs(rhs));
      if (err > worst) {
        worst = err;
        worst_name = e.name;
      }
    }
  }
  report(8, "three-point identity", worst <= 1e-10,
         "worst relative error " + num(worst) + (worst_name.empty() ? "" : " (" + worst_name + ")"), t.seconds());
}

void criterion_dual_lipschitz() {
  Timer t;
  struct Pair {
    std::string tag;
    Problem prob;
    Kernel kernel;
  };
  Problem q = quadratic_consensus(5, 4, 9);
  Problem p = poisson_inverse(5, 10, 4, 9);
  std::vector<Pair> pairs{{"euclidean/quadratic", q, euclidean(5)}, {"burg/poisson", p, *p.paired_kernel}};
  std::string detail;
  bool ok = true;
  for (const auto& pr : pairs) {
    auto rng = make_rng({9});
    const Kernel& k = pr.kernel;
    const double L = *pr.prob.L_analytic;
    double worst = -kInf;
    for (int s = 0; s < 500; ++s) {
      const double delta = std::pow(10.0, -2 + s % 3);
      const int i = s % pr.prob.m;
      Vec z = k.grad(k.domain().sample(rng));
      Vec x = k.grad_conj(z + sample_ball(5, delta, rng));
      Vec y = k.grad_conj(z + sample_ball(5, delta, rng));
      GradOracle g = [&](const Vec& v) { return pr.prob.local_grad(i, v); };
      worst = std::max(worst, dual_lipschitz_residual(k, g, L, z, x, y, delta));
    }
    ok = ok && worst <= 1e-9;
    detail += pr.tag + " worst residual " + num(worst) + "; ";
  }
  report(9, "dual Lipschitz inequality", ok, detail, t.seconds());
}

void criterion_gradients() {
  Timer t;
  auto rng = make_rng({10});
  std::string detail;
  bool ok = true;
  auto problem_check = [&](const Problem& p, const std::function<Vec()>& sample, double tol) {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      Vec x = sample();
      int i = s % p.m;
      Vec g = p.local_grad(i, x);
      Vec fd = fd_gradient([&](const Vec& y) { return p.local_value(i, y); }, x, 1e-6);
      worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
    }
    ok = ok && worst <= tol;
    detail += p.name + " " + num(worst) + "; ";
  };
  auto pos = [&](int d) {
    return [&rng, d]() -> Vec {
      std::uniform_real_distribution<double> u(0.1, 2.0);
      Vec x(d);
      for (int j = 0; j < d; ++j) x(j) = u(rng);
      return x;
    };
  };
  problem_check(quadratic_consensus(6, 4, 10), [&] { return randn(6, rng); }, 1e-6);
  problem_check(phase_retrieval(6, 30, 4, std::sqrt(0.1), 10), [&] { return randn(6, rng); }, 1e-6);
  problem_check(poisson_inverse(6, 20, 4, 10), pos(6), 1e-6);
  problem_check(entropic_regression(6, 20, 4, 10), pos(6), 1e-6);
  TvOptions o;
  o.d_img = 8;
  o.m = 2;
  o.blur_len = 3;
  o.lambda_tv = 0.1;
  o.eps_tv = 0.5;
  problem_check(tv_deblur(o), [&] { return Vec(100.0 * pos(64)()); }, 1e-5);
  double kworst = 0.0;
  std::string kname;
  for (const auto& e : kernel_catalogue(5)) {
    for (int s = 0; s < 100; ++s) {
      Vec x = e.kernel.domain().sample(rng);
      Vec g = e.kernel.grad(x);
      Vec fd = fd_gradient([&](const Vec& y) { return e.kernel.eval(y); }, x, 1e-5);
      double err = (g - fd).norm() / std::max(1.0, g.norm());
      if (err > kworst) {
        kworst = err;
        kname = e.name;
      }
    }
  }
  ok = ok && kworst <= 1e-6;
  detail += "kernels " + num(kworst) + " (" + kname + ")";
  report(10, "gradient oracles", ok, detail, t.seconds());
}

double mean_of(const BatchResult& br, const std::string& label, const std::vector<std::uint64_t>& seeds, bool final) {
  double s = 0.0;
  for (auto seed : seeds) {
    const RunOutcome& r = br.find(label + "_s" + std::to_string(seed));
    s += final ? r.records.back().stationarity : r.records.front().stationarity;
  }
  return s / seeds.size();
}

std::vector<std::pair<std::string, std::string>> read_tree(const fs::path& root) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out.emplace_back(fs::relative(e.path(), root).string(), ss.str());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void criteria_reproduction() {
  Timer t;
  ExperimentConfig cfg = parse_config(fs::path(DMGT_CONFIG_DIR) / "poisson_desk.json");
  fs::path base = fs::temp_directory_path() / "dmgt_acceptance";
  fs::remove_all(base);
  BatchOptions one;
  one.out = (base / "threads1").string();
  BatchResult br = run_batch(cfg, one);

  const auto& seeds = cfg.seeds;
  double init = mean_of(br, "dmgt", seeds, false), fin = mean_of(br, "dmgt", seeds, true);
  double dmd = mean_of(br, "dmd", seeds, true), dgt = mean_of(br, "dgt", seeds, true);
  double orders = std::log10(init / fin);
  const auto& dchoice = br.tuning->choice("dmgt");
  bool a = orders >= 3.0;
  bool b = fin <= dmd;
  int random_events = 0, favorable_events = 0;
  std::string dda_detail;
  for (auto seed : seeds) {
    const RunOutcome& r = br.find("dda_random_s" + std::to_string(seed));
    if (r.summary.diverged || r.stagnated) ++random_events;
    const RunOutcome& f = br.find("dda_favorable_s" + std::to_string(seed));
    if (f.summary.diverged || f.stagnated) ++favorable_events;
    dda_detail += " s" + std::to_string(seed) + ": random " +
                  (r.summary.diverged ? "diverged@" + std::to_string(r.summary.diverged_at)
                                      : (r.stagnated ? "stagnated" : "converging")) +
                  ", favorable " +
                  (f.summary.diverged ? "diverged@" + std::to_string(f.summary.diverged_at)
                                      : (f.stagnated ? "stagnated" : "converging"));
  }
  bool c = random_events > 0;
  bool d = favorable_events == 0;
  double secs = t.seconds();
  report(11, "desk-scale reproduction (a) stationarity reduction", a,
         "DMGT " + num(init) + " -> " + num(fin) + " = " + num(orders) + " orders (eta " + num(dchoice.eta) +
             ", delta " + num(dchoice.delta) + ")",
         secs);
  report(11, "desk-scale reproduction (b) DMGT vs DMD", b,
         "final stationarity DMGT " + num(fin) + ", DMD " + num(dmd) + " (eta " + num(br.tuning->choice("dmd").eta) +
             "), DGT " + num(dgt),
         secs);
  report(11, "desk-scale reproduction (c) DDA from random start", c,
         std::to_string(random_events) + "/3 seeds record stagnation or divergence", secs);
  report(11, "desk-scale reproduction (d) DDA from favorable start", d,
         std::to_string(favorable_events) + "/3 seeds record stagnation or divergence;" + dda_detail, secs);

  Timer t2;
  BatchOptions again = one;
  BatchOptions four;
  four.out = (base / "threads4").string();
  four.threads = 4;
  auto first = read_tree(one.out);
  run_batch(cfg, again);
  run_batch(cfg, four);
  auto rerun = read_tree(one.out), threaded = read_tree(four.out);
  int csvs = 0;
  for (const auto& [name, _] : first) csvs += name.size() > 4 && name.substr(name.size() - 4) == ".csv";
  bool same = first == rerun && first == threaded;
  report(12, "determinism", same && csvs > 0,
         std::to_string(first.size()) + " files (" + std::to_string(csvs) + " CSV) " +
             (same ? "byte-identical" : "differ") + " across rerun and 4 threads",
         t2.seconds());
  fs::remove_all(base);
}

}  // namespace

int main() {
  std::cout << "acceptance criteria" << std::endl;
  criterion_hruc();
  criterion_euclidean_reduction();
  criterion_potential();
  criterion_theorem_bound();
  criterion_finite_clipping();
  criterion_clip_bounds();
  criterion_contraction();
  criterion_three_point();
  criterion_dual_lipschitz();
  criterion_gradients();
  criteria_reproduction();
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criterion checks failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
