#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "degpar/harness.hpp"
#include "degpar/multiplier.hpp"
#include "oracles.hpp"

using namespace degpar;
namespace fs = std::filesystem;

namespace {

/// Pinned tolerances.
constexpr double kParamTol = 1e-12;
constexpr double kOracleTol = 1e-8;
constexpr double kXiOrder = 1.95;  // centred differences, order 2 up to a pre-asymptotic allowance
constexpr double kContraction = 1.05;
constexpr double kHilbertMaxReg = 10.0;

using Clock = std::chrono::steady_clock;

struct Line {
  int id;
  std::string name;
  bool pass;
  double seconds;
  double budget;
  std::string detail;
};

std::map<std::string, EstimateResult> g_results;

const EstimateResult& get(const std::string& id) { return g_results.at(id); }

double seconds_of(std::initializer_list<const char*> ids) {
  double s = 0.0;
  for (const char* id : ids) s += get(id).seconds;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fmt(double v) { return CsvTable::format(v); }

bool drift_ok(const EstimateResult& r) { return r.finite && r.drift <= kDriftBand; }

}  // namespace

int main() {
  const fs::path root = fs::temp_directory_path() / "degpar_acceptance";
  fs::remove_all(root);
  SuiteConfig cfg = SuiteConfig::defaults();
  cfg.out_dir = (root / "run_a").string();

  const auto t0 = Clock::now();
  for (const auto& r : run_suite(cfg)) g_results[r.estimate_id] = r;
  const double suite_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  std::vector<Line> lines;

  {
    const auto& r = get("param_calculus");
    lines.push_back({1, "parameter calculus", r.pass && r.constant <= kParamTol, r.seconds, 1.0,
                     "max relative error " + fmt(r.constant) + " over 1000 random inputs"});
  }
  {
    const auto& p = get("isometry_power");
    const auto& ph = get("isometry_phase");
    const auto& sh = get("isometry_shear");
    lines.push_back({2, "isometries", p.pass && ph.pass && sh.pass,
                     seconds_of({"isometry_power", "isometry_phase", "isometry_shear"}), 10.0,
                     "power " + fmt(p.constants.front()) + " at J=256, phase " + fmt(ph.constant) + ", shear " +
                         fmt(sh.constant)});
  }
  {
    const auto& s = get("similarity_power");
    const auto& e = get("equivalence_transform");
    lines.push_back({3, "similarity", s.pass && e.pass, seconds_of({"similarity_power", "equivalence_transform"}), 60.0,
                     "orders " + fmt(s.parameters.at("observed_order")) + " (power), " +
                         fmt(e.parameters.at("observed_order")) + " (equivalence) over J=128,256,512"});
  }
  {
    SuiteConfig c3 = cfg;
    c3.refine = 3;  // two refinements
    c3.out_dir.clear();
    const EstimateResult sc = run_check("sector_scan", c3);
    const auto& sa = get("spectral_selfadjoint");
    lines.push_back({4, "1-d spectral structure", sa.pass && sc.pass, sa.seconds + sc.seconds, 120.0,
                     "hermitian defect " + fmt(sa.constant) + ", top eigenvalue ratio " +
                         fmt(sa.parameters.at("max_relative_eigenvalue")) + ", sector sup " + fmt(sc.constant) +
                         ", drift " + fmt(sc.drift)});
  }
  {
    const auto& b = get("kernel_bessel");
    const auto& a = get("kernel_auxiliary");
    const auto& d = get("kernel_domination");
    lines.push_back({5, "kernel bounds", b.pass && a.pass && d.pass,
                     seconds_of({"kernel_bessel", "kernel_auxiliary", "kernel_domination"}), 300.0,
                     "drift " + fmt(std::max(b.drift, a.drift)) + " (J=256 to 512), domination excess " +
                         fmt(d.constant)});
  }
  {
    const auto& r = get("resolvent_identity");
    lines.push_back({6, "resolvent identity", r.pass && r.constant <= kOracleTol, r.seconds, 60.0,
                     "max relative difference " + fmt(r.constant)});
  }
  {
    const auto t = Clock::now();
    ModelParams m = cfg.model;
    m.a = Eigen::VectorXd::Constant(1, 0.3);
    m.alpha = 0.4;
    m.c_bessel = 0.8;
    const GridPtr g = Grid::make(128, cfg.y_max, cfg.grading, XBox{cfg.box_length, 32, 1});
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> N;
    Field f(g);
    for (auto& v : f.values()) v = cplx(N(rng), N(rng));
    const cplx lambda(1.0, 0.5);
    const Field u = resolvent_nd(lambda, f, m);
    const Field v = oracle::monolithic_resolvent(m, g, lambda, f);
    const double diff = (u.values() - v.values()).norm() / v.values().norm();
    const double oracle_s = std::chrono::duration<double>(Clock::now() - t).count();
    const auto& nd = get("nd_manufactured");
    lines.push_back({7, "N-d solver", nd.pass && diff <= kOracleTol, nd.seconds + oracle_s, 120.0,
                     "manufactured order " + fmt(nd.parameters.at("observed_order")) + ", monolithic oracle " +
                         fmt(diff)});
  }
  {
    const auto& c = get("apriori_estimate");
    const auto& l = get("interpolation_inequality");
    const bool neg = c.negative && !c.negative->passed;
    lines.push_back({8, "a priori estimates", drift_ok(c) && drift_ok(l) && neg && c.pass,
                     seconds_of({"apriori_estimate", "interpolation_inequality"}), 300.0,
                     "second-order constant " + fmt(c.constant) + " drift " + fmt(c.drift) + ", interpolation " +
                         fmt(l.constant) + " drift " + fmt(l.drift) + ", negative control " +
                         (neg ? "fails" : "passes") + " (drift " + fmt(c.negative ? c.negative->drift : 0.0) + ")"});
  }
  {
    const auto& x = get("xi_derivative");
    const double order = x.parameters.at("observed_order");
    lines.push_back({9, "xi-derivatives", x.pass && order >= kXiOrder, x.seconds, 60.0,
                     "observed order " + fmt(order) + " (n=1,2)"});
  }
  {
    const auto& s = get("square_function");
    lines.push_back({10, "square function", s.pass && s.parameters.at("identity_ratio") == 1.0, s.seconds, 120.0,
                     "ratios n=4,8,16: " + fmt(s.constants[0]) + ", " + fmt(s.constants[1]) + ", " +
                         fmt(s.constants[2]) + ", identity " + fmt(s.parameters.at("identity_ratio"))});
  }
  {
    const auto& h = get("heat_closed_form");
    const auto& c = get("contraction");
    const auto& m = get("maximal_regularity");
    const bool hilbert = cfg.model.p == 2.0 && cfg.time_q == 2.0 && cfg.model.a.norm() == 0.0;
    lines.push_back({11, "parabolic", h.pass && c.pass && c.constant <= kContraction && m.pass && hilbert &&
                                          m.constant <= kHilbertMaxReg,
                     seconds_of({"heat_closed_form", "contraction", "maximal_regularity"}), 300.0,
                     "heat order " + fmt(h.parameters.at("order_backward_euler")) + ", contraction " +
                         fmt(c.constant) + ", maximal regularity " + fmt(m.constant) + " drift " + fmt(m.drift)});
  }
  {
    const auto t = Clock::now();
    clear_check_caches();
    SuiteConfig again = cfg;
    again.out_dir = (root / "run_b").string();
    run_suite(again);
    bool same = true;
    std::string first_diff;
    for (const auto& entry : fs::directory_iterator(root / "run_a")) {
      const auto name = entry.path().filename();
      if (slurp(entry.path()) != slurp(root / "run_b" / name)) {
        same = false;
        if (first_diff.empty()) first_diff = name.string();
      }
    }
    const double rerun = std::chrono::duration<double>(Clock::now() - t).count();
    lines.push_back({12, "reproducibility", same && suite_seconds < 1200.0, rerun, 1200.0,
                     std::string(same ? "byte-identical CSVs" : "CSV differs: " + first_diff) + ", full suite " +
                         fmt(suite_seconds) + " s"});
  }

  bool all = true;
  for (const auto& l : lines) {
    const bool ok = l.pass && l.seconds < l.budget;
    all = all && ok;
    std::printf("criterion %2d %-24s %s  [%.2f s / %.0f s]  %s\n", l.id, l.name.c_str(), ok ? "PASS" : "FAIL", l.seconds,
                l.budget, l.detail.c_str());
  }
  std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
  fs::remove_all(root);
  return all ? 0 : 1;
}
