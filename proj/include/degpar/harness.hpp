#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "degpar/bessel1d.hpp"
#include "degpar/grid.hpp"
#include "degpar/params.hpp"
#include "degpar/profiles.hpp"

namespace degpar {

/// Relative drift band and growth factor of the pass semantics for
/// non-explicit constants.
constexpr double kDriftBand = 0.2;
constexpr double kNegativeGrowth = 3.0;

/// Plain CSV table with deterministic number formatting (%.12g).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static std::string format(double v);
  /// Appends a row; numbers are formatted, strings are copied.
  template <typename... Ts>
  void add(const Ts&... cells) {
    std::vector<std::string> row;
    (row.push_back(cell(cells)), ...);
    rows.push_back(std::move(row));
  }
  std::string to_string() const;

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename T>
  static std::string cell(const T& v) {
    return format(static_cast<double>(v));
  }
};

/// Outcome of the companion out-of-window run of a window-dependent estimate.
struct NegativeControl {
  std::map<std::string, double> parameters;
  std::vector<double> constants;
  double drift = 0.0;
  /// True when the control met the pass semantics (a vacuous tolerance).
  bool passed = false;
};

struct EstimateResult {
  std::string estimate_id;
  /// The inequality or identity being checked, in words.
  std::string anchor;
  std::map<std::string, double> parameters;
  /// Refinement levels (J, or the count n for square functions).
  std::vector<int> levels;
  /// Fitted constant (or discrepancy) per level.
  std::vector<double> constants;
  double constant = 0.0;
  double drift = 0.0;
  bool finite = true;
  bool window_dependent = false;
  std::optional<NegativeControl> negative;
  bool pass = false;
  std::string detail;
  CsvTable table;
  std::string csv_path;
  double seconds = 0.0;
};

/// Settings shared by all registered checks.
struct SuiteConfig {
  /// Model operator of window-dependent checks; N = a.size() (N <= 2).
  ModelParams model;
  int base_J = 128;
  double y_max = 8.0;
  double grading = 2.0;
  int nx = 16;
  double box_length = 2.0 * 3.14159265358979323846;
  /// Time exponent of the maximal-regularity check.
  double time_q = 2.0;
  int refine = 2;
  std::uint64_t seed = 1;
  /// nullopt runs every registered check; an empty list runs none.
  std::optional<std::vector<std::string>> checks;
  /// Directory for per-estimate CSVs and summary.csv; empty writes nothing.
  std::string out_dir;
  bool negative_controls = true;

  /// alpha = 0, a = 0 (N = 1), c = 0, m = 0, p = 2.
  static SuiteConfig defaults();
  /// J at refinement level k: base_J * 2^k.
  int level_J(int k) const { return base_J << k; }
  GridPtr y_grid(int J) const;
  GridPtr nd_grid(int J, int N) const;
};

using CheckFn = std::function<EstimateResult(const SuiteConfig&)>;

struct CheckInfo {
  std::string id;
  std::string anchor;
  bool window_dependent = false;
  CheckFn run;
};

/// All registered checks, in execution order.
const std::vector<CheckInfo>& check_registry();
/// Check ids of a named suite ("all", "kernel_bounds", "calculus",
/// "similarity", "spectral", "apriori", "multipliers", "nd_solver",
/// "parabolic"); throws std::invalid_argument for unknown names.
std::vector<std::string> suite_checks(const std::string& suite);
std::vector<std::string> suite_names();

/// Runs the selected checks, writes `<id>.csv` and summary.csv into
/// out_dir (when set) and returns the results ordered as the registry.
std::vector<EstimateResult> run_suite(const SuiteConfig& config);
/// Runs one check by id.
EstimateResult run_check(const std::string& id, const SuiteConfig& config);
/// Drops memoized kernel fits so the next run recomputes them.
void clear_check_caches();

/// Summary rows estimate_id, pass, constant, drift, negative_control.
CsvTable summary_table(const std::vector<EstimateResult>& results);

/// Max over successive levels of |c_{k+1} / c_k - 1|; infinity when a
/// constant is not finite or vanishes before a nonzero one.
double relative_drift(const std::vector<double>& constants);

/// Smallest log2 ratio of successive errors (halved step per level).
double observed_order(const std::vector<double>& errors);

/// Model with (m+1)/p moved `offset` above the upper end of its window.
ModelParams out_of_window_model(const ModelParams& model, double offset = 0.5);

/// One operator of a family and its Euclidean adjoint (may be empty).
struct SampledOperator {
  LinearMap apply;
  LinearMap adjoint;
};
/// Draws the operator with the given index of a family.
using OperatorSampler = std::function<SampledOperator(int index, std::mt19937_64& rng)>;

struct SquareFunctionOptions {
  int ascent_steps = 4;     ///< duality-map power steps per trial
  double support = 0.0;     ///< random fields vanish for y >= support (0: no cut)
};

/// max over trials of || (sum |S_i f_i|^2)^{1/2} ||_{L^p_w} / || (sum |f_i|^2)^{1/2} ||_{L^p_w}
/// with n operators drawn from the sampler and n random fields per trial,
/// refined by `ascent_steps` power steps with the weighted duality maps.
/// Operators without an adjoint skip the ascent.
double square_function_ratio(const OperatorSampler& family, int n, int trials, double p, const Eigen::VectorXd& w,
                             const Eigen::VectorXd& y, std::uint64_t seed, const SquareFunctionOptions& opt = {});

/// u = e^{i k.x} e^{-i (k.b/c) y} phi(y) (the phase only for b != 0) and
/// f = (lambda - L) u evaluated with the exact profile derivatives.
struct ManufacturedPair {
  Field u;
  Field f;
};
ManufacturedPair manufactured_general(const OperatorSpec& spec, const GridPtr& grid, const Eigen::VectorXi& k,
                                      const Profile& phi, cplx lambda);

}  // namespace degpar
