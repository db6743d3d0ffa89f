#include "degpar/params.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace degpar {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Eigen::MatrixXd OperatorSpec::block_matrix() const {
  const int n = dimension();
  Eigen::MatrixXd M(n + 1, n + 1);
  M.topLeftCorner(n, n) = Q;
  M.topRightCorner(n, 1) = q;
  M.bottomLeftCorner(1, n) = q.transpose();
  M(n, n) = gamma;
  return M;
}

void OperatorSpec::validate() const {
  const int n = dimension();
  if (Q.cols() != n) throw ParameterError("q_matrix must be square");
  if (q.size() != n) throw ParameterError("q_vector size must match q_matrix");
  if (drift_b.size() != n) throw ParameterError("drift_b size must match q_matrix");
  if (!Q.allFinite() || !q.allFinite() || !drift_b.allFinite() || !std::isfinite(gamma) ||
      !std::isfinite(drift_c) || !std::isfinite(alpha1) || !std::isfinite(alpha2))
    throw ParameterError("operator coefficients must be finite");
  if (n > 0 && (Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw ParameterError("q_matrix must be symmetric");
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(min_block_eigenvalue(*this) > 0.0))
    throw ParameterError("block matrix [[Q, q], [q^T, gamma]] is not positive definite");
  if (!(alpha2 < 2.0)) throw ParameterError("alpha2 must be < 2, got " + fmt(alpha2));
  if (!(alpha2 - alpha1 < 2.0)) throw ParameterError("alpha2 - alpha1 must be < 2");
  if (drift_c == 0.0 && n > 0 && drift_b.cwiseAbs().maxCoeff() != 0.0)
    throw ParameterError("drift_b must vanish when drift_c = 0");
}

OperatorSpec OperatorSpec::model(const Eigen::VectorXd& a, double alpha, double c) {
  const auto n = a.size();
  OperatorSpec s;
  s.Q = Eigen::MatrixXd::Identity(n, n);
  s.q = a;
  s.gamma = 1.0;
  s.drift_b = Eigen::VectorXd::Zero(n);
  s.drift_c = c;
  s.alpha1 = alpha;
  s.alpha2 = alpha;
  return s;
}

void SpaceSpec::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("p must lie in (1, inf), got " + fmt(p));
  if (!std::isfinite(m)) throw ParameterError("m must be finite");
}

void ModelParams::validate() const {
  if (!(a.norm() < 1.0)) throw ParameterError("model drift |a| must be < 1");
  if (!(alpha < 2.0)) throw ParameterError("model alpha must be < 2");
  if (!(c_bessel > -1.0)) throw ParameterError("model Bessel constant must be > -1");
  if (!(scale > 0.0)) throw ParameterError("model scale must be positive");
  space().validate();
}

OperatorSpec ModelParams::as_operator() const { return OperatorSpec::model(a, alpha, c_bessel); }

WindowReport validate_window(const OperatorSpec& spec, const SpaceSpec& space) {
  WindowReport r;
  r.ratio = (space.m + 1.0) / space.p;
  r.lower = std::max(-spec.alpha1, 0.0);
  r.upper = spec.drift_c / spec.gamma + 1.0 - spec.alpha2;
  r.lower_margin = r.ratio - r.lower;
  r.upper_margin = r.upper - r.ratio;
  r.pass = r.lower < r.ratio && r.ratio < r.upper;
  return r;
}

WindowReport validate_window(const ModelParams& model) {
  return validate_window(model.as_operator(), model.space());
}

BetaImage beta_map(double beta, double alpha1, double alpha2, double c, double m, double /*p*/) {
  if (beta == -1.0) throw ParameterError("beta = -1 is not an admissible power substitution");
  const double k = beta + 1.0;
  return {alpha1 / k, (alpha2 + 2.0 * beta) / k, (c + beta) / k, (m - beta) / k};
}

double inverse_beta(double beta) {
  if (beta == -1.0) throw ParameterError("beta = -1 is not invertible");
  return -beta / (beta + 1.0);
}

double compose_beta(double beta1, double beta2) { return (beta1 + 1.0) * (beta2 + 1.0) - 1.0; }

double min_block_eigenvalue(const OperatorSpec& spec) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.block_matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

OperatorSpec shear_map(const OperatorSpec& spec) {
  const int n = spec.dimension();
  const bool has_b = n > 0 && spec.drift_b.cwiseAbs().maxCoeff() != 0.0;
  if (!has_b) return spec;
  if (spec.drift_c == 0.0) throw ParameterError("shear needs drift_c != 0 when drift_b != 0");
  const Eigen::VectorXd s = spec.drift_b / spec.drift_c;
  OperatorSpec out = spec;
  out.Q = spec.Q - (s * spec.q.transpose() + spec.q * s.transpose()) + spec.gamma * s * s.transpose();
  out.q = spec.q - spec.gamma * s;
  out.drift_b = Eigen::VectorXd::Zero(n);
  if (!(min_block_eigenvalue(out) > 0.0))
    throw std::logic_error("shear_map produced a non-elliptic block matrix");
  return out;
}

Reduction reduce_to_model(const OperatorSpec& spec, const SpaceSpec& space) {
  spec.validate();
  space.validate();
  const WindowReport w = validate_window(spec, space);
  if (!w.pass)
    throw ParameterError("window violated: need " + fmt(w.lower) + " < (m+1)/p = " + fmt(w.ratio) +
                         " < " + fmt(w.upper));

  const int n = spec.dimension();
  Reduction red;
  red.chain.source_p = space.p;
  red.chain.source_m = space.m;

  OperatorSpec s = spec;
  if (n > 0 && spec.drift_b.cwiseAbs().maxCoeff() != 0.0) {
    if (spec.alpha1 != spec.alpha2)
      throw ParameterError("oblique drift with alpha1 != alpha2 cannot be sheared to the model form");
    s = shear_map(spec);
    TransformStep st;
    st.kind = TransformKind::shear;
    st.shear_b = spec.drift_b;
    st.shear_c = spec.drift_c;
    red.chain.steps.push_back(st);
  }

  const double g = s.gamma;
  const Eigen::MatrixXd Qg = s.Q / g;
  const Eigen::VectorXd qg = s.q / g;
  const double cg = s.drift_c / g;

  // x = A x' with A A^T = Q/gamma.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  if (n > 0 && !Qg.isIdentity(0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Qg);
    Eigen::MatrixXd V = es.eigenvectors();
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (V(i, j) != 0.0) {
          if (V(i, j) < 0.0) V.col(j) = -V.col(j);
          break;
        }
      }
    }
    const Eigen::VectorXd ev = es.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) throw ParameterError("Q/gamma is not positive definite after shear");
    A = V * ev.cwiseSqrt().asDiagonal();
  }
  const Eigen::VectorXd a = n > 0 ? Eigen::VectorXd(A.inverse() * qg) : Eigen::VectorXd();
  if (n > 0 && !(a.norm() < 1.0))
    throw ParameterError("reduced drift |a| >= 1: intermediate operator is not elliptic");

  const double beta = 0.5 * (s.alpha1 - s.alpha2);
  const double k = beta + 1.0;
  const BetaImage bm = beta_map(beta, s.alpha1, s.alpha2, cg, space.m, space.p);
  if (beta != 0.0) {
    TransformStep st;
    st.kind = TransformKind::power;
    st.beta = beta;
    st.p = space.p;
    red.chain.steps.push_back(st);
  }
  const Eigen::MatrixXd Ak = A / k;
  if (n > 0 && !Ak.isIdentity(0.0)) {
    TransformStep st;
    st.kind = TransformKind::linear_x;
    st.matrix = Ak;
    red.chain.steps.push_back(st);
  }

  red.model.a = a;
  red.model.alpha = bm.alpha1;
  red.model.c_bessel = bm.c;
  red.model.m = bm.m;
  red.model.p = space.p;
  red.model.scale = g * k * k;
  red.chain.target_p = space.p;
  red.chain.target_m = bm.m;
  red.model.validate();
  return red;
}

}  // namespace degpar
