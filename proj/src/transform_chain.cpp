#include "degpar/transform_chain.hpp"

#include <json.hpp>

#include <stdexcept>

namespace degpar {

using nlohmann::json;

std::string to_string(TransformKind kind) {
  switch (kind) {
    case TransformKind::shear: return "shear";
    case TransformKind::linear_x: return "linear_x";
    case TransformKind::power: return "power";
    case TransformKind::phase: return "phase";
  }
  return "unknown";
}

namespace {

TransformKind kind_from_string(const std::string& s) {
  if (s == "shear") return TransformKind::shear;
  if (s == "linear_x") return TransformKind::linear_x;
  if (s == "power") return TransformKind::power;
  if (s == "phase") return TransformKind::phase;
  throw std::invalid_argument("unknown transform kind: " + s);
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string TransformChain::to_json() const {
  json steps_json = json::array();
  for (const auto& st : steps) {
    json s;
    s["kind"] = to_string(st.kind);
    switch (st.kind) {
      case TransformKind::shear:
        s["b"] = vec_json(st.shear_b);
        s["c"] = st.shear_c;
        break;
      case TransformKind::linear_x: {
        json rows = json::array();
        for (Eigen::Index i = 0; i < st.matrix.rows(); ++i) rows.push_back(vec_json(st.matrix.row(i).transpose()));
        s["matrix"] = rows;
        break;
      }
      case TransformKind::power:
        s["beta"] = st.beta;
        s["p"] = st.p;
        break;
      case TransformKind::phase:
        s["a_dot_xi"] = st.a_dot_xi;
        s["alpha"] = st.alpha;
        break;
    }
    steps_json.push_back(s);
  }
  json j;
  j["steps"] = steps_json;
  j["source"] = {{"p", source_p}, {"m", source_m}};
  j["target"] = {{"p", target_p}, {"m", target_m}};
  return j.dump(2);
}

TransformChain TransformChain::from_json(const std::string& text) {
  const json j = json::parse(text);
  TransformChain c;
  c.source_p = j.at("source").at("p").get<double>();
  c.source_m = j.at("source").at("m").get<double>();
  c.target_p = j.at("target").at("p").get<double>();
  c.target_m = j.at("target").at("m").get<double>();
  for (const auto& s : j.at("steps")) {
    TransformStep st;
    st.kind = kind_from_string(s.at("kind").get<std::string>());
    switch (st.kind) {
      case TransformKind::shear:
        st.shear_b = json_vec(s.at("b"));
        st.shear_c = s.at("c").get<double>();
        break;
      case TransformKind::linear_x: {
        const auto& rows = s.at("matrix");
        const auto n = static_cast<Eigen::Index>(rows.size());
        st.matrix.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) st.matrix.row(i) = json_vec(rows[i]).transpose();
        break;
      }
      case TransformKind::power:
        st.beta = s.at("beta").get<double>();
        st.p = s.at("p").get<double>();
        break;
      case TransformKind::phase:
        st.a_dot_xi = s.at("a_dot_xi").get<double>();
        st.alpha = s.at("alpha").get<double>();
        break;
    }
    c.steps.push_back(st);
  }
  return c;
}

}  // namespace degpar
