#include "gnar/serialize.hpp"

#include "gnar/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gnar {

std::string kind_label(CoefKind kind) {
  switch (kind) {
    case CoefKind::Alpha: return "alpha";
    case CoefKind::Beta: return "beta";
    case CoefKind::Gamma: return "gamma";
  }
  return {};
}

json model_to_json(const ModelOrder& order, const ParameterVector* theta) {
  json doc;
  doc["layout_version"] = kLayoutVersion;
  doc["tie_neighbourhood"] = order.tie_neighbourhood;
  json comms = json::array();
  for (const auto& co : order.communities) {
    json c;
    c["p"] = co.p;
    c["s"] = co.s;
    json inter = json::array();
    for (int ct : co.interactions) inter.push_back(ct + 1);
    c["interactions"] = inter;
    if (!co.own_neighbourhood) c["own_neighbourhood"] = false;
    comms.push_back(c);
  }
  doc["communities"] = comms;
  if (theta) doc["theta"] = std::vector<double>(theta->data(), theta->data() + theta->size());
  return doc;
}

ModelSpec model_from_json(const json& doc) {
  try {
    if (doc.contains("layout_version") && doc.at("layout_version").get<int>() != kLayoutVersion)
      throw ValidationError("unsupported layout version " + doc.at("layout_version").dump());
    ModelSpec spec;
    spec.order.tie_neighbourhood = doc.value("tie_neighbourhood", false);
    for (const auto& c : doc.at("communities")) {
      CommunityOrder co;
      co.p = c.at("p").get<int>();
      co.s = c.at("s").get<std::vector<int>>();
      for (int ct : c.value("interactions", std::vector<int>{})) co.interactions.push_back(ct - 1);
      co.own_neighbourhood = c.value("own_neighbourhood", true);
      spec.order.communities.push_back(std::move(co));
    }
    spec.order.validate();
    if (doc.contains("theta")) {
      const auto v = doc.at("theta").get<std::vector<double>>();
      spec.theta = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      check_theta(spec.order, *spec.theta);
    }
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model document: ") + e.what());
  }
}

json fit_to_json(const FitResult& fit) {
  const ParamLayout layout(fit.order);
  json coefs = json::array();
  for (std::size_t m = 0; m < fit.param_indices.size(); ++m) {
    const Coordinate& co = layout.representative(fit.param_indices[m]);
    json c;
    c["name"] = fit.names[m];
    c["kind"] = kind_label(co.kind);
    c["k"] = co.lag;
    c["r"] = co.stage;
    c["c"] = co.community + 1;
    c["c_tilde"] = co.kind == CoefKind::Gamma ? json(co.other + 1) : json(nullptr);
    c["estimate"] = fit.theta(m);
    c["se"] = fit.se(m);
    c["t"] = fit.t_values(m);
    coefs.push_back(c);
  }
  json doc;
  doc["model"] = model_to_json(fit.order);
  doc["coefficients"] = coefs;
  doc["sigma2"] = fit.sigma2;
  doc["sigma2_df"] = std::isfinite(fit.sigma2_df) ? json(fit.sigma2_df) : json(nullptr);
  doc["sigma2_cells"] = fit.sigma2_cells;
  doc["sigma_convention"] = fit.convention == SigmaConvention::DegreesOfFreedom ? "degrees_of_freedom" : "cell_count";
  doc["rows"] = fit.rows;
  doc["condition_number"] = fit.condition_number;
  doc["regularized"] = fit.regularized;
  doc["warnings"] = fit.warnings;
  return doc;
}

std::string coefficient_table(const FitResult& fit, int precision) {
  std::ostringstream os;
  std::size_t width = 11;
  for (const auto& n : fit.names) width = std::max(width, n.size());
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-*s %10s %10s %9s\n", static_cast<int>(width), "Coefficient", "Estimate",
                "Std.Error", "t value");
  os << buf;
  for (std::size_t m = 0; m < fit.names.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%-*s %10.*f %10.*f %9.2f\n", static_cast<int>(width), fit.names[m].c_str(),
                  precision, fit.theta(m), precision, fit.se(m), fit.t_values(m));
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "sigma^2 = %.*f (rows = %ld)\n", precision + 1, fit.sigma2,
                static_cast<long>(fit.rows));
  os << buf;
  return os.str();
}

json bound_to_json(const BoundReport& br) {
  json doc;
  doc["tau"] = br.tau;
  doc["tau_c"] = br.tau_c;
  doc["gamma"] = br.gamma;
  doc["q_max"] = br.q_max;
  doc["q_total"] = br.q_total;
  doc["C"] = br.C;
  doc["K_min"] = br.K_min;
  doc["p"] = br.p;
  doc["T"] = br.T;
  doc["sigma_u"] = br.sigma_u;
  doc["delta"] = br.delta;
  doc["probabilistic_bound"] = br.probabilistic_bound;
  doc["probability_floor"] = br.probability_floor;
  doc["rtu_inf"] = br.rtu_inf ? json(*br.rtu_inf) : json(nullptr);
  doc["deterministic_bound"] = br.deterministic_bound ? json(*br.deterministic_bound) : json(nullptr);
  doc["warnings"] = br.warnings;
  return doc;
}

json stationarity_to_json(const SufficientReport& s, const CompanionReport* companion) {
  json doc;
  doc["sufficient"] = {{"community_sums", s.community_sums}, {"margin", s.margin}, {"pass", s.pass}};
  if (companion && companion->evaluated)
    doc["companion"] = {{"evaluated", true}, {"spectral_radius", companion->spectral_radius},
                        {"pass", companion->pass}};
  else
    doc["companion"] = {{"evaluated", false}, {"reason", "not evaluated: needs static weights and a network"}};
  return doc;
}

}  // namespace gnar
