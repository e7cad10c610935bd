#include "qloop/json_io.hpp"

namespace qloop {

using nlohmann::json;

json complex_json(cplx v) { return json::array({v.real(), v.imag()}); }

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json report_json(const Report& r) {
  json out = json::array();
  for (const auto& e : r.entries)
    out.push_back({{"check", e.check},
                   {"location", e.location},
                   {"value", e.value},
                   {"tol", e.tol},
                   {"expect_above", e.expect_above},
                   {"pass", e.pass()}});
  return out;
}

json params_json(const AngleDictionary& dict) {
  return {{"q", complex_json(dict.q)}, {"nu", dict.nu},          {"alpha", dict.alpha},
          {"ell", dict.ell},           {"z", complex_json(dict.z())}, {"w", complex_json(dict.w())},
          {"r", complex_json(dict.r)}, {"xi", complex_json(dict.xi)}};
}

json edge_json(const Domain& d, int edge) {
  const Edge& e = d.edges.at(edge);
  if (d.geom == Geometry::LightCone) return json::array({e.lc_x, e.lc_t});
  return json::array({e.x(), e.t()});
}

json observables_json(const Domain& d, const AngleDictionary& dict, const std::vector<ObservableField>& fields,
                      const Report& residuals) {
  json fs = json::array();
  for (const auto& f : fields)
    for (const auto& [edge, v] : f.values)
      fs.push_back({{"kind", obs_kind_name(f.kind)},
                    {"edge", edge_json(d, edge)},
                    {"value", complex_json(v)},
                    {"method", method_name(f.method)}});
  return {{"model", model_name(d.model)},
          {"geometry", geometry_name(d.geom)},
          {"size", json::array({d.L, d.M})},
          {"params", params_json(dict)},
          {"fields", fs},
          {"residuals", report_json(residuals)}};
}

}  // namespace qloop
