#pragma once
#include <json.hpp>
#include <vector>

#include "qloop/currents.hpp"
#include "qloop/report.hpp"

namespace qloop {

nlohmann::json complex_json(cplx v);
nlohmann::json matrix_json(const CMatrix& m);
nlohmann::json report_json(const Report& r);
nlohmann::json params_json(const AngleDictionary& dict);
// Edge coordinate [x, t]: light-cone site and slice, grid midpoint coordinates.
nlohmann::json edge_json(const Domain& d, int edge);

// {model, geometry, params, fields: [{kind, edge, value, method}], residuals}
nlohmann::json observables_json(const Domain& d, const AngleDictionary& dict,
                                const std::vector<ObservableField>& fields, const Report& residuals);

}  // namespace qloop
