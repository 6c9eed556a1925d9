#pragma once

#include "gnar/fit.hpp"
#include "gnar/model_order.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace gnar {

using json = nlohmann::json;

struct ModelSpec {
  ModelOrder order;
  std::optional<ParameterVector> theta;
};

// Community ids are 1-based in documents.
json model_to_json(const ModelOrder& order, const ParameterVector* theta = nullptr);
ModelSpec model_from_json(const json& doc);

json fit_to_json(const FitResult& fit);
// Estimate, standard error and t value per coefficient.
std::string coefficient_table(const FitResult& fit, int precision = 3);

json bound_to_json(const BoundReport& report);
json stationarity_to_json(const SufficientReport& sufficient, const CompanionReport* companion);

std::string kind_label(CoefKind kind);

}  // namespace gnar
