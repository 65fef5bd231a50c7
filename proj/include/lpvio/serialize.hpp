#pragma once

#include <nlohmann/json.hpp>

#include "lpvio/ident.hpp"

namespace lpvio {

/// Coefficient function: {"variant": "affine"|"polynomial"|"mlp", shape
/// fields, "phi": [...]}.
nlohmann::json coeff_to_json(const CoefficientFunction& f);
CoefficientFunction coeff_from_json(const nlohmann::json& j);

/// Stable model: {"kind":"stable","structure":{...},"xw":{"d":[],"off":[]},
/// "net":{...}} plus the cached certificate for audit.
nlohmann::json model_to_json(const StableLpvIoModel& m);

/// Plain model: {"kind":"plain","structure":{...},"coeffs":{...}}.
nlohmann::json model_to_json(const LpvIoModel& m);

StableLpvIoModel stable_model_from_json(const nlohmann::json& j);
LpvIoModel io_model_from_json(const nlohmann::json& j);

/// Dispatches on "kind".
IdentModel any_model_from_json(const nlohmann::json& j);

nlohmann::json ident_result_to_json(const IdentResult& r);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const nlohmann::json& j, const std::string& path);

}  // namespace lpvio
