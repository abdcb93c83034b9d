#pragma once

#include <string>

#include <json.hpp>

#include "fracparts/core.hpp"
#include "fracparts/matrix.hpp"

namespace fracparts {

using Json = nlohmann::json;

/// Canonical text form ("p/q" or "ball(mid,rad,prec)").
Json real_to_json(const Real& v);
/// Accepts the canonical form, the coefficient grammar, or a JSON number.
Real real_from_json(const Json& j, const std::string& field, int precision_bits = kDefaultPrecisionBits);

Json int_to_json(const mpz_class& z);
mpz_class int_from_json(const Json& j, const std::string& field);

Json matrix_to_json(const IntMatrix& m);
IntMatrix int_matrix_from_json(const Json& j, const std::string& field);

Json system_to_json(const PolySystem& s);
PolySystem system_from_json(const Json& j, int precision_bits = kDefaultPrecisionBits);

Json eps_to_json(const Epsilons& e);

/// {"d", "polys", "eps", "x"}; parse rejects d < 1, ragged rows and eps
/// outside (0, 1/2] with a ParseError naming the field.
Json state_to_json(const SystemState& s);
SystemState state_from_json(const Json& j, int precision_bits = kDefaultPrecisionBits);

/// Hex SHA-256 of the compact dump (object keys are kept sorted).
std::string sha256_hex(const std::string& bytes);
std::string digest(const Json& j);
std::string state_digest(const SystemState& s);

}  // namespace fracparts
