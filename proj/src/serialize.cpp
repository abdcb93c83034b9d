#include "fracparts/serialize.hpp"

#include <openssl/evp.h>

#include <iomanip>
#include <sstream>

namespace fracparts {

Json real_to_json(const Real& v) { return v.to_string(); }

Real real_from_json(const Json& j, const std::string& field, int precision_bits) {
  try {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s.rfind("ball(", 0) == 0) return Real::from_string(s);
      return Real::parse(s, precision_bits);
    }
    if (j.is_number_integer()) return Real(j.get<long>());
    if (j.is_number()) return Real::parse(j.dump(), precision_bits);
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + e.what());
  }
  throw ParseError(field + ": expected a number or numeric string");
}

Json int_to_json(const mpz_class& z) { return z.get_str(); }

mpz_class int_from_json(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return mpz_class(j.get<long>());
  if (j.is_string()) {
    mpz_class z;
    if (z.set_str(j.get<std::string>(), 10) == 0) return z;
  }
  throw ParseError(field + ": expected an integer");
}

Json matrix_to_json(const IntMatrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(int_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

IntMatrix int_matrix_from_json(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field + ": expected an array of rows");
  const std::size_t rows = j.size(), cols = rows ? j[0].size() : 0;
  IntMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ParseError(field + ": ragged matrix");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = int_from_json(j[r][c], field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

Json system_to_json(const PolySystem& s) {
  Json polys = Json::array();
  for (const auto& p : s.polys) {
    Json row = Json::array();
    for (const auto& c : p.coeffs) row.push_back(real_to_json(c));
    polys.push_back(row);
  }
  return Json{{"d", s.d}, {"polys", polys}};
}

PolySystem system_from_json(const Json& j, int precision_bits) {
  if (!j.is_object()) throw ParseError("system: expected an object");
  if (!j.contains("d") || !j["d"].is_number_integer()) throw ParseError("d: missing or not an integer");
  PolySystem s;
  s.d = j["d"].get<int>();
  if (s.d < 1) throw ParseError("d: must be at least 1 (no constant terms)");
  if (!j.contains("polys") || !j["polys"].is_array() || j["polys"].empty())
    throw ParseError("polys: expected a nonempty array");
  for (std::size_t i = 0; i < j["polys"].size(); ++i) {
    const auto& row = j["polys"][i];
    std::string f = "polys[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != static_cast<std::size_t>(s.d))
      throw ParseError(f + ": expected " + std::to_string(s.d) + " coefficients");
    Poly p;
    for (std::size_t c = 0; c < row.size(); ++c)
      p.coeffs.push_back(real_from_json(row[c], f + "[" + std::to_string(c) + "]", precision_bits));
    s.polys.push_back(std::move(p));
  }
  return s;
}

Json eps_to_json(const Epsilons& e) {
  Json out = Json::array();
  for (const auto& v : e.values()) out.push_back(real_to_json(v));
  return out;
}

Json state_to_json(const SystemState& s) {
  Json j = system_to_json(s.system);
  j["eps"] = eps_to_json(s.eps);
  j["x"] = real_to_json(s.y);
  return j;
}

SystemState state_from_json(const Json& j, int precision_bits) {
  SystemState st;
  st.system = system_from_json(j, precision_bits);
  if (!j.contains("eps") || !j["eps"].is_array()) throw ParseError("eps: missing or not an array");
  if (j["eps"].size() != st.system.k()) throw ParseError("eps: expected one entry per polynomial");
  std::vector<Real> eps;
  for (std::size_t i = 0; i < j["eps"].size(); ++i)
    eps.push_back(real_from_json(j["eps"][i], "eps[" + std::to_string(i) + "]", precision_bits));
  try {
    st.eps = Epsilons(eps);
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("eps: ") + e.what());
  }
  if (!j.contains("x")) throw ParseError("x: missing");
  st.y = real_from_json(j["x"], "x", precision_bits);
  if (!st.y.certainly_positive()) throw ParseError("x: must be positive");
  return st;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string digest(const Json& j) { return sha256_hex(j.dump()); }

std::string state_digest(const SystemState& s) { return digest(state_to_json(s)); }

}  // namespace fracparts
