#pragma once

// io.hpp
// JSON (de)serialization for all public types and the problem-document
// format. Complex numbers are two-element arrays [re, im]; root index pairs
// are 1-based in files (alpha_ij <-> [i, j]).

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wildstokes/common.hpp"
#include "wildstokes/dualpoisson.hpp"
#include "wildstokes/isoflow.hpp"
#include "wildstokes/kmgraphs.hpp"
#include "wildstokes/liecore.hpp"
#include "wildstokes/numap.hpp"
#include "wildstokes/stokescomb.hpp"

namespace wildstokes::io {

using nlohmann::json;

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw malformed_input_error("complex values must be [re, im] arrays");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json to_json(const liecore::ComplexVector& v) {
  json out = json::array();
  for (long k = 0; k < v.size(); ++k) out.push_back(to_json(v[k]));
  return out;
}

inline json to_json(const std::vector<Complex>& v) {
  json out = json::array();
  for (const Complex& z : v) out.push_back(to_json(z));
  return out;
}

inline liecore::ComplexVector complex_vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw malformed_input_error("expected a nonempty array");
  liecore::ComplexVector v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<long>(k)] = complex_from_json(j[k]);
  return v;
}

inline json to_json(const liecore::ComplexMatrix& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline liecore::ComplexMatrix complex_matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw malformed_input_error("expected a matrix (array of rows)");
  const long n = static_cast<long>(j.size());
  liecore::ComplexMatrix m(n, n);
  for (long i = 0; i < n; ++i) {
    if (!j[i].is_array() || static_cast<long>(j[i].size()) != n)
      throw malformed_input_error("matrix must be square with equal-length rows");
    for (long c = 0; c < n; ++c) m(i, c) = complex_from_json(j[i][c]);
  }
  return m;
}

inline json to_json(const liecore::CartanElement& a) { return to_json(a.diag); }

inline liecore::CartanElement cartan_from_json(const json& j) {
  return liecore::CartanElement(complex_vector_from_json(j));
}

inline json to_json(const stokescomb::Root& r) { return json::array({r.i + 1, r.j + 1}); }

inline json to_json(const stokescomb::SingularDirection& d) {
  json supports = json::array();
  for (const auto& r : d.support) supports.push_back(to_json(r));
  return json{{"angle", d.angle}, {"support", supports}};
}

inline json to_json(const std::vector<stokescomb::SingularDirection>& dirs) {
  json out = json::array();
  for (const auto& d : dirs) out.push_back(to_json(d));
  return out;
}

inline json to_json(const dualpoisson::DualGroupElement& g) {
  return json{{"b_minus", to_json(g.b_minus)},
              {"b_plus", to_json(g.b_plus)},
              {"lambda", to_json(g.lambda)},
              {"basis", g.basis}};
}

inline json to_json(const numap::NuResult& result, const numap::Precision& precision) {
  json factors = json::array();
  for (int k = 0; k < result.sectors.count(); ++k)
    factors.push_back(json{{"direction", to_json(result.sectors.directions[k])},
                           {"matrix", to_json(result.bundle.factors[k])}});
  json diag_factors = json::array();
  for (const auto& fd : result.diagnostics.factors)
    diag_factors.push_back(json{{"direction", fd.direction},
                                {"off_support", fd.off_support},
                                {"diagonal_defect", fd.diagonal_defect}});
  return json{
      {"directions", to_json(result.sectors.directions)},
      {"base_sector", result.base_sector},
      {"lambda", to_json(result.bundle.lambda)},
      {"factors", factors},
      {"element", to_json(result.element)},
      {"spectrum_b", to_json(result.spectrum_b)},
      {"spectrum_product", to_json(result.spectrum_product)},
      {"diagnostics",
       {{"matching_radius", result.diagnostics.matching_radius},
        {"truncation_order", result.diagnostics.truncation_order},
        {"series_residual", result.diagnostics.series_residual},
        {"max_off_support", result.diagnostics.max_off_support},
        {"ode_steps", result.diagnostics.ode_steps},
        {"factors", diag_factors}}},
      {"precision",
       {{"series_order", precision.series_order},
        {"matching_radius", precision.matching_radius},
        {"ode_rel_tol", precision.ode_rel_tol},
        {"support_tol", precision.support_tol}}}};
}

inline numap::Precision precision_from_json(const json& j) {
  numap::Precision p;
  if (!j.is_object()) return p;
  if (j.contains("series_order")) p.series_order = j["series_order"].get<int>();
  if (j.contains("matching_radius")) p.matching_radius = j["matching_radius"].get<double>();
  if (j.contains("ode_rel_tol")) p.ode_rel_tol = j["ode_rel_tol"].get<double>();
  if (j.contains("support_tol")) p.support_tol = j["support_tol"].get<double>();
  return p;
}

inline numap::ConnectionProblem problem_from_json(const json& j) {
  if (!j.is_object() || !j.contains("a0") || !j.contains("b"))
    throw malformed_input_error("connection problem needs fields 'a0' and 'b'");
  numap::ConnectionProblem problem;
  problem.a0 = cartan_from_json(j["a0"]);
  problem.b = complex_matrix_from_json(j["b"]);
  if (j.contains("precision")) problem.precision = precision_from_json(j["precision"]);
  return problem;
}

inline isoflow::PathSpec path_from_json(const json& j) {
  if (!j.is_object() || !j.contains("waypoints"))
    throw malformed_input_error("path needs field 'waypoints'");
  isoflow::PathSpec path;
  for (const auto& w : j["waypoints"]) path.waypoints.push_back(cartan_from_json(w));
  if (j.contains("wall_clearance")) path.wall_clearance = j["wall_clearance"].get<double>();
  return path;
}

// ---------------------------------------------------------------------------
// Problem documents
// ---------------------------------------------------------------------------

inline const char* kSchemaVersion = "1";

struct ProblemDocument {
  std::string task;
  json payload;
  std::uint64_t seed = 0;
};

inline ProblemDocument document_from_json(const json& j) {
  if (!j.is_object()) throw malformed_input_error("problem document must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_string() ||
      j["schema_version"].get<std::string>() != kSchemaVersion)
    throw malformed_input_error("unsupported or missing schema_version (expected \"1\")");
  if (!j.contains("task") || !j["task"].is_string())
    throw malformed_input_error("problem document needs a string 'task'");
  ProblemDocument doc;
  doc.task = j["task"].get<std::string>();
  doc.payload = j.contains("payload") ? j["payload"] : json::object();
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw malformed_input_error("seed must be an integer");
    doc.seed = j["seed"].get<std::uint64_t>();
  }
  return doc;
}

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open input file: " + path.string());
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw malformed_input_error("malformed JSON in " + path.string());
  return j;
}

/// Atomic write: temp file in the target directory, then rename.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open output file: " + tmp.string());
    out << contents;
    if (!out) throw io_error("failed writing output file: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error("failed to move output into place: " + ec.message());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

} // namespace wildstokes::io
