// wildstokes.cpp
// Batch front end: problem-file ingestion, subcommand dispatch, diagnostics
// and SVG emission. One document per invocation; outputs are deterministic
// for identical (document, seed) pairs and written atomically.
//
// Exit codes: 0 success, 1 precision/validation failure, 2 malformed input.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "wildstokes/curves.hpp"
#include "wildstokes/io.hpp"
#include "wildstokes/isoflow.hpp"
#include "wildstokes/kmgraphs.hpp"
#include "wildstokes/numap.hpp"
#include "wildstokes/selftest.hpp"
#include "wildstokes/springer.hpp"
#include "wildstokes/svg.hpp"

namespace ws = wildstokes;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPrecision = 1;
constexpr int kExitMalformed = 2;

void deliver(const json& out, const std::string& output_path) {
  if (output_path.empty())
    std::cout << out.dump(2) << "\n";
  else
    ws::io::write_json_file(output_path, out);
}

/// Load --input as either a bare payload or a full problem document; when a
/// document is given its task must match the subcommand.
json load_payload(const std::string& path, const std::string& expected_task,
                  std::uint64_t* seed_out) {
  json j = ws::io::load_json_file(path);
  if (j.is_object() && j.contains("task")) {
    ws::io::ProblemDocument doc = ws::io::document_from_json(j);
    if (doc.task != expected_task)
      throw ws::malformed_input_error("document task '" + doc.task + "' does not match subcommand '" +
                                      expected_task + "'");
    if (seed_out) *seed_out = doc.seed;
    return doc.payload;
  }
  return j;
}

std::vector<long> parse_int_list(const std::string& text) {
  std::vector<long> out;
  std::string token;
  for (char c : text + ",") {
    if (c == ',' || c == ' ') {
      if (!token.empty()) {
        try {
          out.push_back(std::stol(token));
        } catch (...) {
          throw ws::malformed_input_error("expected a comma-separated integer list, got '" + text + "'");
        }
        token.clear();
      }
    } else {
      token += c;
    }
  }
  if (out.empty()) throw ws::malformed_input_error("empty integer list");
  return out;
}

int run_directions(const std::string& input, const std::string& output, const std::string& svg_path,
                   double tol_angle) {
  std::uint64_t seed = 0;
  json payload = load_payload(input, "directions", &seed);
  if (!payload.contains("a0")) throw ws::malformed_input_error("directions payload needs 'a0'");
  ws::liecore::CartanElement a0 = ws::io::cartan_from_json(payload["a0"]);
  auto dirs = ws::stokescomb::singular_directions(a0, tol_angle);

  json out{{"schema_version", ws::io::kSchemaVersion},
           {"task", "directions"},
           {"tol_angle", tol_angle},
           {"directions", ws::io::to_json(dirs)},
           {"direction_count", dirs.size()}};
  if (!svg_path.empty()) ws::svg::emit_stokes_svg(dirs, svg_path);
  deliver(out, output);
  return kExitOk;
}

int run_nu(const std::string& input, const std::string& output, const std::string& svg_path) {
  std::uint64_t seed = 0;
  json payload = load_payload(input, "nu", &seed);
  ws::numap::ConnectionProblem problem = ws::io::problem_from_json(payload);
  int base_sector = payload.contains("base_sector") ? payload["base_sector"].get<int>() : 0;

  ws::numap::NuResult result = ws::numap::nu(problem, base_sector);
  json out = ws::io::to_json(result, problem.precision);
  out["schema_version"] = ws::io::kSchemaVersion;
  out["task"] = "nu";
  if (!svg_path.empty()) ws::svg::emit_stokes_svg(result.sectors.directions, svg_path);
  deliver(out, output);
  return kExitOk;
}

int run_flow(const std::string& input, const std::string& path_file, const std::string& b0_file,
             const std::string& output, double tol) {
  ws::isoflow::PathSpec path;
  ws::liecore::ComplexMatrix b0;
  if (!input.empty()) {
    std::uint64_t seed = 0;
    json payload = load_payload(input, "flow", &seed);
    if (!payload.contains("path") || !payload.contains("b0"))
      throw ws::malformed_input_error("flow payload needs 'path' and 'b0'");
    path = ws::io::path_from_json(payload["path"]);
    b0 = ws::io::complex_matrix_from_json(payload["b0"]);
  } else {
    if (path_file.empty() || b0_file.empty())
      throw ws::malformed_input_error("flow needs --input or both --path and --b0");
    path = ws::io::path_from_json(ws::io::load_json_file(path_file));
    b0 = ws::io::complex_matrix_from_json(ws::io::load_json_file(b0_file));
  }
  ws::isoflow::FlowResult flow = ws::isoflow::integrate_flow(path, b0, tol);
  json out{{"schema_version", ws::io::kSchemaVersion},
           {"task", "flow"},
           {"tol", tol},
           {"b_final", ws::io::to_json(flow.b_final)},
           {"conservation",
            {{"max_spectrum_drift", flow.max_spectrum_drift},
             {"max_diag_drift", flow.max_diag_drift},
             {"min_wall_clearance", flow.min_clearance},
             {"steps", flow.steps}}}};
  deliver(out, output);
  return kExitOk;
}

int run_braid(const std::string& input, const std::string& loop_file, const std::string& b0_file,
              const std::string& output, double tol) {
  ws::isoflow::PathSpec loop;
  ws::liecore::ComplexMatrix b0;
  if (!input.empty()) {
    std::uint64_t seed = 0;
    json payload = load_payload(input, "braid", &seed);
    if (!payload.contains("loop") || !payload.contains("b0"))
      throw ws::malformed_input_error("braid payload needs 'loop' and 'b0'");
    loop = ws::io::path_from_json(payload["loop"]);
    b0 = ws::io::complex_matrix_from_json(payload["b0"]);
  } else {
    if (loop_file.empty() || b0_file.empty())
      throw ws::malformed_input_error("braid needs --input or both --loop and --b0");
    loop = ws::io::path_from_json(ws::io::load_json_file(loop_file));
    b0 = ws::io::complex_matrix_from_json(ws::io::load_json_file(b0_file));
  }
  auto invariants_before = ws::liecore::elementary_symmetric_spectrum(b0);
  ws::isoflow::FlowResult flow = ws::isoflow::integrate_flow(loop, b0, tol);
  if (!loop.closed()) throw ws::malformed_input_error("braid loop must be closed");
  auto invariants_after = ws::liecore::elementary_symmetric_spectrum(flow.b_final);
  double moved = (flow.b_final - b0).cwiseAbs().maxCoeff();
  json out{{"schema_version", ws::io::kSchemaVersion},
           {"task", "braid"},
           {"tol", tol},
           {"b_final", ws::io::to_json(flow.b_final)},
           {"displacement", moved},
           {"invariants_before", ws::io::to_json(invariants_before)},
           {"invariants_after", ws::io::to_json(invariants_after)},
           {"conservation",
            {{"max_spectrum_drift", flow.max_spectrum_drift},
             {"max_diag_drift", flow.max_diag_drift},
             {"steps", flow.steps}}}};
  deliver(out, output);
  return kExitOk;
}

json graph_to_json(const ws::kmgraphs::CompleteMultipartiteGraph& g) {
  json adj = json::array();
  for (int a = 0; a < g.graph.n; ++a)
    for (int b = a + 1; b < g.graph.n; ++b)
      if (g.graph.adj[a][b]) adj.push_back(json::array({a, b}));
  return json{{"parts", g.partition.parts},
              {"vertices", g.graph.n},
              {"edges", adj},
              {"painleve", ws::kmgraphs::to_string(ws::kmgraphs::painleve_recognize(g))}};
}

int run_graphs(int enumerate_n, bool exclude_stars, bool exclude_discrete, bool with_cartan,
               const std::string& classify, const std::string& partition_text,
               const std::string& output) {
  using namespace ws::kmgraphs;
  json out{{"schema_version", ws::io::kSchemaVersion}, {"task", "graphs"}};

  std::optional<CompleteMultipartiteGraph> base_graph;
  if (!partition_text.empty()) {
    std::vector<int> parts;
    for (long v : parse_int_list(partition_text)) parts.push_back(static_cast<int>(v));
    std::sort(parts.begin(), parts.end(), std::greater<int>());
    base_graph = graph_from_partition(Partition(parts));
    out["graph"] = graph_to_json(*base_graph);
  }

  if (enumerate_n > 0) {
    auto graphs = enumerate_graphs(enumerate_n, exclude_stars, exclude_discrete);
    json list = json::array();
    for (const auto& g : graphs) {
      json item = graph_to_json(g);
      if (with_cartan) item["cartan"] = cartan_matrix(g).c;
      list.push_back(item);
    }
    out["enumerated"] = list;
    out["count"] = graphs.size();
  }

  if (with_cartan && base_graph) out["cartan"] = cartan_matrix(*base_graph).c;

  if (!classify.empty()) {
    if (!base_graph)
      throw ws::malformed_input_error("--classify needs --partition to fix the graph");
    IntVector v;
    for (long x : parse_int_list(classify)) v.push_back(x);
    RootClass cls = root_classify(v, *base_graph);
    const char* name = cls == RootClass::real_root      ? "real_root"
                       : cls == RootClass::imaginary_root ? "imaginary_root"
                                                          : "not_root";
    out["classification"] = name;
    out["vector"] = v;
  }

  deliver(out, output);
  return kExitOk;
}

int run_springer(int n, int samples, std::uint64_t seed, const std::string& output) {
  auto report = ws::springer::diagram_check(n, samples, seed);
  json out{{"schema_version", ws::io::kSchemaVersion},
           {"task", "springer"},
           {"n", n},
           {"samples", report.samples},
           {"seed", seed},
           {"failures", report.failures},
           {"max_deviation", report.max_deviation},
           {"passed", report.passed()}};
  deliver(out, output);
  return report.passed() ? kExitOk : kExitPrecision;
}

/// Verify the built-in artifacts; when a data file is given, additionally
/// check that its stored monomials and elliptic model match them exactly.
int run_curves(const std::string& data_file, const std::string& output) {
  auto curve = ws::curves::genus_seven_curve();
  auto symmetry = ws::curves::symmetry_check(curve);
  auto elliptic = ws::curves::dubrovin_mazzocco_elliptic();
  auto groups = ws::curves::genus_seven_coefficient_groups();
  auto disc = ws::curves::quadratic_discriminant(elliptic);

  bool constant_term = curve.evaluate(ws::curves::Rational(0), ws::curves::Rational(0)) ==
                       ws::curves::Rational(16);
  bool smooth = ws::curves::elliptic_smoothness(elliptic);

  bool data_matches = true;
  if (!data_file.empty()) {
    json j = ws::io::load_json_file(data_file);
    try {
      if (!j.is_object() || j.value("schema_version", std::string()) != ws::io::kSchemaVersion)
        throw ws::malformed_input_error("curve data file has an unsupported schema_version");
      ws::curves::PlaneCurve from_file;
      for (const auto& m : j.at("genus_seven_curve").at("monomials"))
        from_file.set(m.at("p").get<int>(), m.at("q").get<int>(),
                      ws::curves::Rational(m.at("coefficient").get<std::int64_t>()));
      data_matches = from_file.coefficients == curve.coefficients;
      const auto& e = j.at("elliptic_model");
      data_matches = data_matches &&
                     ws::curves::Rational(e.at("a").get<std::int64_t>()) == elliptic.a &&
                     ws::curves::Rational(e.at("b").get<std::int64_t>()) == elliptic.b &&
                     ws::curves::Rational(e.at("c").get<std::int64_t>()) == elliptic.c;
    } catch (const json::exception& e) {
      throw ws::malformed_input_error(std::string("curve data file: ") + e.what());
    }
  }

  bool ok = symmetry.passed() && constant_term && smooth && data_matches;

  json out{{"schema_version", ws::io::kSchemaVersion},
           {"task", "curves"},
           {"genus_seven",
            {{"coefficient_groups", groups},
             {"swap_symmetric", symmetry.swap_symmetric},
             {"parity_symmetric", symmetry.parity_symmetric},
             {"constant_term_is_16", constant_term}}},
           {"elliptic",
            {{"quadratic", {{"a", 8}, {"b", -11}, {"c", 8}}},
             {"discriminant", disc.num},
             {"smooth", smooth}}},
           {"passed", ok}};
  if (!data_file.empty()) out["data_file_matches"] = data_matches;
  deliver(out, output);
  return ok ? kExitOk : kExitPrecision;
}

int run_selftest(std::uint64_t seed, const std::string& output) {
  auto report = ws::selftest::run(seed);
  json checks = json::array();
  for (const auto& c : report.checks) {
    std::printf("%-38s %s  %s\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.detail.c_str());
    checks.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  if (!output.empty())
    ws::io::write_json_file(output, json{{"schema_version", ws::io::kSchemaVersion},
                                         {"task", "selftest"},
                                         {"seed", seed},
                                         {"passed", report.passed()},
                                         {"checks", checks}});
  return report.passed() ? kExitOk : kExitPrecision;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"wildstokes: Stokes data, dual exponential maps and isomonodromy for GL_n"};
  app.require_subcommand(1);

  std::string input, output, svg_path;
  double tol = 1e-10;
  double tol_angle = ws::kAngleClusterTol;
  std::uint64_t seed = 0;

  auto* cmd_directions = app.add_subcommand("directions", "singular directions of a Cartan element");
  cmd_directions->add_option("--input", input)->required();
  cmd_directions->add_option("--output", output);
  cmd_directions->add_option("--svg", svg_path);
  cmd_directions->add_option("--tol", tol_angle);

  auto* cmd_nu = app.add_subcommand("nu", "Stokes data and dual group element of (A0/z^2 + B/z)dz");
  cmd_nu->add_option("--input", input)->required();
  cmd_nu->add_option("--output", output);
  cmd_nu->add_option("--svg", svg_path);

  std::string path_file, b0_file, loop_file;
  auto* cmd_flow = app.add_subcommand("flow", "integrate the isomonodromy equation along a path");
  cmd_flow->add_option("--input", input);
  cmd_flow->add_option("--path", path_file);
  cmd_flow->add_option("--b0", b0_file);
  cmd_flow->add_option("--output", output);
  cmd_flow->add_option("--tol", tol);

  auto* cmd_braid = app.add_subcommand("braid", "holonomy of a closed isomonodromy loop");
  cmd_braid->add_option("--input", input);
  cmd_braid->add_option("--loop", loop_file);
  cmd_braid->add_option("--b0", b0_file);
  cmd_braid->add_option("--output", output);
  cmd_braid->add_option("--tol", tol);

  int enumerate_n = 0;
  bool exclude_stars = false, exclude_discrete = false, with_cartan = false;
  std::string classify, partition_text;
  auto* cmd_graphs = app.add_subcommand("graphs", "complete k-partite graphs and Kac-Moody data");
  cmd_graphs->add_option("--enumerate", enumerate_n);
  cmd_graphs->add_flag("--exclude-stars", exclude_stars);
  cmd_graphs->add_flag("--exclude-discrete", exclude_discrete);
  cmd_graphs->add_flag("--cartan", with_cartan);
  cmd_graphs->add_option("--classify", classify);
  cmd_graphs->add_option("--partition", partition_text);
  cmd_graphs->add_option("--output", output);

  int springer_n = 3, springer_samples = 1000;
  bool springer_check = false;
  auto* cmd_springer = app.add_subcommand("springer", "Grothendieck-Springer diagram checks");
  cmd_springer->add_flag("--check", springer_check);
  cmd_springer->add_option("--n", springer_n);
  cmd_springer->add_option("--samples", springer_samples);
  cmd_springer->add_option("--seed", seed);
  cmd_springer->add_option("--output", output);

  bool curves_verify = false;
  std::string curves_data;
  auto* cmd_curves = app.add_subcommand("curves", "verify the stored Painleve curve artifacts");
  cmd_curves->add_flag("--verify", curves_verify);
  cmd_curves->add_option("--data", curves_data, "cross-check a shipped artifact file");
  cmd_curves->add_option("--output", output);

  auto* cmd_selftest = app.add_subcommand("selftest", "run the cross-module invariant suite");
  cmd_selftest->add_option("--seed", seed);
  cmd_selftest->add_option("--output", output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_directions->parsed()) return run_directions(input, output, svg_path, tol_angle);
    if (cmd_nu->parsed()) return run_nu(input, output, svg_path);
    if (cmd_flow->parsed()) return run_flow(input, path_file, b0_file, output, tol);
    if (cmd_braid->parsed()) return run_braid(input, loop_file, b0_file, output, tol);
    if (cmd_graphs->parsed())
      return run_graphs(enumerate_n, exclude_stars, exclude_discrete, with_cartan, classify,
                        partition_text, output);
    if (cmd_springer->parsed()) return run_springer(springer_n, springer_samples, seed, output);
    if (cmd_curves->parsed()) return run_curves(curves_data, output);
    if (cmd_selftest->parsed()) return run_selftest(seed, output);
    std::cerr << json{{"error", {{"type", "malformed_input"}, {"message", "unknown task"}}}}.dump()
              << "\n";
    return kExitMalformed;
  } catch (const ws::malformed_input_error& e) {
    std::cerr << json{{"error", {{"type", "malformed_input"}, {"message", e.what()}}}}.dump() << "\n";
    return kExitMalformed;
  } catch (const ws::io_error& e) {
    std::cerr << json{{"error", {{"type", "io"}, {"message", e.what()}}}}.dump() << "\n";
    return kExitMalformed;
  } catch (const ws::error& e) {
    // precision, degenerate input, resonance, path/chamber, scale
    std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump() << "\n";
    return kExitPrecision;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return kExitPrecision;
  }
}
