// cli_behavior.cpp
// Exercises the CLI contract: exit 0 on success, 1 on precision/validation
// failure, 2 on malformed input; document dispatch; curve data cross-check.
// Usage: cli_behavior --cli <path> --workdir <dir> [--data <curves.json>]

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

int g_failures = 0;

int run_quiet(const std::string& cmd) {
  int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

void expect_exit(const std::string& what, const std::string& cmd, int expected) {
  int got = run_quiet(cmd);
  bool ok = got == expected;
  std::printf("%-42s %s (exit %d, expected %d)\n", what.c_str(), ok ? "PASS" : "FAIL", got,
              expected);
  if (!ok) ++g_failures;
}

} // namespace

int main(int argc, char** argv) {
  std::string cli, workdir = "cli_behavior_work", data;
  for (int k = 1; k + 1 < argc; ++k) {
    if (std::string(argv[k]) == "--cli") cli = argv[k + 1];
    if (std::string(argv[k]) == "--workdir") workdir = argv[k + 1];
    if (std::string(argv[k]) == "--data") data = argv[k + 1];
  }
  if (cli.empty()) {
    std::fprintf(stderr, "missing --cli\n");
    return 1;
  }
  namespace fs = std::filesystem;
  fs::create_directories(workdir);
  auto write = [&](const std::string& name, const std::string& body) {
    fs::path p = fs::path(workdir) / name;
    std::ofstream(p) << body;
    return p.string();
  };

  std::string good = write("good_nu.json",
                           R"({"schema_version":"1","task":"nu","seed":1,"payload":{
                                "a0":[[1.0,0.0],[-1.0,0.0]],
                                "b":[[[0.1,0.0],[0.4,0.1]],[[-0.2,0.3],[0.0,0.0]]]}})");
  std::string malformed = write("malformed.json", "{this is not json");
  std::string degenerate = write("degenerate.json",
                                 R"({"a0":[[1.0,0.0],[1.0,0.0]],
                                     "b":[[[0,0],[0,0]],[[0,0],[0,0]]]})");
  std::string wrong_task = write("wrong_task.json",
                                 R"({"schema_version":"1","task":"flow","payload":{}})");
  std::string bad_schema = write("bad_schema.json",
                                 R"({"schema_version":"99","task":"nu","payload":{}})");

  std::string q = "\"" + cli + "\" ";
  expect_exit("selftest runs the invariant suite", q + "selftest --seed 11", 0);
  expect_exit("well-formed nu document", q + "nu --input " + good, 0);
  expect_exit("malformed JSON", q + "nu --input " + malformed, 2);
  expect_exit("degenerate Cartan element", q + "nu --input " + degenerate, 1);
  expect_exit("document task mismatch", q + "nu --input " + wrong_task, 2);
  expect_exit("unsupported schema version", q + "nu --input " + bad_schema, 2);
  expect_exit("missing input file", q + "nu --input " + workdir + "/absent.json", 2);
  expect_exit("graphs classify without partition", q + "graphs --classify 1,1,1", 2);
  expect_exit("curves verify", q + "curves --verify", 0);
  if (!data.empty())
    expect_exit("curves verify against shipped data", q + "curves --verify --data " + data, 0);

  std::printf("%s\n", g_failures == 0 ? "CLI BEHAVIOR OK" : "CLI BEHAVIOR FAILURES");
  return g_failures == 0 ? 0 : 1;
}
