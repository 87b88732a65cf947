// End-to-end checks of the command-line tool. argv[1] is the path to the
// binary under test; everything runs inside a scratch directory.

#include <json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int failures = 0;

#define CLI_CHECK(cond)                                                  \
  do {                                                                   \
    if (!(cond)) {                                                       \
      ++failures;                                                        \
      std::printf("FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond);        \
    }                                                                    \
  } while (0)

std::string binary;
fs::path work;

int run(const std::string& args) {
  const std::string cmd = '"' + binary + "\" " + args + " > \"" +
                          (work / "stdout.txt").string() + "\" 2> \"" +
                          (work / "stderr.txt").string() + '"';
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string p(const char* name) { return (work / name).string(); }

std::vector<double> solution_values(const fs::path& path) {
  const json root = json::parse(slurp(path));
  return root["u"].get<std::vector<double>>();
}

} // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::printf("usage: %s <cli-binary>\n", argv[0]);
    return 2;
  }
  binary = argv[1];
  work = fs::temp_directory_path() / "fibernet_cli_scratch";
  fs::remove_all(work);
  fs::create_directories(work);

  // generate: structured grid with the expected node count, manifest last.
  CLI_CHECK(run("generate --type structured --m 8 --out " + p("grid.json")) == 0);
  CLI_CHECK(fs::exists(work / "grid.json"));
  CLI_CHECK(fs::exists(work / "grid.json.manifest.json"));
  {
    const json net = json::parse(slurp(work / "grid.json"));
    CLI_CHECK(net["nodes"].size() == 81);
    CLI_CHECK(net["generator"] == "structured");
    const json manifest = json::parse(slurp(work / "grid.json.manifest.json"));
    CLI_CHECK(manifest["command"] == "generate");
    CLI_CHECK(manifest["artifacts"].size() == 1);
  }

  // generate: identical seeds give byte-identical fiber networks.
  CLI_CHECK(run("generate --type fiber --target-nodes 2000 --seed 7 --out " +
                p("fiber_a.json")) == 0);
  CLI_CHECK(run("generate --type fiber --target-nodes 2000 --seed 7 --out " +
                p("fiber_b.json")) == 0);
  CLI_CHECK(slurp(work / "fiber_a.json") == slurp(work / "fiber_b.json"));
  CLI_CHECK(!slurp(work / "fiber_a.json").empty());

  // generate: invalid parameters exit 2 and leave no artifacts behind.
  CLI_CHECK(run("generate --type perturbed --m 8 --magnitude 0.6 --out " +
                p("bad.json")) == 2);
  CLI_CHECK(!fs::exists(work / "bad.json"));
  CLI_CHECK(!fs::exists(work / "bad.json.manifest.json"));

  // solve: missing inputs and unknown methods exit 2.
  CLI_CHECK(run("solve --network " + p("missing.json") + " --out " +
                p("nope.json")) == 2);
  CLI_CHECK(!fs::exists(work / "nope.json.manifest.json"));
  CLI_CHECK(run("solve --network " + p("grid.json") + " --method bogus --out " +
                p("nope.json")) == 2);

  // solve: with global correctors the multiscale answer matches the exact
  // one on the interior-load problem.
  CLI_CHECK(run("generate --type perturbed --m 16 --seed 3 --scheme random "
                "--coefficient-seed 2 --out " + p("net.json")) == 0);
  CLI_CHECK(run("solve --network " + p("net.json") +
                " --method exact --problem force --out " + p("exact.json")) == 0);
  CLI_CHECK(run("solve --network " + p("net.json") +
                " --method lod --m 4 --loc-factor 99 --problem force --out " +
                p("lod.json") + " --dump-basis " + p("basis.coo")) == 0);
  {
    const std::vector<double> exact = solution_values(work / "exact.json");
    const std::vector<double> lod = solution_values(work / "lod.json");
    CLI_CHECK(exact.size() == lod.size());
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      diff2 += (exact[i] - lod[i]) * (exact[i] - lod[i]);
      norm2 += exact[i] * exact[i];
    }
    CLI_CHECK(norm2 > 0.0);
    CLI_CHECK(std::sqrt(diff2 / norm2) <= 1e-8);
    CLI_CHECK(fs::exists(work / "basis.coo"));
    const json manifest = json::parse(slurp(work / "lod.json.manifest.json"));
    CLI_CHECK(manifest["artifacts"].size() == 2);
  }

  // study: prints both fitted rates, and the CSV is thread-count invariant.
  CLI_CHECK(run("study --type perturbed --m 16 --seed 5 --m-list 2,4 "
                "--timing false --out " + p("study1")) == 0);
  {
    const std::string stdout_text = slurp(work / "stdout.txt");
    CLI_CHECK(stdout_text.find("rate_l2 ") != std::string::npos);
    CLI_CHECK(stdout_text.find("rate_energy ") != std::string::npos);
    const std::string csv = slurp(work / "study1.csv");
    CLI_CHECK(csv.rfind("m,H,ell,rel_l2,rel_energy,wall_seconds\n", 0) == 0);
    const json meta = json::parse(slurp(work / "study1.meta.json"));
    CLI_CHECK(meta.contains("config_hash"));
    CLI_CHECK(meta["rows_ok"] == 2);
  }
  CLI_CHECK(run("study --type perturbed --m 16 --seed 5 --m-list 2,4 "
                "--timing false --threads 2 --out " + p("study2")) == 0);
  CLI_CHECK(slurp(work / "study1.csv") == slurp(work / "study2.csv"));

  // study: config file + flag precedence (flag wins over config key).
  {
    std::ofstream config(work / "study.ini");
    config << "[network]\ntype = perturbed\nm_fine = 16\nseed = 5\n"
           << "[analysis]\nm_list = 2,4\ntiming = false\n";
  }
  CLI_CHECK(run("study --config " + p("study.ini") + " --seed 5 --out " +
                p("study3")) == 0);
  CLI_CHECK(slurp(work / "study3.csv") == slurp(work / "study1.csv"));

  // info: summarizes JSON and text artifacts without failing.
  CLI_CHECK(run("info " + p("net.json")) == 0);
  CLI_CHECK(slurp(work / "stdout.txt").find("nodes:") != std::string::npos);
  CLI_CHECK(run("info " + p("study1.csv")) == 0);
  CLI_CHECK(slurp(work / "stdout.txt").find("text lines:") != std::string::npos);
  CLI_CHECK(run("info " + p("not_there.json")) == 2);

  if (failures == 0) std::printf("cli integration: all checks passed\n");
  fs::remove_all(work);
  return failures == 0 ? 0 : 1;
}
