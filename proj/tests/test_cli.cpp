#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = HPUTUNE_CLI;
const std::string kExamples = HPUTUNE_EXAMPLES;

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("hputune_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& out = "/dev/null") {
  const std::string cmd = kCli + " " + args + " > " + out + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string example(const std::string& name) { return kExamples + "/" + name; }

}  // namespace

TEST_CASE("allocate splits an odd budget") {
  Scratch s;
  REQUIRE(run("allocate " + example("lemma1.cfg"), s.path("a.csv")) == 0);
  const auto text = slurp(s.path("a.csv"));
  CHECK(text.rfind("# hputune-allocation v1\n", 0) == 0);
  CHECK(text.find("pair,0,0,4\npair,1,0,3\n") != std::string::npos);
}

TEST_CASE("infer reports the rate") {
  Scratch s;
  write(s.path("probe.txt"), "fixed,1,t\nN=100\nT0=50\n");
  REQUIRE(run("infer " + s.path("probe.txt"), s.path("out.csv")) == 0);
  CHECK(slurp(s.path("out.csv")).find(",fixed,1,t,100,50,2,,no\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  Scratch s;
  CHECK(run("") == 1);
  CHECK(run("allocate") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("allocate " + example("lemma1.cfg") + " --strategy magic") == 2);
  CHECK(run("allocate " + s.path("missing.cfg")) == 2);
  write(s.path("bad.cfg"), "[experiment]\nscenario = sideways\n");
  CHECK(run("allocate " + s.path("bad.cfg")) == 2);

  std::string poor = slurp(example("lemma1.cfg"));
  poor.replace(poor.find("budgets = 7"), 11, "budgets = 1");
  write(s.path("poor.cfg"), poor);
  CHECK(run("allocate " + s.path("poor.cfg")) == 4);

  write(s.path("empty.txt"), "fixed,1,t\nT0=5\n");
  CHECK(run("infer " + s.path("empty.txt")) != 0);
}

TEST_CASE("allocation round trip through simulate") {
  Scratch s;
  const std::string cfg = example("repetition.cfg");
  REQUIRE(run("allocate " + cfg + " --strategy RA --out " + s.path("a.csv")) == 0);
  REQUIRE(run("simulate " + cfg + " " + s.path("a.csv") + " --trials 3000 --seed 5", s.path("s1.csv")) == 0);
  REQUIRE(run("simulate --config " + cfg + " " + s.path("a.csv") + " --trials 3000 --seed 5", s.path("s2.csv")) == 0);
  const auto first = slurp(s.path("s1.csv"));
  CHECK(first.rfind("# hputune-simulation v1\n", 0) == 0);
  CHECK(first.find("trials,,3000\n") != std::string::npos);
  CHECK(first == slurp(s.path("s2.csv")));
  CHECK(run("simulate " + cfg) == 1);
}

TEST_CASE("experiment grid is complete and reruns are identical") {
  Scratch s;
  const std::string cfg = example("small_compare.cfg");
  REQUIRE(run("experiment " + cfg + " --trials 300", s.path("e1.csv")) == 0);
  REQUIRE(run("experiment " + cfg + " --trials 300", s.path("e2.csv")) == 0);
  const auto text = slurp(s.path("e1.csv"));
  CHECK(text == slurp(s.path("e2.csv")));
  std::istringstream in(text);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("scenario,", 0) == 0) continue;
    ++rows;
  }
  CHECK(rows == 2 * 3 * 3);  // models x budgets x strategies
}
