#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tmmp/instance.hpp"

using namespace tmmp;

namespace {

std::string binPath() {
  const char* p = std::getenv("MMP_BIN");
  REQUIRE(p != nullptr);
  return p;
}

std::string fixturesPath() {
  const char* p = std::getenv("MMP_FIXTURES");
  REQUIRE(p != nullptr);
  return p;
}

struct RunResult {
  int exitCode;
  std::string output;
};

RunResult runCmd(const std::string& args) {
  std::string cmd = binPath() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) out += buf;
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tempPath() {
  char buf[] = "/tmp/tmmp_cli_XXXXXX";
  int fd = mkstemp(buf);
  REQUIRE(fd >= 0);
  close(fd);
  return buf;
}

}  // namespace

TEST_CASE("instance parsing") {
  Instance inst = loadInstance(fixturesPath() + "/f1.json");
  CHECK(inst.pair.fan.rays.size() == 4);
  CHECK(inst.divisors.count("A") == 1);
  CHECK(inst.divisors.at("A")[3] == Rat(3));

  // Malformed: bad ray literal.
  CHECK_THROWS_AS(parseInstance("{\"rank\":1,\"rays\":[[1.5]],\"cones\":[[0]]}"), ParseError);
  // Non-primitive ray.
  CHECK_THROWS_AS(parseInstance("{\"rank\":1,\"rays\":[[2]],\"cones\":[[0]]}"), ParseError);
  // Irrational-looking float coefficient.
  CHECK_THROWS_AS(
      parseInstance("{\"rank\":1,\"rays\":[[1],[-1]],\"cones\":[[0],[1]],"
                    "\"divisors\":{\"A\":[0.5,0]}}"),
      ParseError);
}

TEST_CASE("run command on the bundled fixtures") {
  RunResult f1 = runCmd("run " + fixturesPath() + "/f1.json");
  CHECK(f1.exitCode == 0);
  CHECK(f1.output.find("step Divisorial at lambda = 1") != std::string::npos);
  CHECK(f1.output.find("step MoriFiber at lambda = 3/4") != std::string::npos);
  CHECK(f1.output.find("outcome: MoriFibration") != std::string::npos);

  RunResult p2 = runCmd("run " + fixturesPath() + "/p2.json");
  CHECK(p2.exitCode == 0);
  CHECK(p2.output.find("step MoriFiber at lambda = 3") != std::string::npos);

  RunResult q = runCmd("run " + fixturesPath() + "/quadric.json");
  CHECK(q.exitCode == 0);
  CHECK(q.output.find("step Flip at lambda = 1/2") != std::string::npos);
  CHECK(q.output.find("outcome: MinimalModel") != std::string::npos);
}

TEST_CASE("trace report round trip and determinism") {
  std::string out1 = tempPath();
  std::string out2 = tempPath();
  RunResult r1 = runCmd("run " + fixturesPath() + "/f1.json --json " + out1);
  REQUIRE(r1.exitCode == 0);
  RunResult r2 = runCmd("run " + fixturesPath() + "/f1.json --json " + out2);
  REQUIRE(r2.exitCode == 0);
  std::string t1 = slurp(out1), t2 = slurp(out2);
  CHECK(t1 == t2);  // byte-identical machine reports
  TraceReport rep = parseTraceReport(t1);
  CHECK(emitTraceReport(rep) == t1);  // emit(parse(.)) is the identity
  CHECK(rep.steps.size() == 2);
  CHECK(rep.steps[0].kind == "Divisorial");
  std::remove(out1.c_str());
  std::remove(out2.c_str());
}

TEST_CASE("threshold command") {
  RunResult t = runCmd("threshold " + fixturesPath() + "/f1.json");
  CHECK(t.exitCode == 0);
  CHECK(t.output.find("lambda = 1") != std::string::npos);
  RunResult p = runCmd("threshold " + fixturesPath() + "/p2.json");
  CHECK(p.output.find("lambda = 3") != std::string::npos);
  CHECK(p.output.find("<= a(b+1) = 3") != std::string::npos);
}

TEST_CASE("sing command") {
  RunResult s = runCmd("sing " + fixturesPath() + "/p2.json");
  CHECK(s.exitCode == 0);
  CHECK(s.output.find("label: terminal") != std::string::npos);
  RunResult q = runCmd("sing " + fixturesPath() + "/quadric.json");
  CHECK(q.exitCode == 0);
  CHECK(q.output.find("klt: yes") != std::string::npos);
}

TEST_CASE("chambers command") {
  RunResult c = runCmd("chambers " + fixturesPath() + "/f1.json");
  CHECK(c.exitCode == 0);
  CHECK(c.output.find("cells: 2") != std::string::npos);
  CHECK(c.output.find("nef chamber: cell") != std::string::npos);
}

TEST_CASE("glue command") {
  RunResult g = runCmd("glue " + fixturesPath() + "/f1xp1.json");
  CHECK(g.exitCode == 0);
  CHECK(g.output.find("r = 7/8: glued") != std::string::npos);
  CHECK(g.output.find("base change ok") != std::string::npos);
}

TEST_CASE("output-at-scale command") {
  RunResult o = runCmd("output-at-scale " + fixturesPath() + "/f1.json --r 7/8");
  CHECK(o.exitCode == 0);
  // The output at 7/8 is P2: three rays.
  CHECK(o.output.find("\"rank\": 2") != std::string::npos);
  // r below the fiber threshold: precondition failure, exit 3.
  RunResult bad = runCmd("output-at-scale " + fixturesPath() + "/f1.json --r 1/2");
  CHECK(bad.exitCode == 3);
}

TEST_CASE("exit codes") {
  std::string badPath = tempPath();
  {
    std::ofstream out(badPath);
    out << "{\"rank\":2,\"rays\":[[2,0]],\"cones\":[[0]]}";
  }
  RunResult parse = runCmd("run " + badPath);
  CHECK(parse.exitCode == 2);
  std::remove(badPath.c_str());

  // Precondition failure: running the MMP without the divisor A defined.
  std::string noA = tempPath();
  {
    std::ofstream out(noA);
    out << slurp(fixturesPath() + "/p2.json");
  }
  // Strip A by rewriting divisors.
  {
    Instance inst = loadInstance(noA);
    std::ofstream out(noA);
    out << "{\"format\":1,\"rank\":2,\"rays\":[[1,0],[0,1],[-1,-1]],"
           "\"cones\":[[0,1],[1,2],[0,2]]}";
  }
  RunResult pre = runCmd("run " + noA);
  CHECK(pre.exitCode == 3);
  std::remove(noA.c_str());
}
