// Command-line surface: MMP runs, thresholds, chambers, singularity reports,
// glue demos and continuous-index outputs on JSON instance files.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "tmmp/instance.hpp"

using namespace tmmp;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitInternal = 4;

void writeJsonOut(const std::string& path, const std::string& payload) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open output file: " + path);
  out << payload;
}

TDivisor namedDivisor(const Instance& inst, const std::string& name) {
  auto it = inst.divisors.find(name);
  if (it == inst.divisors.end())
    throw PairError("instance does not define the divisor \"" + name + "\"");
  return it->second;
}

int cmdRun(const std::string& file, const std::string& jsonOut, long seed) {
  Instance inst = loadInstance(file);
  MMPTrace trace = runMMPWithScaling(inst.pair, namedDivisor(inst, "A"));
  TraceReport rep = makeTraceReport(trace, seed ? seed : inst.seed);
  std::string payload = emitTraceReport(rep);
  writeJsonOut(jsonOut, payload);
  std::cout << "outcome: " << rep.outcome << "\n";
  for (const auto& s : rep.steps)
    std::cout << "step " << s.kind << " at lambda = " << ratStr(s.lambda)
              << " (rank " << s.rankBefore << " -> " << s.rankAfter << ")\n";
  std::cout << "final model: " << rep.finalFan.rays.size() << " rays, "
            << rep.finalFan.cones.size() << " maximal cones\n";
  return 0;
}

int cmdThreshold(const std::string& file, const std::string& jsonOut) {
  Instance inst = loadInstance(file);
  ThresholdBound b = nefThresholdWithBound(inst.pair, namedDivisor(inst, "A"));
  std::cout << "lambda = " << ratStr(b.lambda) << "\n";
  std::cout << "cartier index a = " << b.cartierIdx.str() << ", fiber dim b = " << b.fiberDim
            << "\n";
  if (b.applies)
    std::cout << "denominator v = " << b.denominator.str() << " <= a(b+1) = "
              << Int(b.cartierIdx * (b.fiberDim + 1)).str() << "\n";
  if (!jsonOut.empty()) {
    std::string payload = std::string("{\n  \"format\": 1,\n  \"lambda\": \"") +
                          ratStr(b.lambda) + "\",\n  \"a\": \"" + b.cartierIdx.str() +
                          "\",\n  \"b\": " + std::to_string(b.fiberDim) + ",\n  \"v\": \"" +
                          b.denominator.str() + "\"\n}\n";
    writeJsonOut(jsonOut, payload);
  }
  return 0;
}

int cmdChambers(const std::string& file) {
  Instance inst = loadInstance(file);
  if (inst.generators.empty())
    throw PairError("chambers command needs params.generators (divisor names)");
  std::vector<TDivisor> ds;
  for (const auto& g : inst.generators) ds.push_back(namedDivisor(inst, g));
  QMat vals = inst.valuations;
  if (vals.empty())
    for (const auto& u : inst.pair.fan.rays) vals.push_back(u);
  ChamberDecomposition cd = chamberDecomposition(inst.pair, ds, vals);
  std::cout << "support cone dimension: " << cd.support.dim() << "\n";
  std::cout << "cells: " << cd.cells.size() << "\n";
  for (std::size_t i = 0; i < cd.cells.size(); ++i) {
    std::cout << "cell " << i << ": generators";
    for (const auto& g : cd.cells[i].cone.generators) {
      std::cout << " (";
      for (std::size_t k = 0; k < g.size(); ++k)
        std::cout << (k ? "," : "") << ratStr(g[k]);
      std::cout << ")";
    }
    std::cout << "\n";
  }
  auto nef = nefChamber(inst.pair, cd);
  if (nef)
    std::cout << "nef chamber: cell " << *nef << "\n";
  else
    std::cout << "nef chamber: none\n";
  return 0;
}

int cmdSing(const std::string& file) {
  Instance inst = loadInstance(file);
  SingularityReport rep = classifyPair(inst.pair);
  std::cout << "label: " << rep.label << "\n";
  std::cout << "terminal: " << (rep.terminal ? "yes" : "no")
            << ", canonical: " << (rep.canonical ? "yes" : "no")
            << ", klt: " << (rep.klt ? "yes" : "no") << ", lc: " << (rep.lc ? "yes" : "no")
            << "\n";
  return 0;
}

int cmdGlue(const std::string& file) {
  Instance inst = loadInstance(file);
  if (inst.patches.empty()) throw PairError("glue command needs params.patches");
  if (inst.rs.empty()) throw PairError("glue command needs params.rs");
  BaseCover cover{inst.patches};
  TDivisor a = namedDivisor(inst, "A");
  auto runs = runLocalMMPs(inst.pair, a, cover, inst.rs);
  for (std::size_t ri = 0; ri < inst.rs.size(); ++ri) {
    GlueResult g = glueOutputs(inst.pair, cover, runs, ri);
    std::cout << "r = " << ratStr(inst.rs[ri]) << ": ";
    if (g.glued) {
      bool bc = true;
      for (const auto& patch : inst.patches)
        if (!baseChangeCheck(inst.pair, a, patch, inst.rs[ri])) bc = false;
      std::cout << "glued (" << g.global.fan.rays.size() << " rays, "
                << g.global.fan.cones.size() << " cones), base change "
                << (bc ? "ok" : "FAILED") << "\n";
      if (!bc) return kExitInternal;
    } else {
      std::cout << "mismatch between patches " << g.mismatch->patchA << " and "
                << g.mismatch->patchB << "\n";
      return kExitInternal;
    }
  }
  return 0;
}

int cmdOutputAtScale(const std::string& file, const std::string& rText,
                     const std::string& jsonOut) {
  Instance inst = loadInstance(file);
  Rat r = 0;
  if (!rText.empty())
    r = parseRat(rText);
  else if (inst.r)
    r = *inst.r;
  Pair out = outputAtScale(inst.pair, namedDivisor(inst, "A"), r);
  std::string payload = fanToJson(out.fan);
  writeJsonOut(jsonOut, payload);
  std::cout << payload;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact toric minimal model program with scaling"};
  app.require_subcommand(1);

  std::string file, jsonOut, rText;
  long seed = 0;

  auto addCommon = [&](CLI::App* sub, bool withR) {
    sub->add_option("file", file, "instance file (JSON)")->required();
    sub->add_option("--json", jsonOut, "write the machine report to this path");
    sub->add_option("--seed", seed, "seed for randomized suites (recorded in reports)");
    if (withR) sub->add_option("--r", rText, "scale parameter p/q");
  };

  CLI::App* run = app.add_subcommand("run", "run the MMP with scaling of A");
  addCommon(run, false);
  CLI::App* thr = app.add_subcommand("threshold", "nef threshold and rationality bound");
  addCommon(thr, false);
  CLI::App* cha = app.add_subcommand("chambers", "chamber decomposition report");
  addCommon(cha, false);
  CLI::App* sing = app.add_subcommand("sing", "singularity classification");
  addCommon(sing, false);
  CLI::App* glue = app.add_subcommand("glue", "local runs over a cover, glued");
  addCommon(glue, false);
  CLI::App* oas = app.add_subcommand("output-at-scale", "the r-th output of the MMP");
  addCommon(oas, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmdRun(file, jsonOut, seed);
    if (thr->parsed()) return cmdThreshold(file, jsonOut);
    if (cha->parsed()) return cmdChambers(file);
    if (sing->parsed()) return cmdSing(file);
    if (glue->parsed()) return cmdGlue(file);
    if (oas->parsed()) return cmdOutputAtScale(file, rText, jsonOut);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const InternalError& e) {
    std::cerr << "internal invariant violation: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::runtime_error& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return 0;
}
