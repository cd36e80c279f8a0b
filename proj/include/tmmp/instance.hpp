// Instance file parsing and machine-readable trace reports.
#pragma once

#include <map>
#include <string>

#include "tmmp/gluing.hpp"

namespace tmmp {

struct Instance {
  Pair pair;
  std::map<std::string, TDivisor> divisors;  // by name; "Delta" feeds the pair
  // Optional parameters.
  std::optional<Rat> r;
  long seed = 0;
  std::vector<std::vector<ConeIdx>> patches;    // for glue
  QMat valuations;                              // for chambers
  std::vector<std::string> generators;          // divisor names for chambers
  std::vector<Rat> rs;                          // scales for glue
};

// Parses the UTF-8 JSON instance format (integers and "p/q" strings only;
// floating point literals are rejected). Throws ParseError with a JSON
// pointer-style location on malformed input.
Instance parseInstance(const std::string& text);
Instance loadInstance(const std::string& path);

struct StepReport {
  std::string kind;
  Rat lambda;
  ConeIdx wall;
  QVec rayClass;
  QMat removedRays;
  int rankBefore = 0, rankAfter = 0;
  std::vector<LedgerEntry> ledger;
};

struct TraceReport {
  int format = 1;
  long seed = 0;
  std::string outcome;
  std::vector<StepReport> steps;
  Fan finalFan;
  TDivisor finalBoundary;
};

TraceReport makeTraceReport(const MMPTrace& trace, long seed);
// Deterministic machine form; emit(parse(emit(x))) == emit(x).
std::string emitTraceReport(const TraceReport& rep);
TraceReport parseTraceReport(const std::string& text);

std::string fanToJson(const Fan& f);

}  // namespace tmmp
