#include "tmmp/instance.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace tmmp {

using Json = nlohmann::ordered_json;

namespace {

Rat jsonToRat(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rat(static_cast<long long>(j.get<long long>()));
  if (j.is_string()) return parseRat(j.get<std::string>());
  if (j.is_number_float())
    throw ParseError(where + ": floating point literals are not exact; use \"p/q\"");
  throw ParseError(where + ": expected an integer or a \"p/q\" string");
}

QVec jsonToQVec(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  QVec v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(jsonToRat(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

QMat jsonToQMat(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of arrays");
  QMat m;
  for (std::size_t i = 0; i < j.size(); ++i)
    m.push_back(jsonToQVec(j[i], where + "[" + std::to_string(i) + "]"));
  return m;
}

std::vector<ConeIdx> jsonToCones(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of index lists");
  std::vector<ConeIdx> cones;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw ParseError(where + ": cone must be an index list");
    ConeIdx c;
    for (const auto& x : j[i]) {
      if (!x.is_number_integer()) throw ParseError(where + ": ray index must be an integer");
      c.push_back(x.get<int>());
    }
    cones.push_back(c);
  }
  return cones;
}

Fan jsonToFan(const Json& j, const std::string& where) {
  if (!j.contains("rank") || !j["rank"].is_number_integer())
    throw ParseError(where + ".rank: missing lattice rank");
  int rank = j["rank"].get<int>();
  QMat rays = jsonToQMat(j.value("rays", Json::array()), where + ".rays");
  for (const auto& r : rays)
    if (!isIntegerVec(r)) throw ParseError(where + ".rays: rays must be integral");
  auto cones = jsonToCones(j.value("cones", Json::array()), where + ".cones");
  return makeFan(rank, rays, cones);
}

Json fanJson(const Fan& f) {
  Fan c = canonicalFan(f);
  Json j;
  j["rank"] = c.latticeRank;
  Json rays = Json::array();
  for (const auto& r : c.rays) {
    Json row = Json::array();
    for (const auto& x : r) row.push_back(static_cast<long long>(numerOf(x).convert_to<long long>()));
    rays.push_back(row);
  }
  j["rays"] = rays;
  Json cones = Json::array();
  for (const auto& cn : c.cones) {
    Json row = Json::array();
    for (int i : cn) row.push_back(i);
    cones.push_back(row);
  }
  j["cones"] = cones;
  return j;
}

Json ratJson(const Rat& q) {
  if (isInteger(q) && boost::multiprecision::abs(numerOf(q)) < 1000000000)
    return Json(numerOf(q).convert_to<long long>());
  return Json(ratStr(q));
}

Json qvecJson(const QVec& v) {
  Json row = Json::array();
  for (const auto& x : v) row.push_back(ratJson(x));
  return row;
}

}  // namespace

Instance parseInstance(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (j.value("format", 1) != 1) throw ParseError("unsupported format version");
  Instance inst;
  inst.pair.fan = jsonToFan(j, "$");
  FanReport rep = validateFan(inst.pair.fan);
  if (!rep.errors.empty()) throw ParseError("invalid fan: " + rep.errors.front());
  const std::size_t n = inst.pair.fan.rays.size();
  inst.pair.boundary = TDivisor(n, Rat(0));
  if (j.contains("divisors")) {
    if (!j["divisors"].is_object()) throw ParseError("$.divisors: expected an object");
    for (const auto& [name, arr] : j["divisors"].items()) {
      TDivisor d = jsonToQVec(arr, "$.divisors." + name);
      if (d.size() != n) throw ParseError("$.divisors." + name + ": wrong length");
      inst.divisors[name] = d;
    }
  }
  if (inst.divisors.count("Delta")) inst.pair.boundary = inst.divisors["Delta"];
  if (j.contains("base")) {
    BaseData base;
    base.fan = jsonToFan(j["base"], "$.base");
    if (!j["base"].contains("matrix")) throw ParseError("$.base.matrix: missing lattice map");
    base.map.matrix = jsonToQMat(j["base"]["matrix"], "$.base.matrix");
    inst.pair.base = base;
  }
  if (j.contains("params")) {
    const Json& p = j["params"];
    if (p.contains("r")) inst.r = jsonToRat(p["r"], "$.params.r");
    if (p.contains("seed")) inst.seed = p["seed"].get<long>();
    if (p.contains("patches")) {
      for (std::size_t i = 0; i < p["patches"].size(); ++i)
        inst.patches.push_back(
            jsonToCones(p["patches"][i], "$.params.patches[" + std::to_string(i) + "]"));
    }
    if (p.contains("valuations")) inst.valuations = jsonToQMat(p["valuations"], "$.params.valuations");
    if (p.contains("generators"))
      for (const auto& g : p["generators"]) inst.generators.push_back(g.get<std::string>());
    if (p.contains("rs"))
      for (std::size_t i = 0; i < p["rs"].size(); ++i)
        inst.rs.push_back(jsonToRat(p["rs"][i], "$.params.rs"));
  }
  validatePair(inst.pair);
  return inst;
}

Instance loadInstance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseInstance(ss.str());
}

TraceReport makeTraceReport(const MMPTrace& trace, long seed) {
  TraceReport rep;
  rep.seed = seed;
  rep.outcome = trace.outcome == MmpOutcome::MinimalModel ? "MinimalModel" : "MoriFibration";
  for (const auto& s : trace.steps) {
    StepReport sr;
    switch (s.kind) {
      case StepKind::Divisorial: sr.kind = "Divisorial"; break;
      case StepKind::Flip: sr.kind = "Flip"; break;
      case StepKind::MoriFiber: sr.kind = "MoriFiber"; break;
    }
    sr.lambda = s.lambda;
    sr.wall = s.ray.wall;
    sr.rayClass = s.ray.classVec;
    sr.rankBefore = s.rankBefore;
    sr.rankAfter = s.rankAfter;
    for (std::size_t i = 0; i < s.source.fan.rays.size(); ++i)
      if (s.kind == StepKind::Divisorial && s.target.fan.rayIndex(s.source.fan.rays[i]) < 0)
        sr.removedRays.push_back(s.source.fan.rays[i]);
    sr.ledger = s.ledger;
    rep.steps.push_back(sr);
  }
  rep.finalFan = canonicalFan(trace.finalPair.fan);
  // Boundary follows the canonical ray order.
  for (const auto& ray : rep.finalFan.rays) {
    int idx = trace.finalPair.fan.rayIndex(ray);
    rep.finalBoundary.push_back(idx >= 0 ? trace.finalPair.boundary[idx] : Rat(0));
  }
  return rep;
}

std::string emitTraceReport(const TraceReport& rep) {
  Json j;
  j["format"] = rep.format;
  j["seed"] = rep.seed;
  j["outcome"] = rep.outcome;
  Json steps = Json::array();
  for (const auto& s : rep.steps) {
    Json sj;
    sj["kind"] = s.kind;
    sj["lambda"] = ratStr(s.lambda);
    Json wall = Json::array();
    for (int i : s.wall) wall.push_back(i);
    sj["wall"] = wall;
    sj["rayClass"] = qvecJson(s.rayClass);
    Json rem = Json::array();
    for (const auto& r : s.removedRays) rem.push_back(qvecJson(r));
    sj["removedRays"] = rem;
    sj["rankBefore"] = s.rankBefore;
    sj["rankAfter"] = s.rankAfter;
    Json ledger = Json::array();
    for (const auto& le : s.ledger) {
      Json lj;
      lj["v"] = qvecJson(le.valuation);
      lj["before"] = ratStr(le.before);
      lj["after"] = ratStr(le.after);
      ledger.push_back(lj);
    }
    sj["ledger"] = ledger;
    steps.push_back(sj);
  }
  j["steps"] = steps;
  j["finalFan"] = fanJson(rep.finalFan);
  j["finalBoundary"] = qvecJson(rep.finalBoundary);
  return j.dump(2) + "\n";
}

TraceReport parseTraceReport(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid report JSON: ") + e.what());
  }
  TraceReport rep;
  rep.format = j.value("format", 1);
  rep.seed = j.value("seed", 0L);
  rep.outcome = j.value("outcome", "");
  for (const auto& sj : j.value("steps", Json::array())) {
    StepReport sr;
    sr.kind = sj.value("kind", "");
    sr.lambda = parseRat(sj.value("lambda", "0"));
    for (const auto& i : sj.value("wall", Json::array())) sr.wall.push_back(i.get<int>());
    sr.rayClass = jsonToQVec(sj.value("rayClass", Json::array()), "rayClass");
    sr.removedRays = jsonToQMat(sj.value("removedRays", Json::array()), "removedRays");
    sr.rankBefore = sj.value("rankBefore", 0);
    sr.rankAfter = sj.value("rankAfter", 0);
    for (const auto& lj : sj.value("ledger", Json::array())) {
      LedgerEntry le;
      le.valuation = jsonToQVec(lj["v"], "ledger.v");
      le.before = jsonToRat(lj["before"], "ledger.before");
      le.after = jsonToRat(lj["after"], "ledger.after");
      sr.ledger.push_back(le);
    }
    rep.steps.push_back(sr);
  }
  if (j.contains("finalFan")) rep.finalFan = jsonToFan(j["finalFan"], "finalFan");
  rep.finalBoundary = jsonToQVec(j.value("finalBoundary", Json::array()), "finalBoundary");
  return rep;
}

std::string fanToJson(const Fan& f) { return fanJson(f).dump(2) + "\n"; }

}  // namespace tmmp
