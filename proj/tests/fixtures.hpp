#pragma once

// Running-example graph about Tim Berners-Lee, and schemas over it.

#include <fstream>
#include <sstream>
#include <string>

#include "wsub/wgraph.hpp"
#include "wsub/wshex_parser.hpp"

namespace fx {

using wsub::DataValue;
using wsub::Datatype;
using wsub::EntityId;
using wsub::Qualifier;
using wsub::Statement;
using wsub::Value;
using wsub::WikibaseGraph;

inline const EntityId timBl = EntityId::item(80);
inline const EntityId vintCerf = EntityId::item(92743);
inline const EntityId London = EntityId::item(84);
inline const EntityId CERN = EntityId::item(42944);
inline const EntityId UK = EntityId::item(145);
inline const EntityId Spain = EntityId::item(29);
inline const EntityId PA = EntityId::item(2719958);
inline const EntityId Human = EntityId::item(5);
inline const EntityId NewHaven = EntityId::item(49145);

inline const EntityId instanceOf = EntityId::property(31);
inline const EntityId birthDate = EntityId::property(569);
inline const EntityId birthPlace = EntityId::property(19);
inline const EntityId country = EntityId::property(17);
inline const EntityId employer = EntityId::property(108);
inline const EntityId awarded = EntityId::property(166);
inline const EntityId start = EntityId::property(580);
inline const EntityId end = EntityId::property(582);
inline const EntityId pointTime = EntityId::property(585);
inline const EntityId togetherWith = EntityId::property(1706);

inline Value year(const char* y) { return DataValue{y, Datatype::Year}; }

inline Statement st(EntityId s, EntityId p, Value v, std::vector<Qualifier> qs = {}) {
  return Statement(s, p, std::move(v), std::move(qs));
}

inline Statement timInstance() { return st(timBl, instanceOf, Human); }
inline Statement timBirthDate() { return st(timBl, birthDate, year("1955")); }
inline Statement timBirthPlace() { return st(timBl, birthPlace, London); }
inline Statement timEmployer1() { return st(timBl, employer, CERN, {{start, year("1980")}, {end, year("1980")}}); }
inline Statement timEmployer2() { return st(timBl, employer, CERN, {{start, year("1984")}, {end, year("1994")}}); }
inline Statement timAwarded() { return st(timBl, awarded, PA, {{pointTime, year("2002")}, {togetherWith, vintCerf}}); }
inline Statement londonCountry() { return st(London, country, UK); }
inline Statement vintInstance() { return st(vintCerf, instanceOf, Human); }
inline Statement vintBirthPlace() { return st(vintCerf, birthPlace, NewHaven); }
inline Statement cernAwarded() { return st(CERN, awarded, PA, {{pointTime, year("2013")}}); }
inline Statement paCountry() { return st(PA, country, Spain); }

inline std::vector<Statement> example4Statements() {
  return {timInstance(),   timBirthDate(), timBirthPlace(),  timEmployer1(), timEmployer2(), timAwarded(),
          londonCountry(), vintInstance(), vintBirthPlace(), cernAwarded(),  paCountry()};
}

inline WikibaseGraph example4() { return WikibaseGraph(example4Statements()); }

inline wsub::ParseOptions aliases() {
  wsub::ParseOptions o;
  o.aliases = {{"timBl", timBl},           {"vintCerf", vintCerf},     {"London", London},
               {"CERN", CERN},             {"UK", UK},                 {"Spain", Spain},
               {"PA", PA},                 {"Human", Human},           {"NewHaven", NewHaven},
               {"instanceOf", instanceOf}, {"birthDate", birthDate},   {"birthPlace", birthPlace},
               {"country", country},       {"employer", employer},     {"awarded", awarded},
               {"start", start},           {"end", end},               {"pointTime", pointTime},
               {"togetherWith", togetherWith}};
  return o;
}

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string dataPath(const std::string& name) { return std::string(WSUB_TEST_DATA) + "/" + name; }

inline wsub::WShExSchema schemaFile(const std::string& name) {
  return wsub::parseSchema(readFile(dataPath(name)), aliases());
}

}  // namespace fx
