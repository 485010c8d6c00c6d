#include "wsub/pschema.hpp"

namespace wsub {

const char* kindName(Status::Kind k) {
  switch (k) {
    case Status::Kind::Undefined: return "Undefined";
    case Status::Kind::Ok: return "Ok";
    case Status::Kind::Failed: return "Failed";
    case Status::Kind::Pending: return "Pending";
    case Status::Kind::WaitingFor: return "WaitingFor";
  }
  return "?";
}

Msg mergeMsg(const Msg& a, const Msg& b) {
  Msg out = a;
  out.validate = a.validate || b.validate;
  out.ds.insert(b.ds.begin(), b.ds.end());
  out.oks.insert(b.oks.begin(), b.oks.end());
  out.fs.insert(b.fs.begin(), b.fs.end());
  return out;
}

MsgMap mergeMsgMap(const MsgMap& a, const MsgMap& b) {
  MsgMap out = a;
  for (const auto& [l, m] : b) {
    auto it = out.find(l);
    if (it == out.end())
      out.emplace(l, m);
    else
      it->second = mergeMsg(it->second, m);
  }
  return out;
}

std::string depStr(const Dep& d, const std::function<std::string(LabelId)>& labelName) {
  return "(" + d.node.str() + "," + d.property.str() + "," + labelName(d.label) + ")";
}

namespace {

std::string setStr(const DepSet& s, const std::function<std::string(LabelId)>& labelName) {
  std::string out = "{";
  bool first = true;
  for (const auto& d : s) {
    if (!first) out += ",";
    first = false;
    out += depStr(d, labelName);
  }
  return out + "}";
}

}  // namespace

std::string msgStr(const Msg& m, const std::function<std::string(LabelId)>& labelName) {
  bool checked = !m.oks.empty() || !m.fs.empty();
  if (m.validate && m.ds.empty() && !checked) return "Validate";
  if (!m.validate && !m.ds.empty() && !checked) return "WaitFor" + setStr(m.ds, labelName);
  if (!m.validate && m.ds.empty() && checked) return "Checked" + setStr(m.oks, labelName) + setStr(m.fs, labelName);
  if (m.empty()) return "Empty";
  return std::string("Combined(") + (m.validate ? "validate" : "-") + "," + setStr(m.ds, labelName) + "," +
         setStr(m.oks, labelName) + "," + setStr(m.fs, labelName) + ")";
}

}  // namespace wsub
