#include "tileopt/model.hpp"

#include "tileopt/errors.hpp"
#include "tileopt/numeric.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace tileopt {

using json = nlohmann::ordered_json;

auto LoopNest::bounds() const -> std::vector<std::uint64_t> {
  std::vector<std::uint64_t> out;
  out.reserve(loops.size());
  for (const auto &l : loops)
    out.push_back(l.bound);
  return out;
}

auto LoopNest::loop_position(std::string_view n) const -> std::size_t {
  for (std::size_t i = 0; i < loops.size(); ++i)
    if (loops[i].name == n)
      return i;
  return npos;
}

namespace {

auto is_identifier(std::string_view s) -> bool {
  if (s.empty())
    return false;
  auto head = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
  return head(s.front()) && std::all_of(s.begin() + 1, s.end(), tail);
}

} // namespace

auto validate(const LoopNest &nest) -> std::vector<Violation> {
  std::vector<Violation> out;
  auto add = [&](std::string rule, std::string entity, std::string msg) {
    out.push_back({std::move(rule), std::move(entity), std::move(msg)});
  };
  if (nest.loops.empty())
    add("nonempty-loops", "loops", "a nest needs at least one loop");
  if (nest.arrays.empty())
    add("nonempty-arrays", "arrays", "a nest needs at least one array");

  std::set<std::string, std::less<>> seen;
  for (const auto &l : nest.loops) {
    if (!is_identifier(l.name))
      add("loop-identifier", l.name, "loop index name is not an identifier");
    if (l.bound < 1)
      add("loop-bound", l.name, "loop bound must be >= 1");
    if (!seen.insert(l.name).second)
      add("unique-loop-names", l.name, "duplicate loop index name");
  }

  std::set<std::string, std::less<>> covered;
  for (const auto &a : nest.arrays) {
    if (!is_identifier(a.name))
      add("array-identifier", a.name, "array name is not an identifier");
    if (a.support.empty())
      add("nonempty-support", a.name, "array support is empty");
    std::set<std::string, std::less<>> local;
    for (const auto &s : a.support) {
      if (!seen.contains(s))
        add("known-support", a.name, "support names unknown loop '" + s + "'");
      if (!local.insert(s).second)
        add("unique-support", a.name, "loop '" + s + "' repeated in support");
      covered.insert(s);
    }
  }
  for (const auto &l : nest.loops)
    if (!covered.contains(l.name))
      add("loop-covered", l.name, "loop index appears in no array support");
  return out;
}

void require_valid(const LoopNest &nest) {
  auto v = validate(nest);
  if (v.empty())
    return;
  std::ostringstream os;
  os << "invalid loop nest";
  for (const auto &x : v)
    os << "; " << x.rule << " (" << x.entity << "): " << x.message;
  throw InputError(os.str());
}

namespace {

[[noreturn]] void schema_error(const std::string &field, const std::string &what) {
  throw InputError("schema violation at '" + field + "': " + what);
}

void reject_unknown_keys(const json &obj, const std::string &where,
                         std::initializer_list<std::string_view> known) {
  for (const auto &[key, _] : obj.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      schema_error(where.empty() ? key : where + "." + key, "unknown field");
}

auto require_string(const json &obj, const std::string &key,
                    const std::string &where) -> std::string {
  auto field = where.empty() ? key : where + "." + key;
  if (!obj.contains(key))
    schema_error(field, "missing");
  if (!obj[key].is_string())
    schema_error(field, "expected string");
  return obj[key].get<std::string>();
}

} // namespace

auto parse_loopnest(std::string_view text) -> LoopNest {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON ") + e.what());
  }
  if (!doc.is_object())
    schema_error("$", "expected object");
  reject_unknown_keys(doc, "", {"name", "loops", "arrays"});

  LoopNest nest;
  nest.name = require_string(doc, "name", "");
  if (!doc.contains("loops") || !doc["loops"].is_array())
    schema_error("loops", "expected array");
  if (!doc.contains("arrays") || !doc["arrays"].is_array())
    schema_error("arrays", "expected array");

  for (std::size_t i = 0; i < doc["loops"].size(); ++i) {
    const auto &l = doc["loops"][i];
    auto where = "loops[" + std::to_string(i) + "]";
    if (!l.is_object())
      schema_error(where, "expected object");
    reject_unknown_keys(l, where, {"index", "bound"});
    LoopIndex idx;
    idx.name = require_string(l, "index", where);
    if (!l.contains("bound"))
      schema_error(where + ".bound", "missing");
    const auto &b = l["bound"];
    if (!b.is_number_unsigned() || b.get<std::uint64_t>() < 1)
      schema_error(where + ".bound", "expected integer >= 1");
    idx.bound = b.get<std::uint64_t>();
    nest.loops.push_back(std::move(idx));
  }

  for (std::size_t j = 0; j < doc["arrays"].size(); ++j) {
    const auto &a = doc["arrays"][j];
    auto where = "arrays[" + std::to_string(j) + "]";
    if (!a.is_object())
      schema_error(where, "expected object");
    reject_unknown_keys(a, where, {"name", "support"});
    ArrayAccess acc;
    acc.name = require_string(a, "name", where);
    if (!a.contains("support") || !a["support"].is_array())
      schema_error(where + ".support", "expected array of strings");
    for (std::size_t k = 0; k < a["support"].size(); ++k) {
      if (!a["support"][k].is_string())
        schema_error(where + ".support[" + std::to_string(k) + "]",
                     "expected string");
      acc.support.push_back(a["support"][k].get<std::string>());
    }
    nest.arrays.push_back(std::move(acc));
  }

  require_valid(nest);
  return nest;
}

auto load_loopnest(const std::string &path) -> LoopNest {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open input '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_loopnest(buf.str());
}

auto to_json_text(const LoopNest &nest) -> std::string {
  json doc;
  doc["name"] = nest.name;
  doc["loops"] = json::array();
  for (const auto &l : nest.loops)
    doc["loops"].push_back({{"index", l.name}, {"bound", l.bound}});
  doc["arrays"] = json::array();
  for (const auto &a : nest.arrays)
    doc["arrays"].push_back({{"name", a.name}, {"support", a.support}});
  return doc.dump(2) + "\n";
}

auto support_positions(const LoopNest &nest)
  -> std::vector<std::vector<std::size_t>> {
  std::vector<std::vector<std::size_t>> out(nest.arrays.size());
  for (std::size_t j = 0; j < nest.arrays.size(); ++j) {
    for (std::size_t i = 0; i < nest.loops.size(); ++i) {
      const auto &sup = nest.arrays[j].support;
      if (std::find(sup.begin(), sup.end(), nest.loops[i].name) != sup.end())
        out[j].push_back(i);
    }
  }
  return out;
}

auto support_matrix(const LoopNest &nest) -> SupportMatrix {
  SupportMatrix m(nest.arrays.size(), std::vector<int>(nest.loops.size(), 0));
  auto pos = support_positions(nest);
  for (std::size_t j = 0; j < pos.size(); ++j)
    for (auto i : pos[j])
      m[j][i] = 1;
  return m;
}

auto arrays_containing(const LoopNest &nest, std::size_t loop)
  -> std::vector<std::size_t> {
  std::vector<std::size_t> out;
  const auto &name = nest.loops.at(loop).name;
  for (std::size_t j = 0; j < nest.arrays.size(); ++j) {
    const auto &sup = nest.arrays[j].support;
    if (std::find(sup.begin(), sup.end(), name) != sup.end())
      out.push_back(j);
  }
  return out;
}

auto fits_in_cache(const LoopNest &nest, std::uint64_t cache_words) -> bool {
  auto pos = support_positions(nest);
  for (const auto &sup : pos) {
    std::uint64_t size = 1;
    for (auto i : sup)
      size = saturating_mul(size, nest.loops[i].bound);
    if (size > cache_words)
      return false;
  }
  return true;
}

} // namespace tileopt
