#include "tileopt/simulate.hpp"

#include "tileopt/errors.hpp"
#include "tileopt/hbl.hpp"

#include <array>
#include <cmath>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_set>

namespace tileopt {

namespace {

struct ExtentClass {
  std::uint64_t count;
  std::uint64_t extent;
};

auto classes_of(std::uint64_t bound, std::uint64_t tile) -> std::vector<ExtentClass> {
  std::vector<ExtentClass> out;
  if (bound / tile > 0)
    out.push_back({bound / tile, tile});
  if (bound % tile > 0)
    out.push_back({1, bound % tile});
  return out;
}

auto lower_bound_for(const LoopNest &nest, std::uint64_t cache_words) -> double {
  if (nest.depth() <= kMaxEnumerationDepth)
    return best_bound(nest, cache_words).lower_bound_words;
  auto lp = solve_tiling_lp(nest, cache_words);
  double words = std::pow(static_cast<double>(cache_words), 1.0 - lp.value.value);
  for (const auto &l : nest.loops)
    words *= static_cast<double>(l.bound);
  return words;
}

} // namespace

auto simulate_comm(const LoopNest &nest, const std::vector<std::uint64_t> &dims,
                   std::uint64_t cache_words, double lower_bound_words)
  -> SimReport {
  require_valid(nest);
  if (auto bad = tiling_violations(nest, dims, cache_words); !bad.empty()) {
    std::string msg = "invalid tiling";
    for (const auto &b : bad)
      msg += "; " + b;
    throw InputError(msg);
  }
  const auto d = nest.depth();
  const auto supports = support_positions(nest);

  std::vector<std::vector<ExtentClass>> per_loop(d);
  for (std::size_t i = 0; i < d; ++i)
    per_loop[i] = classes_of(nest.loops[i].bound, dims[i]);

  SimReport r;
  r.per_array_words.assign(nest.num_arrays(), 0);
  r.lower_bound_words = lower_bound_words;
  r.fits_in_cache = fits_in_cache(nest, cache_words);

  // Odometer over per-loop classes, full tiles before the boundary tile.
  std::vector<std::size_t> pick(d, 0);
  bool more = true;
  while (more) {
    TileClass c;
    c.count = 1;
    for (std::size_t i = 0; i < d; ++i) {
      c.count *= per_loop[i][pick[i]].count;
      c.extents.push_back(per_loop[i][pick[i]].extent);
    }
    for (std::size_t j = 0; j < supports.size(); ++j) {
      std::uint64_t f = 1;
      for (auto i : supports[j])
        f *= c.extents[i];
      c.footprints.push_back(f);
      c.total += f;
      r.per_array_words[j] += c.count * f;
    }
    r.tile_count += c.count;
    r.words_moved += c.count * c.total;
    r.max_tile_total = std::max(r.max_tile_total, c.total);
    if (c.total > cache_words)
      r.tiles_over_aggregate += c.count;
    r.tile_classes.push_back(std::move(c));

    more = false;
    for (std::size_t i = d; i > 0 && !more; --i) {
      if (++pick[i - 1] < per_loop[i - 1].size())
        more = true;
      else
        pick[i - 1] = 0;
    }
  }
  r.ratio = r.words_moved.convert_to<double>() / lower_bound_words;
  if (r.tiles_over_aggregate > 0) {
    std::ostringstream os;
    os << r.tiles_over_aggregate << " tile(s) touch more than M = " << cache_words
       << " words across all arrays (largest " << r.max_tile_total
       << "); the per-array budget allows up to n*M";
    r.warnings.push_back(os.str());
  }
  if (r.fits_in_cache)
    r.warnings.push_back("every array fits in cache; the lower bound degenerates "
                         "to M while the true cost is the sum of array sizes");
  return r;
}

auto simulate_comm(const LoopNest &nest, const std::vector<std::uint64_t> &dims,
                   std::uint64_t cache_words) -> SimReport {
  return simulate_comm(nest, dims, cache_words, lower_bound_for(nest, cache_words));
}

auto parse_tiled_program(std::string_view text) -> TiledProgram {
  static const std::regex plain_for(
    R"(^( *)for ([A-Za-z_]\w*) in range\(0, (\d+)\):$)");
  static const std::regex clamped_for(
    R"(^( *)for ([A-Za-z_]\w*) in range\(0, min\((\d+), (\d+) - (\d+)\*([A-Za-z_]\w*)\)\):$)");
  static const std::regex assign(
    R"(^( *)([A-Za-z_]\w*) = (\d+)\*([A-Za-z_]\w*) \+ ([A-Za-z_]\w*)$)");
  static const std::regex use(R"(^( *)use ([A-Za-z_]\w*)\[([^\]]*)\]$)");

  TiledProgram prog;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool in_body = false;
  auto fail = [&](const std::string &why) {
    throw InputError("tiled program line " + std::to_string(lineno) + ": " + why);
  };
  auto check_indent = [&](const std::smatch &m, std::size_t depth) {
    if (m[1].length() != static_cast<std::ptrdiff_t>(2 * depth))
      fail("unexpected indentation");
  };
  auto num = [](const std::ssub_match &m) { return std::stoll(m.str()); };

  static const std::regex header(R"(^# tiled \S+ tile \d+( x \d+)*$)");
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!seen_header) {
      if (!std::regex_match(line, header))
        fail("expected '# tiled <name> tile <b1> x ...' header");
      seen_header = true;
      continue;
    }
    if (line.empty())
      continue;
    std::smatch m;
    if (std::regex_match(line, m, plain_for) || std::regex_match(line, m, clamped_for)) {
      if (in_body)
        fail("loop after the loop body started");
      check_indent(m, prog.loops.size());
      TiledProgram::Loop loop;
      loop.var = m[2].str();
      loop.bound.limit = num(m[3]);
      if (m.size() > 4 && m[4].matched) {
        loop.bound.clamped = true;
        loop.bound.total = num(m[4]);
        loop.bound.step = num(m[5]);
        loop.bound.var = m[6].str();
      } else if (prog.outer_depth == prog.loops.size()) {
        ++prog.outer_depth;
      }
      prog.loops.push_back(std::move(loop));
    } else if (std::regex_match(line, m, assign)) {
      in_body = true;
      check_indent(m, prog.loops.size());
      if (!prog.uses.empty())
        fail("assignment after a use");
      prog.assigns.push_back({m[2].str(), num(m[3]), m[4].str(), m[5].str()});
    } else if (std::regex_match(line, m, use)) {
      in_body = true;
      check_indent(m, prog.loops.size());
      TiledProgram::Use u;
      u.array = m[2].str();
      std::istringstream idx(m[3].str());
      std::string tok;
      while (std::getline(idx, tok, ',')) {
        auto b = tok.find_first_not_of(' ');
        auto e = tok.find_last_not_of(' ');
        if (b == std::string::npos)
          fail("empty index in use");
        u.indices.push_back(tok.substr(b, e - b + 1));
      }
      prog.uses.push_back(std::move(u));
    } else {
      fail("unrecognized statement '" + line + "'");
    }
  }
  if (prog.loops.empty())
    throw InputError("tiled program has no loops");

  // Structure: d outer loops o_X, d clamped inner loops t_X, d assignments
  // X = b*o_X + t_X, and uses over the assigned names.
  const auto d = prog.outer_depth;
  if (prog.loops.size() != 2 * d || prog.assigns.size() != d || prog.uses.empty())
    throw InputError("tiled program must have matching outer loops, inner loops "
                     "and assignments, and at least one use");
  std::unordered_set<std::string> assigned;
  for (std::size_t i = 0; i < d; ++i) {
    const auto &outer = prog.loops[i];
    const auto &inner = prog.loops[d + i];
    const auto &a = prog.assigns[i];
    const auto x = a.target;
    if (outer.var != "o_" + x || inner.var != "t_" + x || a.outer != outer.var ||
        a.inner != inner.var || !inner.bound.clamped || inner.bound.var != outer.var ||
        inner.bound.step != a.step || inner.bound.limit != a.step)
      throw InputError("tiled program loops for '" + x + "' are inconsistent");
    assigned.insert(x);
  }
  for (const auto &u : prog.uses)
    for (const auto &i : u.indices)
      if (!assigned.count(i))
        throw InputError("use of " + u.array + " names unknown index '" + i + "'");
  return prog;
}

namespace {

struct Machine {
  const TiledProgram &prog;
  std::map<std::string, std::size_t, std::less<>> slot;
  std::vector<std::int64_t> env;
  std::vector<std::size_t> loop_slot;
  std::vector<std::size_t> bound_slot; // for clamped bounds
  std::vector<std::array<std::size_t, 3>> assign_slots; // target, outer, inner
  std::vector<std::vector<std::size_t>> use_slots;
  std::vector<std::int64_t> point;

  explicit Machine(const TiledProgram &p) : prog(p) {
    auto get = [&](const std::string &name) {
      auto [it, inserted] = slot.try_emplace(name, slot.size());
      return it->second;
    };
    auto lookup = [&](const std::string &name) {
      auto it = slot.find(name);
      if (it == slot.end())
        throw InputError("tiled program references undefined '" + name + "'");
      return it->second;
    };
    for (const auto &l : p.loops) {
      bound_slot.push_back(l.bound.clamped ? lookup(l.bound.var) : 0);
      loop_slot.push_back(get(l.var));
    }
    for (const auto &a : p.assigns) {
      auto outer = lookup(a.outer);
      auto inner = lookup(a.inner);
      assign_slots.push_back({get(a.target), outer, inner});
    }
    for (const auto &u : p.uses) {
      std::vector<std::size_t> s;
      for (const auto &x : u.indices)
        s.push_back(lookup(x));
      use_slots.push_back(std::move(s));
    }
    env.assign(slot.size(), 0);
    point.resize(p.assigns.size());
  }

  auto limit(std::size_t k) const -> std::int64_t {
    const auto &b = prog.loops[k].bound;
    if (!b.clamped)
      return b.limit;
    return std::min(b.limit, b.total - b.step * env[bound_slot[k]]);
  }

  template <class Body>
  void run(std::size_t k, const Body &body, const std::function<void()> &tile_begin,
           const std::function<void()> &tile_end) {
    if (k == prog.outer_depth && tile_begin)
      tile_begin();
    if (k == prog.loops.size()) {
      for (std::size_t a = 0; a < assign_slots.size(); ++a) {
        auto [t, o, i] = assign_slots[a];
        env[t] = prog.assigns[a].step * env[o] + env[i];
        point[a] = env[t];
      }
      body();
    } else {
      const auto n = limit(k);
      for (std::int64_t v = 0; v < n; ++v) {
        env[loop_slot[k]] = v;
        run(k + 1, body, tile_begin, tile_end);
      }
    }
    if (k == prog.outer_depth && tile_end)
      tile_end();
  }
};

} // namespace

void interpret(const TiledProgram &program,
               const std::function<void(std::span<const std::int64_t>)> &visit) {
  Machine m(program);
  m.run(0, [&] { visit(m.point); }, {}, {});
}

auto interpret_cost(const TiledProgram &program) -> InterpretedCost {
  Machine m(program);
  InterpretedCost cost;
  cost.per_array.assign(program.uses.size(), 0);
  std::vector<std::set<std::vector<std::int64_t>>> touched(program.uses.size());
  auto body = [&] {
    ++cost.iterations;
    for (std::size_t u = 0; u < m.use_slots.size(); ++u) {
      std::vector<std::int64_t> key;
      for (auto s : m.use_slots[u])
        key.push_back(m.env[s]);
      touched[u].insert(std::move(key));
    }
  };
  auto begin = [&] {
    for (auto &t : touched)
      t.clear();
  };
  auto end = [&] {
    bool any = false;
    for (std::size_t u = 0; u < touched.size(); ++u) {
      cost.per_array[u] += touched[u].size();
      cost.words += touched[u].size();
      any = any || !touched[u].empty();
    }
    if (any)
      ++cost.tiles;
  };
  m.run(0, body, begin, end);
  return cost;
}

} // namespace tileopt
