#include "tileopt/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <limits>
#include <sstream>

namespace tileopt {

namespace {

using json = nlohmann::ordered_json;

auto mode_name(Mode m) -> const char * {
  return m == Mode::Rational ? "rational" : "float";
}

auto big(const BigInt &v) -> json {
  if (v >= 0 && v <= std::numeric_limits<std::uint64_t>::max())
    return static_cast<std::uint64_t>(v);
  return v.str();
}

// Doubles printed with enough digits to round-trip, but stable.
auto fmt(double v) -> std::string {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

auto show(const Number &n) -> std::string {
  if (n.exact)
    return to_string(*n.exact);
  return fmt(n.value);
}

void put(json &obj, const std::string &key, const Number &n) {
  obj[key] = n.value;
  if (n.exact)
    obj[key + "_exact"] = to_string(*n.exact);
}

void put(json &obj, const std::string &key, const std::vector<Number> &v) {
  json values = json::array();
  json exact = json::array();
  bool all_exact = !v.empty();
  for (const auto &n : v) {
    values.push_back(n.value);
    if (n.exact)
      exact.push_back(to_string(*n.exact));
    else
      all_exact = false;
  }
  obj[key] = values;
  if (all_exact)
    obj[key + "_exact"] = exact;
}

auto names_of(const LoopNest &nest, const Subset &s) -> json {
  json out = json::array();
  for (auto i : s)
    out.push_back(nest.loops[i].name);
  return out;
}

auto header(const char *kind, const LoopNest &nest, std::uint64_t cache) -> json {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = kind;
  j["nest"] = nest.name;
  j["cache_words"] = cache;
  return j;
}

auto join(const std::vector<std::string> &parts, const char *sep) -> std::string {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i)
      out += sep;
    out += parts[i];
  }
  return out;
}

template <class T> auto join_nums(const std::vector<T> &v, const char *sep) -> std::string {
  std::vector<std::string> s;
  for (const auto &x : v) {
    if constexpr (std::is_same_v<T, Number>)
      s.push_back(show(x));
    else
      s.push_back(std::to_string(x));
  }
  return join(s, sep);
}

auto dump(const json &j) -> std::string { return j.dump(2) + "\n"; }

auto per_name(const LoopNest &nest, const std::vector<Number> &v, bool loops)
  -> std::string {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      os << ", ";
    os << (loops ? nest.loops[i].name : nest.arrays[i].name) << "=" << show(v[i]);
  }
  return os.str();
}

} // namespace

auto render_bound(const LoopNest &nest, const BoundReport &r, Format format)
  -> std::string {
  if (format == Format::Json) {
    auto j = header("bound", nest, r.cache_words);
    j["mode"] = mode_name(r.mode);
    put(j, "loop_exponents", r.exponents);
    put(j, "k_hbl", r.hbl.k_hbl);
    put(j, "hbl_weights", r.hbl.weights);
    put(j, "k_hat", r.k_hat);
    j["small_loops"] = names_of(nest, r.best.subset);
    put(j, "weights", r.best.weights);
    j["subsets_evaluated"] = r.subsets_evaluated;
    j["log2_tile_bound"] = r.log2_tile_bound;
    j["tile_bound"] = r.tile_bound ? json(*r.tile_bound) : json(nullptr);
    if (r.tile_bound_exact)
      j["tile_bound_exact"] = *r.tile_bound_exact;
    j["log2_lower_bound"] = r.log2_lower_bound;
    j["lower_bound_words"] = r.lower_bound_words;
    j["lower_bound_rounded"] =
      r.lower_bound_rounded ? json(*r.lower_bound_rounded) : json(nullptr);
    if (r.lower_bound_exact)
      j["lower_bound_exact"] = *r.lower_bound_exact;
    j["fits_in_cache"] = r.fits_in_cache;
    return dump(j);
  }
  std::ostringstream os;
  os << "nest " << nest.name << ", M = " << r.cache_words << " words ("
     << mode_name(r.mode) << ")\n";
  os << "  loop exponents: " << per_name(nest, r.exponents, true) << "\n";
  os << "  k_HBL = " << show(r.hbl.k_hbl) << "\n";
  os << "  k_hat = " << show(r.k_hat) << " with small loops {"
     << join(names_of(nest, r.best.subset).get<std::vector<std::string>>(), ", ")
     << "}\n";
  os << "  weights: " << per_name(nest, r.best.weights, false) << "\n";
  os << "  tile volume <= "
     << (r.tile_bound_exact ? *r.tile_bound_exact
                            : "2^" + fmt(r.log2_tile_bound))
     << "\n";
  os << "  words moved >= "
     << (r.lower_bound_exact ? *r.lower_bound_exact : fmt(r.lower_bound_words))
     << " (up to a constant factor)\n";
  if (r.fits_in_cache)
    os << "  note: every array fits in cache; the bound degenerates\n";
  return os.str();
}

auto render_tiling(const LoopNest &nest, const TilingSolution &s, const Tiling &t,
                   bool strict_footprint, Format format) -> std::string {
  if (format == Format::Json) {
    auto j = header("tile", nest, s.cache_words);
    j["strict_footprint"] = strict_footprint;
    put(j, "loop_exponents", s.exponents);
    put(j, "lambda", s.lambda);
    put(j, "value", s.value);
    put(j, "array_rhs", s.array_rhs);
    put(j, "array_duals", s.array_duals);
    put(j, "bound_duals", s.bound_duals);
    j["tile"] = t.dims;
    j["volume"] = big(t.volume);
    json fp;
    for (std::size_t a = 0; a < nest.num_arrays(); ++a)
      fp[nest.arrays[a].name] = t.footprints[a];
    j["footprints"] = fp;
    return dump(j);
  }
  std::ostringstream os;
  os << "nest " << nest.name << ", M = " << s.cache_words << " words"
     << (strict_footprint ? " (strict footprint)" : "") << "\n";
  os << "  lambda: " << per_name(nest, s.lambda, true) << "\n";
  os << "  LP value = " << show(s.value) << "\n";
  os << "  tile: " << join_nums(t.dims, " x ") << " (volume " << t.volume.str()
     << ")\n";
  for (std::size_t a = 0; a < nest.num_arrays(); ++a)
    os << "  footprint " << nest.arrays[a].name << ": " << t.footprints[a] << "\n";
  return os.str();
}

auto render_certificate(const LoopNest &nest, std::uint64_t cache_words,
                        const DualityCertificate &c, Format format) -> std::string {
  if (format == Format::Json) {
    auto j = header("certificate", nest, cache_words);
    put(j, "lp_value", c.lp_value);
    put(j, "dual_value", c.dual_value);
    put(j, "k_hat", c.k_hat);
    j["enumerated"] = c.enumerated;
    j["small_loops"] = c.enumerated ? names_of(nest, c.subset) : json(nullptr);
    put(j, "array_duals", c.array_duals);
    put(j, "bound_duals", c.bound_duals);
    j["gap"] = c.gap;
    j["dual_infeasibility"] = c.dual_infeasibility;
    j["valid"] = c.valid;
    return dump(j);
  }
  std::ostringstream os;
  os << "nest " << nest.name << ", M = " << cache_words << " words\n";
  os << "  tiling LP value = " << show(c.lp_value) << "\n";
  os << "  dual value      = " << show(c.dual_value) << "\n";
  os << "  k_hat           = " << show(c.k_hat)
     << (c.enumerated ? "" : " (dual value; subsets not enumerated)") << "\n";
  os << "  array duals: " << per_name(nest, c.array_duals, false) << "\n";
  os << "  bound duals: " << per_name(nest, c.bound_duals, true) << "\n";
  os << "  gap = " << fmt(c.gap) << ", certificate "
     << (c.valid ? "valid" : "INVALID") << "\n";
  return os.str();
}

auto render_rect_verification(const LoopNest &nest, std::uint64_t cache_words,
                              const RectVerification &v, Format format)
  -> std::string {
  if (format == Format::Json) {
    auto j = header("verify", nest, cache_words);
    j["oracle"] = "rect";
    j["optimum_volume"] = v.rectangle.volume;
    j["optimum_tile"] = v.rectangle.dims;
    j["search_space"] = v.rectangle.search_space;
    put(j, "lp_value", v.lp_value);
    j["log2_lp_volume"] = v.log2_lp_volume;
    j["realized_tile"] = v.realized.dims;
    j["realized_volume"] = big(v.realized.volume);
    j["upper_bound_holds"] = v.upper_bound_holds;
    j["realized_within_factor"] = v.realized_within_factor;
    return dump(j);
  }
  std::ostringstream os;
  os << "nest " << nest.name << ", M = " << cache_words << " words\n";
  os << "  best rectangle: " << join_nums(v.rectangle.dims, " x ") << " (volume "
     << v.rectangle.volume << ", " << v.rectangle.search_space
     << " candidates)\n";
  os << "  LP value = " << show(v.lp_value) << ", M^value = 2^"
     << fmt(v.log2_lp_volume) << ": " << (v.upper_bound_holds ? "ok" : "VIOLATED")
     << "\n";
  os << "  realized LP tile: " << join_nums(v.realized.dims, " x ") << " (volume "
     << v.realized.volume.str() << "), within 2^d of optimum: "
     << (v.realized_within_factor ? "yes" : "NO") << "\n";
  return os.str();
}

auto render_rectangle_check(const LoopNest &nest, std::uint64_t cache_words,
                            const RectangleCheck &c, Format format) -> std::string {
  if (format == Format::Json) {
    auto j = header("verify", nest, cache_words);
    j["oracle"] = "subset";
    j["rectangle_optimal"] = c.rectangle_optimal;
    j["rectangle_volume"] = c.rectangle.volume;
    j["rectangle_tile"] = c.rectangle.dims;
    j["subset_volume"] = c.subset.volume;
    j["subset_points"] = c.subset.points;
    j["grid_points"] = c.subset.search_space;
    return dump(j);
  }
  std::ostringstream os;
  os << "nest " << nest.name << ", M = " << cache_words << " words\n";
  os << "  best rectangle: " << join_nums(c.rectangle.dims, " x ") << " (volume "
     << c.rectangle.volume << ")\n";
  os << "  best arbitrary tile: " << c.subset.volume << " points of "
     << c.subset.search_space << "\n";
  os << "  rectangle optimal: " << (c.rectangle_optimal ? "yes" : "no") << "\n";
  return os.str();
}

auto render_simulation(const LoopNest &nest, std::uint64_t cache_words,
                       const Tiling &t, const SimReport &r, Format format)
  -> std::string {
  if (format == Format::Json) {
    auto j = header("simulate", nest, cache_words);
    j["tile"] = t.dims;
    j["tile_count"] = big(r.tile_count);
    j["words_moved"] = big(r.words_moved);
    json per;
    for (std::size_t a = 0; a < nest.num_arrays(); ++a)
      per[nest.arrays[a].name] = big(r.per_array_words[a]);
    j["per_array_words"] = per;
    j["lower_bound_words"] = r.lower_bound_words;
    j["ratio"] = r.ratio;
    json classes = json::array();
    for (const auto &c : r.tile_classes) {
      json e;
      e["count"] = big(c.count);
      e["extents"] = c.extents;
      e["footprints"] = c.footprints;
      e["total"] = c.total;
      classes.push_back(e);
    }
    j["tile_classes"] = classes;
    j["max_tile_total"] = r.max_tile_total;
    j["tiles_over_aggregate"] = big(r.tiles_over_aggregate);
    j["fits_in_cache"] = r.fits_in_cache;
    j["warnings"] = r.warnings;
    return dump(j);
  }
  std::ostringstream os;
  os << "nest " << nest.name << ", M = " << cache_words << " words, tile "
     << join_nums(t.dims, " x ") << "\n";
  os << "  tiles: " << r.tile_count.str() << "\n";
  os << "  words moved: " << r.words_moved.str() << "\n";
  for (std::size_t a = 0; a < nest.num_arrays(); ++a)
    os << "    " << nest.arrays[a].name << ": " << r.per_array_words[a].str() << "\n";
  os << "  lower bound: " << fmt(r.lower_bound_words) << " words, ratio "
     << fmt(r.ratio) << "\n";
  for (const auto &w : r.warnings)
    os << "  warning: " << w << "\n";
  return os.str();
}

} // namespace tileopt
