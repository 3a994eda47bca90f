#include "cli.hpp"

#include "tileopt/errors.hpp"
#include "tileopt/fixtures.hpp"
#include "tileopt/hbl.hpp"
#include "tileopt/model.hpp"
#include "tileopt/oracle.hpp"
#include "tileopt/report.hpp"
#include "tileopt/simulate.hpp"
#include "tileopt/tiling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>

namespace tileopt::cli {

namespace {

struct Config {
  std::string command;
  std::string input;
  std::optional<std::uint64_t> cache;
  Mode mode{Mode::Float};
  bool strict_footprint{false};
  Format format{Format::Json};
  std::string oracle{"rect"};
  std::optional<std::uint64_t> cap;
  std::vector<std::uint64_t> tile;
};

// Raised for theorem violations detected after the report was written.
struct Inconsistency {
  std::string kind;
  std::string message;
};

const std::string kFixturePrefix = "fixture:";

auto load(const std::string &input) -> LoopNest {
  if (input.rfind(kFixturePrefix, 0) == 0)
    return fixtures::by_name(input.substr(kFixturePrefix.size()));
  return load_loopnest(input);
}

auto need_cache(const Config &c) -> std::uint64_t {
  if (!c.cache)
    throw InputError("--cache is required for '" + c.command + "'");
  if (*c.cache < 2)
    throw InputError("--cache must be at least 2 words (got " +
                     std::to_string(*c.cache) + ")");
  return *c.cache;
}

auto chosen_tile(const Config &c, const LoopNest &nest, std::uint64_t m)
  -> std::vector<std::uint64_t> {
  if (c.tile.empty()) {
    auto lp = solve_tiling_lp(nest, m, {c.mode, c.strict_footprint});
    return realize_tile(nest, lp, c.strict_footprint).dims;
  }
  auto problems = tiling_violations(nest, c.tile, m);
  if (!problems.empty())
    throw InputError("invalid --tile: " + problems.front());
  return c.tile;
}

auto execute(const Config &c, std::ostream &out) -> void {
  auto nest = load(c.input);
  require_valid(nest);

  if (c.command == "bound") {
    auto m = need_cache(c);
    out << render_bound(nest, best_bound(nest, m, c.mode), c.format);
  } else if (c.command == "tile") {
    auto m = need_cache(c);
    auto lp = solve_tiling_lp(nest, m, {c.mode, c.strict_footprint});
    auto t = realize_tile(nest, lp, c.strict_footprint);
    out << render_tiling(nest, lp, t, c.strict_footprint, c.format);
  } else if (c.command == "certify") {
    auto m = need_cache(c);
    auto cert = duality_certificate(nest, m, c.mode);
    out << render_certificate(nest, m, cert, c.format);
    if (!cert.valid)
      throw Inconsistency{"duality", "tiling LP value and slicing bound differ by " +
                                       std::to_string(cert.gap)};
  } else if (c.command == "verify") {
    auto m = need_cache(c);
    if (c.oracle == "subset") {
      auto check = check_rectangle_optimality(
        nest, m, kDefaultRectangleCap, c.cap.value_or(kDefaultSubsetExactCap));
      out << render_rectangle_check(nest, m, check, c.format);
      if (!check.rectangle_optimal)
        throw Inconsistency{"oracle", "an arbitrary tile of " +
                                        std::to_string(check.subset.volume) +
                                        " points beats the best rectangle (" +
                                        std::to_string(check.rectangle.volume) + ")"};
    } else {
      auto v = verify_rectangle(nest, m, c.cap.value_or(kDefaultRectangleCap), c.mode);
      out << render_rect_verification(nest, m, v, c.format);
      if (!v.upper_bound_holds)
        throw Inconsistency{"oracle", "rectangle optimum exceeds M^(LP value)"};
      if (!v.realized_within_factor)
        throw Inconsistency{"oracle", "realized LP tile is below optimum / 2^d"};
    }
  } else if (c.command == "simulate") {
    auto m = need_cache(c);
    auto dims = chosen_tile(c, nest, m);
    auto report = simulate_comm(nest, dims, m);
    out << render_simulation(nest, m, make_tiling(nest, dims), report, c.format);
    if (!report.fits_in_cache && report.words_moved.convert_to<double>() <
                                   report.lower_bound_words * (1 - kTolerance))
      throw Inconsistency{"simulate", "simulated traffic is below the lower bound"};
  } else if (c.command == "codegen") {
    std::vector<std::uint64_t> dims;
    if (c.tile.empty() || c.cache) {
      auto m = need_cache(c);
      dims = chosen_tile(c, nest, m);
    } else {
      if (c.tile.size() != nest.depth())
        throw InputError("--tile needs " + std::to_string(nest.depth()) + " sizes");
      for (std::size_t i = 0; i < c.tile.size(); ++i)
        if (c.tile[i] < 1 || c.tile[i] > nest.loops[i].bound)
          throw InputError("--tile size for " + nest.loops[i].name + " out of range");
      dims = c.tile;
    }
    auto code = emit_tiled_loops(nest, make_tiling(nest, dims));
    if (c.format == Format::Json) {
      nlohmann::ordered_json j;
      j["schema"] = kSchemaVersion;
      j["kind"] = "codegen";
      j["nest"] = nest.name;
      j["tile"] = dims;
      j["code"] = code;
      out << j.dump(2) << "\n";
    } else {
      out << code;
    }
  }
}

} // namespace

auto run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
  -> int {
  Config c;
  CLI::App app{"Communication-optimal tiling for projective loop nests", "tileopt"};
  app.require_subcommand(1);
  app.fallthrough();

  const std::map<std::string, Mode> modes{{"float", Mode::Float},
                                          {"rational", Mode::Rational}};
  const std::map<std::string, Format> formats{{"text", Format::Text},
                                              {"json", Format::Json}};
  app.add_option("--cache", c.cache, "Cache size M in words");
  app.add_option("--mode", c.mode, "Arithmetic: float or rational")
    ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_flag("--strict-footprint", c.strict_footprint,
               "Budget M words for the sum of a tile's footprints");
  app.add_option("--format", c.format, "Report format: text or json")
    ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  app.add_option("--oracle", c.oracle, "verify: rect or subset")
    ->check(CLI::IsMember({"rect", "subset"}));
  app.add_option("--cap", c.cap,
                 "verify: rectangle candidate cap (rect) or exact grid cap (subset)");
  app.add_option("--tile", c.tile, "simulate/codegen: explicit tile sizes")
    ->delimiter(',');

  const std::vector<std::pair<const char *, const char *>> commands{
    {"bound", "Communication lower bound"},
    {"tile", "Optimal rectangular tile from the tiling LP"},
    {"certify", "Check the tiling LP against the lower bound by duality"},
    {"verify", "Check against the brute-force oracles"},
    {"simulate", "Count words moved by a tiled execution"},
    {"codegen", "Emit tiled loop pseudo-code"}};
  for (const auto &[name, help] : commands) {
    auto *sub = app.add_subcommand(name, help);
    sub->add_option("input", c.input, "Loop nest JSON file, or fixture:<name>")
      ->required();
    sub->callback([&c, name = std::string(name)] { c.command = name; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error[usage]: " << e.what() << "\n";
    return 1;
  }

  try {
    execute(c, out);
    return 0;
  } catch (const Inconsistency &e) {
    err << "error[" << e.kind << "]: " << e.message << "\n";
    return 2;
  } catch (const LimitError &e) {
    err << "error[limit]: " << e.what() << "\n";
    return 1;
  } catch (const InputError &e) {
    err << "error[validation]: " << e.what() << "\n";
    return 1;
  } catch (const InternalError &e) {
    err << "error[internal]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error[internal]: " << e.what() << "\n";
    return 2;
  }
}

} // namespace tileopt::cli
