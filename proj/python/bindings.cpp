#include "tileopt/errors.hpp"
#include "tileopt/fixtures.hpp"
#include "tileopt/hbl.hpp"
#include "tileopt/model.hpp"
#include "tileopt/oracle.hpp"
#include "tileopt/report.hpp"
#include "tileopt/simulate.hpp"
#include "tileopt/tiling.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace tileopt;

namespace {

// Every entry point takes a nest as JSON text and returns a JSON report, so
// the Python side sees exactly what the command-line tool prints.
auto nest_from(const std::string &text) -> LoopNest {
  auto nest = parse_loopnest(text);
  require_valid(nest);
  return nest;
}

auto mode_from(const std::string &mode) -> Mode {
  if (mode == "float")
    return Mode::Float;
  if (mode == "rational")
    return Mode::Rational;
  throw InputError("mode must be 'float' or 'rational'");
}

auto cache_from(std::uint64_t m) -> std::uint64_t {
  if (m < 2)
    throw InputError("cache_words must be at least 2");
  return m;
}

auto pick_tile(const LoopNest &nest, std::uint64_t m,
               const std::optional<std::vector<std::uint64_t>> &tile)
  -> std::vector<std::uint64_t> {
  if (tile)
    return *tile;
  return realize_tile(nest, solve_tiling_lp(nest, m)).dims;
}

} // namespace

PYBIND11_MODULE(_tileopt, m) {
  m.doc() = "Communication lower bounds and tilings for projective loop nests";
  m.attr("SCHEMA_VERSION") = kSchemaVersion;

  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<LimitError>(m, "LimitError", input_error.ptr());
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  m.def("fixture", [](const std::string &name) { return to_json_text(fixtures::by_name(name)); },
        py::arg("name"));

  m.def(
    "bound",
    [](const std::string &nest_json, std::uint64_t cache_words, const std::string &mode) {
      auto nest = nest_from(nest_json);
      auto r = best_bound(nest, cache_from(cache_words), mode_from(mode));
      return render_bound(nest, r, Format::Json);
    },
    py::arg("nest"), py::arg("cache_words"), py::arg("mode") = "float");

  m.def(
    "tile",
    [](const std::string &nest_json, std::uint64_t cache_words, const std::string &mode,
       bool strict_footprint) {
      auto nest = nest_from(nest_json);
      auto lp = solve_tiling_lp(nest, cache_from(cache_words),
                                {mode_from(mode), strict_footprint});
      auto t = realize_tile(nest, lp, strict_footprint);
      return render_tiling(nest, lp, t, strict_footprint, Format::Json);
    },
    py::arg("nest"), py::arg("cache_words"), py::arg("mode") = "float",
    py::arg("strict_footprint") = false);

  m.def(
    "certify",
    [](const std::string &nest_json, std::uint64_t cache_words, const std::string &mode) {
      auto nest = nest_from(nest_json);
      auto mw = cache_from(cache_words);
      return render_certificate(nest, mw, duality_certificate(nest, mw, mode_from(mode)),
                                Format::Json);
    },
    py::arg("nest"), py::arg("cache_words"), py::arg("mode") = "float");

  m.def(
    "verify",
    [](const std::string &nest_json, std::uint64_t cache_words, const std::string &oracle,
       std::optional<std::uint64_t> cap, const std::string &mode) {
      auto nest = nest_from(nest_json);
      auto mw = cache_from(cache_words);
      if (oracle == "subset")
        return render_rectangle_check(
          nest, mw,
          check_rectangle_optimality(nest, mw, kDefaultRectangleCap,
                                     cap.value_or(kDefaultSubsetExactCap)),
          Format::Json);
      if (oracle != "rect")
        throw InputError("oracle must be 'rect' or 'subset'");
      auto v = verify_rectangle(nest, mw, cap.value_or(kDefaultRectangleCap), mode_from(mode));
      return render_rect_verification(nest, mw, v, Format::Json);
    },
    py::arg("nest"), py::arg("cache_words"), py::arg("oracle") = "rect",
    py::arg("cap") = py::none(), py::arg("mode") = "float");

  m.def(
    "simulate",
    [](const std::string &nest_json, std::uint64_t cache_words,
       std::optional<std::vector<std::uint64_t>> tile) {
      auto nest = nest_from(nest_json);
      auto mw = cache_from(cache_words);
      auto dims = pick_tile(nest, mw, tile);
      auto r = simulate_comm(nest, dims, mw);
      return render_simulation(nest, mw, make_tiling(nest, dims), r, Format::Json);
    },
    py::arg("nest"), py::arg("cache_words"), py::arg("tile") = py::none());

  m.def(
    "codegen",
    [](const std::string &nest_json, std::vector<std::uint64_t> tile) {
      auto nest = nest_from(nest_json);
      return emit_tiled_loops(nest, make_tiling(nest, std::move(tile)));
    },
    py::arg("nest"), py::arg("tile"));
}
