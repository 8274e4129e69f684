#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <string>

#include "wzexp/instance_io.hpp"

using namespace wzexp;

namespace {

std::size_t error_line(const std::string& text, std::string* field = nullptr) {
  try {
    parse_instance_text(text);
  } catch (const InstanceError& e) {
    if (field) *field = e.field();
    return e.line();
  }
  FAIL("no error for: " << text);
  return 0;
}

}  // namespace

TEST_CASE("builtins") {
  const auto a = parse_instance_text(R"({"builtin": "and_dfc", "rate": 0.25})");
  CHECK(a.x_size() == 2);
  CHECK(a.z_size == 2);
  CHECK(a.rate == 0.25);
  CHECK(a.level == 0.0);
  CHECK(a.name == "and_dfc");
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      CHECK(a.p(x, y) == 0.25);
      for (std::size_t z = 0; z < 2; ++z) CHECK(a.d(x, y, z) == (z != (x & y) ? 1.0 : 0.0));
    }
  const auto s = parse_instance_text(R"({"builtin": "slepian_wolf", "p_xy": [[0.3, 0.2], [0.1, 0.4]]})");
  CHECK(s.z_size == 2);
  CHECK(s.p(1, 0) == 0.1);
  CHECK(s.d(1, 0, 1) == 0.0);
  CHECK(s.d(1, 0, 0) == 1.0);
  CHECK(s.rate == 0.0);
}

TEST_CASE("schema errors carry line and field") {
  std::string field;
  CHECK(error_line("{\n  \"builtin\": \"slepian_wolf\",\n  \"p_xy\": [[0.3, 0.3], [0.1, 0.4]]\n}", &field) == 3);
  CHECK(field == "p_xy");
  CHECK(error_line("{\n  \"builtin\": \"and_dfc\",\n  \"colour\": 1\n}", &field) == 3);
  CHECK(field == "colour");
  CHECK(error_line("{\n  \"builtin\": \"and_dfc\",\n  \"rate\": -1\n}", &field) == 3);
  CHECK(field == "rate");
  CHECK(error_line("{\n  \"builtin\": \"xor\"\n}", &field) == 2);
  CHECK(error_line("{\n  \"builtin\": \"and_dfc\",\n  \"level\": 0.1\n}", &field) == 3);
  CHECK(error_line("{\n  \"x_size\": 2,\n  \"y_size\": 1,\n  \"z_size\": 2,\n  \"p_xy\": [[0.5], [0.5]],\n"
                   "  \"distortion\": [0, 1, 1]\n}",
                   &field) == 6);
  CHECK(field == "distortion");
  CHECK(error_line("{\n  \"builtin\": \"and_dfc\",\n  \"rate\": \n}") == 4);
  CHECK(error_line("[1, 2]") == 1);
  // infeasible level
  CHECK(error_line("{\"x_size\": 1, \"y_size\": 1, \"z_size\": 1, \"p_xy\": [[1]], \"distortion\": [1], \"level\": 0.5}",
                   &field) == 1);
  CHECK(field == "level");
  CHECK_THROWS_AS(parse_instance("/nonexistent/instance.json"), std::invalid_argument);
}

TEST_CASE("round trip") {
  const auto inst = WZInstance::make(make_source({{0.2, 0.3}, {0.4, 0.1}}), 3,
                                     {0, 1, 2, 1, 0, 1, 2, 2, 0, 0.5, 1, 0}, 0.7, 0.4, "rt");
  const auto back = parse_instance_text(instance_to_json(inst));
  CHECK(back.name == "rt");
  CHECK(std::ranges::equal(back.p_xy.values(), inst.p_xy.values()));
  CHECK(back.distortion == inst.distortion);
  CHECK(back.z_size == 3);
  CHECK(back.rate == 0.7);
  CHECK(back.level == 0.4);
}

TEST_CASE("shipped instance files parse") {
  std::size_t seen = 0;
  for (const auto& e : std::filesystem::directory_iterator(WZEXP_INSTANCE_DIR)) {
    if (e.path().extension() != ".json") continue;
    CAPTURE(e.path().string());
    CHECK_NOTHROW(parse_instance(e.path().string()));
    ++seen;
  }
  CHECK(seen >= 3);
}
