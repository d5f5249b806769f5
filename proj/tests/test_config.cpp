#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "fluxvol/config.hpp"
#include "fluxvol/report.hpp"

using namespace fluxvol;

TEST_CASE("defaults describe the standard helical run") {
  const RunConfig c;
  CHECK(c.field == "helical");
  CHECK(c.helical.eps == 0.007);
  CHECK(c.methods.size() == 1);
  CHECK(c.n == 100);
  CHECK(c.method.q == 6);
  CHECK(c.method.n_avg == 10);
  CHECK(c.metadata_path() == "volume.csv.json");
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("parsing key = value text") {
  const std::string text =
      "# inner interval\n"
      "field = helical\n"
      "method = thm3p, thm4   # two methods\n"
      "region = inner\n"
      "psi2 = -0.0231876\n"
      "n = 50\n"
      "helical.f = -4, 1\n"
      "n = 60\n";
  const RunConfig c = parse_config(text);
  REQUIRE(c.methods.size() == 2);
  CHECK(c.methods[1] == Method::Thm4);
  CHECK(c.psi2 == -0.0231876);
  CHECK(c.n == 60);
  CHECK(c.helical.f.coeffs == std::vector<double>{-4.0, 1.0});
}

TEST_CASE("serialize(parse(text)) is a fixed point") {
  RunConfig c;
  c.field = "axisym";
  c.methods = {Method::Thm1, Method::Grid};
  c.psi2 = 0.1 + 0.2;  // not representable in short decimal form
  c.grid.placement = NodePlacement::Endpoints;
  c.endpoint = EndpointPolicy::Direct;
  c.method.tracer.rel_tol = 3e-12;
  c.seed = 42;
  const std::string once = serialize(c);
  const RunConfig back = parse_config(once);
  CHECK(serialize(back) == once);
  CHECK(back.psi2 == c.psi2);
  CHECK(back.grid.placement == NodePlacement::Endpoints);
  CHECK(serialize(parse_config(serialize(back))) == once);
  CHECK(serialize(parse_config(serialize(RunConfig{}))) == serialize(RunConfig{}));
}

TEST_CASE("errors name the offending key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_config(text).validate();
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("nonsense = 1\n") == "nonsense");
  CHECK(key_of("psi1 = abc\n") == "psi1");
  CHECK(key_of("n = 1.5\n") == "n");
  CHECK(key_of("method = thm1, eq19\n") == "method");
  CHECK(key_of("region = core\n") == "region");
  CHECK(key_of("grid.nodes = corners\n") == "grid.nodes");
  CHECK(key_of("n = 0\n") == "n");
  CHECK(key_of("q = 1\n") == "q");
  CHECK(key_of("helical.m = 1\n") == "helical");
  CHECK(key_of("method = thm1\n") == "method");
  CHECK(key_of("field = axisym\nregion = island\n") == "region");
  CHECK(key_of("strict = maybe\n") == "strict");
  CHECK(key_of("threads = -2\n") == "threads");
  CHECK_THROWS_AS(parse_key_values("just words\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("overrides replace single keys") {
  RunConfig c;
  apply_override(c, "psi1=-0.002");
  apply_override(c, " n = 12 ");
  CHECK(c.psi1 == -0.002);
  CHECK(c.n == 12);
  CHECK_THROWS_AS(apply_override(c, "psi1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "colour=blue"), ConfigError);
}

TEST_CASE("numbers are written with 17 significant digits") {
  CHECK(format17(0.1) == "0.10000000000000001");
  CHECK(format17(1.0) == "1");
  CHECK(format17(-2.5e-7) == "-2.4999999999999999e-07");
  CHECK(format17(NAN) == "nan");
  CHECK(format17(-INFINITY) == "-inf");
}

TEST_CASE("csv fields are quoted when needed") {
  CHECK(csv_field("inner") == "inner");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"x\"") == "\"say \"\"x\"\"\"");
}

TEST_CASE("profile csv layout") {
  VolumeProfile p;
  p.method = Method::Thm1;
  p.rows = {{0.0, 39.5, 0.0}, {0.02, 39.5, 0.79}};
  std::ostringstream out;
  write_profile_csv(out, {p});
  CHECK(out.str() ==
        "method,region,Psi,dVdPsi,V_cum\n"
        "thm1,inner,0,39.5,0\n"
        "thm1,inner,0.02,39.5,0.79000000000000004\n");
}

TEST_CASE("metadata carries the configuration and provenance") {
  RunConfig c;
  VolumeProfile p;
  p.rows = {{0.0, 1.0, 0.0}, {-0.006, 1.0, 1.0}};
  p.provenance["q"] = "6";
  const auto j = profile_metadata(c, {p});
  CHECK(j["version"] == kVersion);
  CHECK(j["config"]["psi2"] == "-0.0060000000000000001");
  CHECK(j["profiles"][0]["provenance"]["q"] == "6");
  CHECK(j.dump() == profile_metadata(c, {p}).dump());
}

TEST_CASE("make_field follows the configuration") {
  RunConfig c;
  c.field = "axisym";
  c.axisym.C = 2.0;
  const auto f = make_field(c);
  CHECK(f->kind() == FieldKind::Axisymmetric);
  CHECK(f->b_contra({1.0, 0.0, 0.0})[1] == doctest::Approx(2.0));
}

TEST_CASE("shipped configurations load and survive a round trip") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(FLUXVOL_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    const RunConfig c = load_config(entry.path().string());
    CHECK_NOTHROW(c.validate());
    CHECK(serialize(parse_config(serialize(c))) == serialize(c));
    ++count;
  }
  CHECK(count >= 7);
}
