#include <doctest.h>

#include <cmath>

#include "carleman/config.hpp"

using namespace carleman;

namespace {

RunConfig parse(const std::string& text, const char* env_seed = nullptr) {
  return parse_config(text, "test.toml", TEST_DATA_DIR, env_seed);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty document gives the reference setup") {
  const RunConfig c = parse("");
  CHECK(c.grid.n1 == 160);
  CHECK(c.grid.n2 == 40);
  CHECK(c.grid.nt == 200);
  CHECK(c.grid.L == 4.0);
  CHECK(c.weights.m == 2.0);
  CHECK(c.weights.lambda == std::vector<double>{1, 2, 4});
  CHECK(c.weights.s == std::vector<double>{8, 16, 32, 64});
  CHECK(c.fixture.q_tilde == "shifted-phase");
  CHECK(c.fixture.audit == "bump");
  CHECK(c.run.seed == 12345);
  CHECK_FALSE(c.run.seed_from_env);
  CHECK(c.run.side == Side::GammaPlus);
  CHECK(c.weights.beta_tilde.profile.value(0.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  // No gap: the base pair equals the tilde pair.
  CHECK(c.coefficients.a.profile.value(0.3, 1.5) == doctest::Approx((1.5 * 1.5 + 5.0) / 2.0));
  CHECK(c.coefficients.b.profile.value(0.3, 1.5) == doctest::Approx(-1.0));
  CHECK(c.coefficients.alpha.profile.value(0.3, 1.5) == 0.0);
}

TEST_CASE("unknown keys are rejected with their position") {
  CHECK_THROWS_WITH_AS(parse("[grid]\nn1 = 8\ndx = 0.1\n"), doctest::Contains("test.toml:3:6: grid.dx: unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[gird]\n"), doctest::Contains("gird: unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[run]\nseed = -1\n"), doctest::Contains("run.seed"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[grid]\nn1 = \"many\"\n"), doctest::Contains("test.toml:2:"), ConfigError);
  CHECK_THROWS_AS(parse("[grid\n"), ConfigError);
}

TEST_CASE("invalid values") {
  CHECK_THROWS_WITH_AS(parse("[weights]\nm = 1.0\n"), doctest::Contains("m must satisfy m > 1"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[fixture]\naudit = \"gaussian\"\n"), doctest::Contains("unknown fixture 'gaussian'"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[grid]\nnt = 21\n"), doctest::Contains("even"), ConfigError);
  CHECK_THROWS_AS(parse("[grid]\nn1 = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[weights]\nlambda = [1.0, -2.0]\n"), ConfigError);
  CHECK_THROWS_AS(parse("[weights]\nbeta_tilde = \"no-such-profile\"\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nside = \"top\"\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nvariant = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nlevels = 1\n"), ConfigError);
  CHECK_THROWS_WITH_AS(parse("[coefficients]\na = \"constant\"\nalpha = \"sin-bump\"\n"),
                       doctest::Contains("either a or alpha"), ConfigError);
}

TEST_CASE("profile forms") {
  const RunConfig c = parse(
      "[grid]\nL = 2.0\n"
      "[coefficients]\n"
      "alpha = { profile = \"sin-bump\", scale = 0.05 }\n"
      "gamma = [\"cos-bump\", { profile = \"constant\", scale = 0.5 }]\n"
      "a_tilde = { file = \"diffusion_table.csv\" }\n");
  const ProfileContext ctx = c.context();
  const Profile sin_bump = make_profile("sin-bump", ctx);
  const Profile cos_bump = make_profile("cos-bump", ctx);
  for (double x2 : {1.0, 1.3, 1.77, 2.0}) {
    const double a_tilde = (x2 * x2 + 5.0) / 2.0;
    CHECK(c.coefficients.a_tilde.profile.value(0.1, x2) == doctest::Approx(a_tilde).epsilon(1e-3));
    CHECK(c.coefficients.a.profile.value(0.1, x2) ==
          doctest::Approx(c.coefficients.a_tilde.profile.value(0.1, x2) - 0.05 * sin_bump.value(0.1, x2)));
    CHECK(c.coefficients.gamma.profile.value(0.1, x2) == doctest::Approx(cos_bump.value(0.1, x2) + 0.5));
    CHECK(c.coefficients.b.profile.value(0.1, x2) == doctest::Approx(-1.0 - cos_bump.value(0.1, x2) - 0.5));
  }
  const auto spec = c.coefficients.gamma.spec;
  REQUIRE(spec.size() == 2);
  CHECK(spec[1]["scale"] == 0.5);
  CHECK_THROWS_AS(parse("[coefficients]\na_tilde = { file = \"missing.csv\" }\n"), ConfigError);
  CHECK_THROWS_AS(parse("[coefficients]\na_tilde = { file = \"x.csv\", profile = \"zero\" }\n"), ConfigError);
}

TEST_CASE("base pair given directly") {
  const RunConfig c = parse("[coefficients]\na = { profile = \"constant\", scale = 4.0 }\n");
  CHECK(c.coefficients.a.profile.value(0.0, 1.5) == 4.0);
  CHECK(c.coefficients.alpha.profile.value(0.0, 1.5) == doctest::Approx((1.5 * 1.5 + 5.0) / 2.0 - 4.0));
}

TEST_CASE("seed from the environment overrides the file") {
  const RunConfig c = parse("[run]\nseed = 5\n", "77");
  CHECK(c.run.seed == 77);
  CHECK(c.run.seed_from_env);
  CHECK_THROWS_AS(parse("", "12a"), ConfigError);
  CHECK_THROWS_AS(parse("", ""), ConfigError);
}

TEST_CASE("digest tracks the resolved configuration") {
  const std::string base = "[grid]\nn1 = 8\n";
  CHECK(parse(base).digest() == parse(base).digest());
  CHECK(parse(base).digest() == parse("# comment\n[grid]\nn1 = 8\nL = 4.0\n").digest());
  CHECK(parse(base).digest() != parse("[grid]\nn1 = 10\n").digest());
  CHECK(parse(base).digest() != parse(base, "1").digest());
  CHECK(parse(base).digest().size() == 16);
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("load from disk") {
  const RunConfig c = load_config(std::string(TEST_DATA_DIR) + "/small.toml");
  CHECK(c.grid.n1 == 8);
  CHECK(c.source.find("small.toml") != std::string::npos);
  CHECK_THROWS_AS(load_config(std::string(TEST_DATA_DIR) + "/absent.toml"), ConfigError);
}

}  // TEST_SUITE
