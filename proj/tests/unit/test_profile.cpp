#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "iotavatar/error.hpp"
#include "iotavatar/profile/profile.hpp"
#include "oracle.hpp"

using namespace iotavatar;
using namespace iotavatar::profile;

namespace {

SensorSnapshot snap(double brightness, double moisture, int people) {
  SensorSnapshot s;
  s.brightness = brightness;
  s.moisture = moisture;
  s.people = people;
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Expected emotion written out directly from the quadrant table.
Emotion expected(double valence, double arousal, double d) {
  const int v = valence > 150 + d ? 1 : valence < 150 - d ? -1 : 0;
  const int a = arousal > 150 + d ? 1 : arousal < 150 - d ? -1 : 0;
  if (v == 0 || a == 0) return Emotion::normal;
  if (v > 0) return a < 0 ? Emotion::relaxation : Emotion::happy;
  return a > 0 ? Emotion::angry : Emotion::sad;
}

}  // namespace

TEST_CASE("emotion codes and labels") {
  CHECK(code(Emotion::sad) == 1);
  CHECK(code(Emotion::angry) == 2);
  CHECK(code(Emotion::normal) == 3);
  CHECK(code(Emotion::relaxation) == 4);
  CHECK(code(Emotion::happy) == 5);
  for (int c = 1; c <= 5; ++c) {
    const auto e = emotion_from_code(c);
    REQUIRE(e);
    CHECK(emotion_from_label(label(*e)) == e);
  }
  CHECK_FALSE(emotion_from_code(0));
  CHECK_FALSE(emotion_from_label("bored"));
}

TEST_CASE("classification grid with deadband 15") {
  int cells = 0;
  for (int v = 0; v <= 300; v += 25)
    for (int a = 0; a <= 300; a += 25) {
      CHECK(classify(AffectScore{double(a), double(v)}) == expected(v, a, 15));
      ++cells;
    }
  CHECK(cells == 169);
}

TEST_CASE("classification band edges") {
  CHECK(classify({100.0, 165.0}) == Emotion::normal);
  CHECK(classify({100.0, 165.001}) == Emotion::relaxation);
  CHECK(classify({135.0, 200.0}) == Emotion::normal);
  CHECK(classify({134.999, 200.0}) == Emotion::relaxation);
  CHECK(classify({std::nullopt, 250.0}) == Emotion::normal);
  CHECK(classify({250.0, std::nullopt}) == Emotion::normal);
  CHECK(classify({250.0, 0.0}, 0.0) == Emotion::angry);
  CHECK(classify({150.0, 150.0}, 0.0) == Emotion::normal);
}

TEST_CASE("classification is symmetric under reflection about 150") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 300);
  auto mirror = [](Emotion e) {
    switch (e) {
      case Emotion::sad: return Emotion::happy;
      case Emotion::happy: return Emotion::sad;
      case Emotion::angry: return Emotion::relaxation;
      case Emotion::relaxation: return Emotion::angry;
      default: return e;
    }
  };
  for (int i = 0; i < 500; ++i) {
    const double a = u(rng), v = u(rng);
    CHECK(classify({300 - a, 300 - v}) == mirror(classify({a, v})));
  }
}

TEST_CASE("normalize") {
  const auto vars = input_variables();
  CHECK(normalize(390, vars[0]) == doctest::Approx(50));
  CHECK(normalize(-3, vars[0]) == 0.0);
  CHECK(normalize(1000, vars[0]) == 100.0);
  CHECK(normalize(2450, vars[1]) == doctest::Approx(50));
  CHECK(normalize(1, vars[2]) == doctest::Approx(25));
}

TEST_CASE("default profile has 54 rules over the documented universes") {
  const PlantProfile p;
  CHECK(p.engine().rules().size() == 54);
  const auto* b = p.engine().find_input("brightness");
  const auto* m = p.engine().find_input("moisture");
  const auto* n = p.engine().find_input("people");
  REQUIRE((b && m && n));
  CHECK(b->umax() == 780);
  CHECK(m->umin() == 1800);
  CHECK(m->umax() == 3100);
  CHECK(n->umax() == 4);
}

TEST_CASE("event prototypes match the brute-force oracle and frozen values") {
  const PlantProfile p;
  struct Case {
    double b, m;
    int n;
    double arousal, valence;
    Emotion emotion;
  };
  // Frozen from the oracle at 300001 points.
  const Case cases[] = {
      {50, 1900, 2, 125.314328, 93.156410, Emotion::sad},
      {700, 2450, 0, 50.000000, 203.566434, Emotion::relaxation},
      {10, 3050, 4, 226.254054, 125.320133, Emotion::angry},
  };
  for (const auto& c : cases) {
    const auto got = p.score_affect(snap(c.b, c.m, c.n));
    REQUIRE(got.arousal);
    REQUIRE(got.valence);
    CHECK(std::abs(*got.arousal - c.arousal) < 1e-3);
    CHECK(std::abs(*got.valence - c.valence) < 1e-3);
    const auto [oa, ov] = oracle::plant_affect(c.b, c.m, c.n, oracle::default_plant(), 30001);
    CHECK(std::abs(*got.arousal - *oa) < 1e-3);
    CHECK(std::abs(*got.valence - *ov) < 1e-3);
    CHECK(p.classify(got) == c.emotion);
  }
}

TEST_CASE("random inputs agree with the oracle and stay in range") {
  const PlantProfile p;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> b(0, 780), m(1800, 3100);
  std::uniform_int_distribution<int> n(0, 4);
  for (int i = 0; i < 60; ++i) {
    const auto s = snap(b(rng), m(rng), n(rng));
    const auto got = p.score_affect(s);
    const auto [oa, ov] = oracle::plant_affect(s.brightness, s.moisture, s.people);
    REQUIRE(got.arousal);
    REQUIRE(got.valence);
    CHECK(*got.arousal >= 0);
    CHECK(*got.arousal <= 300);
    CHECK(std::abs(*got.arousal - *oa) < 1e-3);
    CHECK(std::abs(*got.valence - *ov) < 1e-3);
  }
}

TEST_CASE("at term prototypes the cell consequents decide the score") {
  // At a prototype only one term per input fires, so each output sees at most
  // three consequents at full strength.
  const PlantProfile p;
  const double light[] = {0, 390, 780}, soil[] = {1800, 2450, 3100};
  const int people[] = {0, 2, 4};
  const double centre[] = {50, 150, 250};
  for (int s = 0; s < 3; ++s)
    for (int l = 0; l < 3; ++l)
      for (int n = 0; n < 3; ++n) {
        const auto got = p.score_affect(snap(light[l], soil[s], people[n]));
        const auto& mx = p.matrices();
        const Level ar[] = {mx[0].cells[s][l], mx[1].cells[n][l], mx[2].cells[n][s]};
        bool seen[3] = {};
        for (auto lv : ar) seen[static_cast<int>(lv)] = true;
        if (seen[0] + seen[1] + seen[2] == 1) {
          for (int k = 0; k < 3; ++k)
            if (seen[k]) CHECK(*got.arousal == doctest::Approx(centre[k]).epsilon(1e-9));
        }
      }
}

TEST_CASE("out-of-range readings clamp") {
  const PlantProfile p;
  CHECK(p.score_affect(snap(-50, 1000, -1)) == p.score_affect(snap(0, 1800, 0)));
  CHECK(p.score_affect(snap(2000, 9999, 9)) == p.score_affect(snap(780, 3100, 4)));
}

TEST_CASE("dry-high polarity mirrors the moisture reading") {
  const PlantProfile wet;
  const PlantProfile dry(default_matrices(), kDefaultDeadband, MoisturePolarity::dry_high);
  CHECK(dry.wetness(1900) == doctest::Approx(3000));
  CHECK(dry.score_affect(snap(200, 1900, 1)) == wet.score_affect(snap(200, 3000, 1)));
}

TEST_CASE("shipped profile equals the built-in defaults") {
  const auto p = load_profile_file(std::string(IOTAVATAR_DATA_DIR) + "/default_profile.conf");
  CHECK(p == PlantProfile());
  CHECK(load_profile("") == PlantProfile());
}

TEST_CASE("render round-trips") {
  RuleMatrices m = default_matrices();
  m[3].cells[1][1] = Level::low;
  const PlantProfile p(m, 20, MoisturePolarity::dry_high);
  CHECK(load_profile(render_profile(p)) == p);
}

TEST_CASE("profile overrides on top of the defaults") {
  const auto p = load_profile(
      "[settings]\n"
      "deadband = 10\n"
      "[valence people soil]\n"
      "Good Good = H   # was L\n");
  CHECK(p.deadband() == 10);
  CHECK(p.matrix(Output::valence, Input::people, Input::soil).cells[2][2] == Level::high);
  CHECK(p.matrix(Output::valence, Input::people, Input::soil).cells[0][0] == Level::low);
  CHECK(p.matrix(Output::arousal, Input::soil, Input::light) == default_matrices()[0]);
}

TEST_CASE("profile errors name the line and cell") {
  auto message = [](const std::string& text) -> std::string {
    try {
      load_profile(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  auto msg = message("[arousal soil light]\nL M M\nL X L\nH M H\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("'X'") != std::string::npos);
  CHECK(msg.find("row 2") != std::string::npos);
  CHECK(msg.find("column 2") != std::string::npos);

  CHECK(message("[arousal soil light]\nPoor Good = Q\n").find("line 2") != std::string::npos);
  CHECK(message("[arousal soil light]\nL M M\n").find("1 of 3 rows") != std::string::npos);
  CHECK(message("[arousal light soil]\n").find("pairing") != std::string::npos);
  CHECK(message("[mood soil light]\n").find("unknown output") != std::string::npos);
  CHECK(message("[settings]\nbase = none\n").find("missing") != std::string::npos);
  CHECK(message("[settings]\ndeadband = 200\n").find("deadband") != std::string::npos);
  CHECK(message("[settings]\ncolour = red\n").find("unknown setting") != std::string::npos);
  CHECK(message("[arousal soil light]\nPoor Poor = L\n[arousal soil light]\nPoor Poor = H\n").find("duplicate") !=
        std::string::npos);
  CHECK(message("[arousal soil light]\nPoor Poor = L\nL M M\n").find("mixes") != std::string::npos);
  CHECK_THROWS_AS(load_profile_file("/nonexistent/profile.conf"), ConfigError);
}
