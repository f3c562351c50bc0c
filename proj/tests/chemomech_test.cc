#include <gtest/gtest.h>

#include "porosity/chemomech.h"
#include "porosity/errors.h"

namespace porosity {
namespace {

const CompositionSet kRef = default_composition();

TEST(Composition, DefaultResourceValues) {
  EXPECT_EQ(kRef.cement.cao, 0.646);
  EXPECT_EQ(kRef.cement.sio2, 0.223);
  EXPECT_EQ(kRef.cement.al2o3, 0.036);
  EXPECT_EQ(kRef.cement.fe2o3, 0.036);
  EXPECT_EQ(kRef.cement.so3, 0.019);
  EXPECT_EQ(kRef.fly_ash.sio2, 0.605);
  EXPECT_EQ(kRef.fly_ash.al2o3, 0.230);
  EXPECT_EQ(kRef.gamma.gamma_s, 0.82);
  EXPECT_EQ(kRef.gamma.gamma_a, 0.82);
}

TEST(Composition, ParseErrors) {
  EXPECT_THROW(parse_composition("[]"), DataError);
  EXPECT_THROW(parse_composition("{\"cement\": {}}"), DataError);
  EXPECT_THROW(parse_composition("{oops"), DataError);
  const std::string ox = R"({"CaO": 0.6, "SiO2": 0.2, "Al2O3": 0.05, "Fe2O3": 0.03, "SO3": 0.02})";
  EXPECT_NO_THROW(parse_composition("{\"cement\": " + ox + ", \"fly_ash\": " + ox + "}"));
  EXPECT_THROW(parse_composition("{\"cement\": " + ox + ", \"fly_ash\": " + ox + ", \"gamma_S\": 1.5}"),
               DataError);
  const std::string too_much = R"({"CaO": 0.9, "SiO2": 0.2, "Al2O3": 0.05, "Fe2O3": 0.03, "SO3": 0.02})";
  EXPECT_THROW(parse_composition("{\"cement\": " + too_much + ", \"fly_ash\": " + ox + "}"), DataError);
  EXPECT_THROW(load_composition("/nonexistent.json"), DataError);
}

TEST(GypsumBranch, ReferenceCases) {
  // Threshold 0.785*0.036 - 0.501*0.036 = 0.010224 < 0.019.
  EXPECT_EQ(gypsum_branch(kRef.cement, kRef.fly_ash, kRef.gamma, 350, 0), GypsumBranch::kHigh);
  // Adds 0.785*0.82*0.23*0.25 = 0.03701275, threshold 0.04723675 > 0.019.
  EXPECT_EQ(gypsum_branch(kRef.cement, kRef.fly_ash, kRef.gamma, 280, 70), GypsumBranch::kLow);
  OxideComposition bare{0.6, 0.2, 0.0, 0.0, 0.01};
  EXPECT_EQ(gypsum_branch(bare, kRef.fly_ash, kRef.gamma, 300, 0), GypsumBranch::kHigh);
  EXPECT_THROW(gypsum_branch(kRef.cement, kRef.fly_ash, kRef.gamma, 0, 0), ParamError);
}

TEST(GypsumBranch, ExactTieIsLow) {
  // f_A = 0.5, f_F = 0: threshold 0.3925 held exactly by SO3.
  OxideComposition c{0.0, 0.0, 0.5, 0.0, 0.785 * 0.5};
  EXPECT_EQ(gypsum_branch(c, kRef.fly_ash, kRef.gamma, 100, 0), GypsumBranch::kLow);
}

TEST(PMax, HandEvaluatedFormulas) {
  const double low = (1.321 * 0.646 - 1.851 * 0.223 - 2.907 * 0.036 - 0.928 * 0.036) * 280 /
                     (1.851 * 0.82 * 0.605 + 2.907 * 0.82 * 0.23);
  const double high =
      (1.321 * (0.646 - 0.7 * 0.019) - 1.851 * 0.223 - 2.182 * 0.036 - 1.392 * 0.036) * 280 /
      (1.851 * 0.82 * 0.605 + 2.182 * 0.82 * 0.23);
  EXPECT_NEAR(low, 57.761237273031455, 1e-9);
  EXPECT_NEAR(high, 61.97948979486712, 1e-9);
  EXPECT_NEAR(p_max(kRef.cement, kRef.fly_ash, kRef.gamma, 280, GypsumBranch::kLow), low, 1e-9);
  EXPECT_NEAR(p_max(kRef.cement, kRef.fly_ash, kRef.gamma, 280, GypsumBranch::kHigh), high, 1e-9);
  for (auto b : {GypsumBranch::kLow, GypsumBranch::kHigh}) {
    EXPECT_NEAR(p_max(kRef.cement, kRef.fly_ash, kRef.gamma, 560, b),
                2 * p_max(kRef.cement, kRef.fly_ash, kRef.gamma, 280, b), 1e-9);
  }
  EXPECT_THROW(p_max(kRef.cement, kRef.fly_ash, ActiveFractions{0, 0}, 280, GypsumBranch::kLow),
               ParamError);
}

TEST(Papadakis, OpcCase) {
  const ChemoResult r = papadakis_porosity(ChemoMixInput{350, 0, 192.5}, kRef);
  const double hand =
      0.1925 - (0.249 * (0.646 - 0.7 * 0.019) + 0.191 * 0.223 + 1.118 * 0.036 - 0.357 * 0.036) * 0.35;
  EXPECT_EQ(r.branch, GypsumBranch::kHigh);
  EXPECT_NEAR(hand, 0.112864045, 1e-12);
  EXPECT_NEAR(r.porosity, hand, 1e-12);
  EXPECT_LT(std::abs(100 * r.porosity - 11.8), 1.5);
  EXPECT_EQ(r.p_effective, 0.0);
}

TEST(Papadakis, FlyAshCaseIsCapped) {
  const ChemoResult r = papadakis_porosity(ChemoMixInput{280, 70, 192.5}, kRef);
  EXPECT_EQ(r.branch, GypsumBranch::kLow);
  EXPECT_NEAR(r.p_max, 57.761237273031455, 1e-9);
  EXPECT_EQ(r.p_effective, r.p_max);
  const double hand = 0.1925 -
                      (0.249 * 0.646 - 0.1 * 0.019 + 0.191 * 0.223 + 1.059 * 0.036 - 0.319 * 0.036) * 0.28 -
                      1.121 * 0.82 * 0.23 * 57.761237273031455 / 1000;
  EXPECT_NEAR(hand, 0.11639572455899333, 1e-12);
  EXPECT_NEAR(r.porosity, hand, 1e-9);
}

TEST(Papadakis, Monotonicity) {
  for (double w : {150.0, 175.0, 200.0}) {
    const auto a = papadakis_porosity(ChemoMixInput{300, 50, w}, kRef);
    const auto b = papadakis_porosity(ChemoMixInput{300, 50, w + 1}, kRef);
    EXPECT_GT(b.porosity, a.porosity);
    EXPECT_NEAR(b.porosity - a.porosity, 1.0 / kWaterDensity, 1e-12);
  }
  EXPECT_GT(papadakis_porosity(ChemoMixInput{300, 0, 180, 0.02}, kRef).porosity,
            papadakis_porosity(ChemoMixInput{300, 0, 180, 0.01}, kRef).porosity);
  double previous = 1.0;
  for (double c = 250; c <= 450; c += 25) {
    const double e = papadakis_porosity(ChemoMixInput{c, 0, 180}, kRef).porosity;
    EXPECT_LT(e, previous);
    previous = e;
  }
}

TEST(Papadakis, GammaIrrelevantWithoutAshAndInertAshRejected) {
  const double base = papadakis_porosity(ChemoMixInput{350, 0, 192.5}, kRef).porosity;
  for (double g : {0.0, 0.5, 1.0}) {
    EXPECT_EQ(papadakis_porosity(ChemoMixInput{350, 0, 192.5}, kRef.cement, kRef.fly_ash,
                                 ActiveFractions{g, g})
                  .porosity,
              base);
  }
  EXPECT_THROW(papadakis_porosity(ChemoMixInput{300, 50, 180}, kRef.cement, kRef.fly_ash,
                                  ActiveFractions{0, 0}),
               ParamError);
}

TEST(Papadakis, InputValidationAndInfeasibility) {
  EXPECT_THROW(papadakis_porosity(ChemoMixInput{0, 0, 180}, kRef), ParamError);
  EXPECT_THROW(papadakis_porosity(ChemoMixInput{300, -1, 180}, kRef), ParamError);
  EXPECT_THROW(papadakis_porosity(ChemoMixInput{300, 0, 0}, kRef), ParamError);
  EXPECT_THROW(papadakis_porosity(ChemoMixInput{300, 0, 180, 1.0}, kRef), ParamError);
  EXPECT_THROW(papadakis_porosity(ChemoMixInput{2000, 0, 50}, kRef), NumericalError);
}

TEST(ChemoInput, DerivedFromRecord) {
  MixRecord r;
  r.w_b = 0.5;
  r.binder = 400;
  r.fly_ash = 25;
  const ChemoMixInput in = chemo_input(r);
  EXPECT_EQ(in.cement, 300);
  EXPECT_EQ(in.fly_ash, 100);
  EXPECT_EQ(in.water, 200);
  r.ggbs = 10;
  EXPECT_THROW(chemo_input(r), DataError);
}

}  // namespace
}  // namespace porosity
