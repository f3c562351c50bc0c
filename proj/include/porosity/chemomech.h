#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "porosity/dataset.h"

namespace porosity {

// Oxide weight fractions.
struct OxideComposition {
  double cao = 0.0;
  double sio2 = 0.0;
  double al2o3 = 0.0;
  double fe2o3 = 0.0;
  double so3 = 0.0;

  // Throws ParamError when a fraction is outside [0, 1] or they sum above 1.
  void validate() const;
};

// Reactive (glassy) share of the fly-ash silica and alumina.
struct ActiveFractions {
  double gamma_s = 0.82;
  double gamma_a = 0.82;

  void validate() const;
};

struct CompositionSet {
  OxideComposition cement;
  OxideComposition fly_ash;
  ActiveFractions gamma;
};

struct ChemoMixInput {
  double cement = 0.0;   // C, kg/m3
  double fly_ash = 0.0;  // P, kg/m3
  double water = 0.0;    // W, kg/m3
  double eps_air = 0.0;  // entrained air, volume fraction

  // Throws ParamError unless C > 0, P >= 0, W > 0 and eps_air in [0, 1).
  void validate() const;
};

enum class GypsumBranch : std::uint8_t { kHigh, kLow };

std::string_view to_string(GypsumBranch branch);

struct ChemoResult {
  double porosity = 0.0;  // volume fraction
  GypsumBranch branch = GypsumBranch::kHigh;
  double p_max = 0.0;        // kg/m3; 0 when the mix has no fly ash
  double p_effective = 0.0;  // min(P, p_max), kg/m3
};

inline constexpr double kWaterDensity = 1000.0;  // kg/m3

// High when the cement carries more SO3 than the aluminate phases of the
// cement and the reactive ash alumina can bind; an exact tie counts as low.
// Throws ParamError for C <= 0.
GypsumBranch gypsum_branch(const OxideComposition& cement, const OxideComposition& ash,
                           const ActiveFractions& gamma, double c, double p);

// Largest fly-ash mass the calcium hydroxide released by C can react with.
// Throws ParamError when the ash has no reactive silica or alumina.
double p_max(const OxideComposition& cement, const OxideComposition& ash,
             const ActiveFractions& gamma, double c, GypsumBranch branch);

// Porosity of fully hydrated, non-carbonated OPC / low-calcium fly ash
// concrete. Throws NumericalError when the result is not positive.
ChemoResult papadakis_porosity(const ChemoMixInput& mix, const OxideComposition& cement,
                               const OxideComposition& ash, const ActiveFractions& gamma = {});
ChemoResult papadakis_porosity(const ChemoMixInput& mix, const CompositionSet& composition);

// C, P and W of a dataset record (fly ash as % of binder). Throws DataError
// for mixes containing GGBS.
ChemoMixInput chemo_input(const MixRecord& record);

// {cement: {CaO, SiO2, Al2O3, Fe2O3, SO3}, fly_ash: {...}, gamma_S, gamma_A}.
// The gamma keys are optional. Throws DataError for malformed documents.
CompositionSet parse_composition(std::string_view json);
CompositionSet load_composition(const std::filesystem::path& path);
CompositionSet default_composition();

}  // namespace porosity
