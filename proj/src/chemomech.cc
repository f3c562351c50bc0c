#include "porosity/chemomech.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "porosity/errors.h"
#include "porosity/resources.h"

namespace porosity {
namespace {

void require_fraction(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ParamError(std::string(what) + " must lie in [0, 1]");
}

OxideComposition oxides_from(const nlohmann::json& j, const char* material) {
  if (!j.contains(material) || !j[material].is_object()) {
    throw DataError(std::string("composition is missing the '") + material + "' object");
  }
  const auto& m = j[material];
  auto get = [&](const char* key) {
    if (!m.contains(key) || !m[key].is_number()) {
      throw DataError(std::string("composition ") + material + " is missing numeric " + key);
    }
    return m[key].get<double>();
  };
  OxideComposition ox{get("CaO"), get("SiO2"), get("Al2O3"), get("Fe2O3"), get("SO3")};
  try {
    ox.validate();
  } catch (const ParamError& e) {
    throw DataError(std::string("composition ") + material + ": " + e.what());
  }
  return ox;
}

}  // namespace

void OxideComposition::validate() const {
  require_fraction(cao, "CaO fraction");
  require_fraction(sio2, "SiO2 fraction");
  require_fraction(al2o3, "Al2O3 fraction");
  require_fraction(fe2o3, "Fe2O3 fraction");
  require_fraction(so3, "SO3 fraction");
  if (cao + sio2 + al2o3 + fe2o3 + so3 > 1.0 + 1e-12) {
    throw ParamError("oxide fractions sum above 1");
  }
}

void ActiveFractions::validate() const {
  require_fraction(gamma_s, "gamma_S");
  require_fraction(gamma_a, "gamma_A");
}

void ChemoMixInput::validate() const {
  if (!(cement > 0.0) || !std::isfinite(cement)) throw ParamError("cement content must be > 0");
  if (!(fly_ash >= 0.0) || !std::isfinite(fly_ash)) throw ParamError("fly ash content must be >= 0");
  if (!(water > 0.0) || !std::isfinite(water)) throw ParamError("water content must be > 0");
  if (!(eps_air >= 0.0 && eps_air < 1.0)) throw ParamError("eps_air must lie in [0, 1)");
}

std::string_view to_string(GypsumBranch branch) {
  return branch == GypsumBranch::kHigh ? "high_gypsum" : "low_gypsum";
}

GypsumBranch gypsum_branch(const OxideComposition& cement, const OxideComposition& ash,
                           const ActiveFractions& gamma, double c, double p) {
  if (!(c > 0.0)) throw ParamError("cement content must be > 0");
  const double threshold =
      0.785 * cement.al2o3 - 0.501 * cement.fe2o3 + (0.785 * gamma.gamma_a * ash.al2o3) * (p / c);
  return cement.so3 > threshold ? GypsumBranch::kHigh : GypsumBranch::kLow;
}

double p_max(const OxideComposition& cement, const OxideComposition& ash,
             const ActiveFractions& gamma, double c, GypsumBranch branch) {
  if (gamma.gamma_s * ash.sio2 == 0.0 && gamma.gamma_a * ash.al2o3 == 0.0) {
    throw ParamError("fly ash has no reactive silica or alumina");
  }
  if (branch == GypsumBranch::kHigh) {
    const double ca_available = 1.321 * (cement.cao - 0.7 * cement.so3) - 1.851 * cement.sio2 -
                                2.182 * cement.al2o3 - 1.392 * cement.fe2o3;
    return ca_available * c /
           (1.851 * gamma.gamma_s * ash.sio2 + 2.182 * gamma.gamma_a * ash.al2o3);
  }
  const double ca_available =
      1.321 * cement.cao - 1.851 * cement.sio2 - 2.907 * cement.al2o3 - 0.928 * cement.fe2o3;
  return ca_available * c / (1.851 * gamma.gamma_s * ash.sio2 + 2.907 * gamma.gamma_a * ash.al2o3);
}

ChemoResult papadakis_porosity(const ChemoMixInput& mix, const OxideComposition& cement,
                               const OxideComposition& ash, const ActiveFractions& gamma) {
  mix.validate();
  cement.validate();
  ash.validate();
  gamma.validate();

  ChemoResult result;
  result.branch = gypsum_branch(cement, ash, gamma, mix.cement, mix.fly_ash);
  if (mix.fly_ash > 0.0) {
    result.p_max = std::max(0.0, p_max(cement, ash, gamma, mix.cement, result.branch));
    result.p_effective = std::min(mix.fly_ash, result.p_max);
  }

  const double c = mix.cement / 1000.0;
  const double p = result.p_effective / 1000.0;
  double hydration = 0.0;
  double pozzolanic = 0.0;
  if (result.branch == GypsumBranch::kHigh) {
    hydration = 0.249 * (cement.cao - 0.7 * cement.so3) + 0.191 * cement.sio2 +
                1.118 * cement.al2o3 - 0.357 * cement.fe2o3;
    pozzolanic = 1.18 * gamma.gamma_a * ash.al2o3;
  } else {
    hydration = 0.249 * cement.cao - 0.1 * cement.so3 + 0.191 * cement.sio2 +
                1.059 * cement.al2o3 - 0.319 * cement.fe2o3;
    pozzolanic = 1.121 * gamma.gamma_a * ash.al2o3;
  }
  result.porosity = mix.eps_air + mix.water / kWaterDensity - hydration * c - pozzolanic * p;
  if (!(result.porosity > 0.0)) {
    throw NumericalError("mix lies outside the model's validity: porosity " +
                         std::to_string(result.porosity) + " <= 0");
  }
  return result;
}

ChemoResult papadakis_porosity(const ChemoMixInput& mix, const CompositionSet& composition) {
  return papadakis_porosity(mix, composition.cement, composition.fly_ash, composition.gamma);
}

ChemoMixInput chemo_input(const MixRecord& record) {
  if (record.ggbs > 0.0) {
    throw DataError("mix " + record.mix_id + " contains GGBS, which the model does not cover");
  }
  ChemoMixInput in;
  in.fly_ash = record.binder * record.fly_ash / 100.0;
  in.cement = record.binder - in.fly_ash;
  in.water = record.w_b * record.binder;
  return in;
}

CompositionSet parse_composition(std::string_view json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("composition is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("composition must be a JSON object");
  CompositionSet set;
  set.cement = oxides_from(j, "cement");
  set.fly_ash = oxides_from(j, "fly_ash");
  for (auto [key, field] : {std::pair{"gamma_S", &set.gamma.gamma_s},
                            std::pair{"gamma_A", &set.gamma.gamma_a}}) {
    if (!j.contains(key)) continue;
    if (!j[key].is_number()) throw DataError(std::string(key) + " must be a number");
    *field = j[key].get<double>();
  }
  try {
    set.gamma.validate();
  } catch (const ParamError& e) {
    throw DataError(std::string("composition: ") + e.what());
  }
  return set;
}

CompositionSet load_composition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open composition file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_composition(text.str());
}

CompositionSet default_composition() {
  return parse_composition(resources::default_composition_json());
}

}  // namespace porosity
