#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "porosity/table.h"

namespace porosity {

enum class CuringCondition { kAir = 0, kWater = 1 };

std::string_view to_string(CuringCondition c);
// Throws DataError for anything other than "air" / "water".
CuringCondition parse_curing_condition(std::string_view text);

// One concrete specimen. SCM contents and SP dosage are percentages of the
// binder mass; porosity is in percent.
struct MixRecord {
  std::string mix_id;
  double w_b = 0.0;
  double binder = 0.0;   // kg/m3
  double fly_ash = 0.0;  // % of binder
  double ggbs = 0.0;     // % of binder
  double sp = 0.0;       // % of binder by weight
  double ca_fa = 0.0;
  CuringCondition curing_condition = CuringCondition::kAir;
  int curing_days = 1;
  double porosity = 0.0;  // %
  std::optional<bool> training;

  bool operator==(const MixRecord&) const = default;
};

// Throws DataError naming the first violated invariant.
void validate(const MixRecord& record);

enum class ConcreteType { kOpc = 0, kFlyAsh = 1, kGgbs = 2 };

std::string_view to_string(ConcreteType t);
// Fly ash wins over GGBS when both are present.
ConcreteType concrete_type(const MixRecord& record);

// Predictor columns, in the order used by every model.
namespace feature {
inline constexpr std::size_t kWb = 0;
inline constexpr std::size_t kBinder = 1;
inline constexpr std::size_t kFlyAsh = 2;
inline constexpr std::size_t kGgbs = 3;
inline constexpr std::size_t kSp = 4;
inline constexpr std::size_t kCaFa = 5;
inline constexpr std::size_t kCuringCondition = 6;
inline constexpr std::size_t kCuringDays = 7;
inline constexpr std::size_t kCount = 8;
}  // namespace feature

using FeatureVector = std::array<double, feature::kCount>;

const std::vector<FeatureSpec>& mix_schema();
FeatureVector to_features(const MixRecord& record);

struct Dataset {
  std::vector<MixRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  const std::vector<FeatureSpec>& schema() const { return mix_schema(); }

  bool operator==(const Dataset&) const = default;
};

Table to_table(const Dataset& dataset);
Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices);
// Records flagged training=true; the whole dataset when no record carries a flag.
Dataset training_records(const Dataset& dataset);
Dataset testing_records(const Dataset& dataset);

// CSV header: mix_id,w_b,binder,fly_ash,ggbs,sp,ca_fa,curing_condition,
// curing_days,porosity[,training]. Errors carry `source` and the line number.
Dataset parse_csv(std::istream& in, std::string_view source = "<stream>");
Dataset load_csv(const std::filesystem::path& path);
void write_csv(const Dataset& dataset, std::ostream& out);
void save_csv(const Dataset& dataset, const std::filesystem::path& path);

// The 34 published sample rows, including their train/test flags.
Dataset embedded_sample();

struct ColumnStats {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for one record
};

// Continuous predictors followed by porosity. Throws DataError when empty.
std::vector<ColumnStats> summarize(const Dataset& dataset);

struct SplitAssignment {
  std::vector<std::size_t> train_indices;  // ascending
  std::vector<std::size_t> test_indices;   // ascending
  std::uint64_t seed = 0;
};

// Stratified by concrete type x curing-day quartile bin, with the training
// side guaranteed to contain the global extremes of w/b and binder content
// whenever the stratum counts allow it.
SplitAssignment stratified_split(const Dataset& dataset, double fraction,
                                 std::uint64_t seed);

// Copy of `dataset` with the training column set from `split`.
Dataset apply_split(Dataset dataset, const SplitAssignment& split);

}  // namespace porosity
