#include "porosity/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "porosity/errors.h"
#include "porosity/random.h"
#include "porosity/resources.h"

namespace porosity {
namespace {

constexpr std::array<std::string_view, 11> kColumns = {
    "mix_id", "w_b",     "binder",           "fly_ash",     "ggbs",    "sp",
    "ca_fa",  "curing_condition", "curing_days", "porosity", "training"};
constexpr std::size_t kRequiredColumns = 10;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string location(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

double parse_number(std::string_view text, std::string_view column,
                    std::string_view source, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw DataError(location(source, line) + "column '" + std::string(column) +
                    "': cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

int parse_integer(std::string_view text, std::string_view column,
                  std::string_view source, std::size_t line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(location(source, line) + "column '" + std::string(column) +
                    "': cannot parse '" + std::string(text) + "' as an integer");
  }
  return value;
}

std::optional<bool> parse_flag(std::string_view text, std::string_view source,
                               std::size_t line) {
  if (text.empty()) return std::nullopt;
  if (text == "True" || text == "true" || text == "TRUE" || text == "1") return true;
  if (text == "False" || text == "false" || text == "FALSE" || text == "0") return false;
  throw DataError(location(source, line) + "column 'training': expected True or False, got '" +
                  std::string(text) + "'");
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Linear-interpolation quantile of ascending `sorted`.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Largest-remainder apportionment of `total` across groups in proportion to
// their sizes; each share is the floor or ceiling of its exact quota.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& sizes,
                                   std::size_t total) {
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<std::size_t> share(sizes.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const double quota =
        static_cast<double>(total) * static_cast<double>(sizes[g]) / static_cast<double>(n);
    share[g] = static_cast<std::size_t>(std::floor(quota));
    assigned += share[g];
    remainders.emplace_back(quota - std::floor(quota), g);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < total && r < remainders.size(); ++r) {
    const std::size_t g = remainders[r].second;
    if (share[g] < sizes[g]) {
      ++share[g];
      ++assigned;
    }
  }
  return share;
}

}  // namespace

std::string_view to_string(CuringCondition c) {
  return c == CuringCondition::kAir ? "air" : "water";
}

CuringCondition parse_curing_condition(std::string_view text) {
  if (text == "air") return CuringCondition::kAir;
  if (text == "water") return CuringCondition::kWater;
  throw DataError("curing_condition must be 'air' or 'water', got '" + std::string(text) + "'");
}

void validate(const MixRecord& r) {
  auto fail = [&](const std::string& what) {
    throw DataError("record '" + r.mix_id + "': " + what);
  };
  if (!(r.w_b > 0)) fail("w_b must be > 0");
  if (!(r.binder > 0)) fail("binder must be > 0");
  if (!(r.fly_ash >= 0 && r.fly_ash <= 100)) fail("fly_ash must be in [0, 100]");
  if (!(r.ggbs >= 0 && r.ggbs <= 100)) fail("ggbs must be in [0, 100]");
  if (!(r.fly_ash + r.ggbs < 100)) fail("fly_ash + ggbs must be < 100");
  if (!(r.sp >= 0)) fail("sp must be >= 0");
  if (!(r.ca_fa > 0)) fail("ca_fa must be > 0");
  if (r.curing_days < 1) fail("curing_days must be >= 1");
  if (!(r.porosity > 0)) fail("porosity must be > 0");
  if (r.curing_condition != CuringCondition::kAir &&
      r.curing_condition != CuringCondition::kWater) {
    fail("curing_condition out of range");
  }
}

std::string_view to_string(ConcreteType t) {
  switch (t) {
    case ConcreteType::kOpc: return "opc";
    case ConcreteType::kFlyAsh: return "fly_ash";
    case ConcreteType::kGgbs: return "ggbs";
  }
  return "unknown";
}

ConcreteType concrete_type(const MixRecord& r) {
  if (r.fly_ash > 0) return ConcreteType::kFlyAsh;
  if (r.ggbs > 0) return ConcreteType::kGgbs;
  return ConcreteType::kOpc;
}

const std::vector<FeatureSpec>& mix_schema() {
  static const std::vector<FeatureSpec> schema = {
      {"w_b", FeatureKind::kNumeric, "-", {}},
      {"binder", FeatureKind::kNumeric, "kg/m3", {}},
      {"fly_ash", FeatureKind::kNumeric, "%", {}},
      {"ggbs", FeatureKind::kNumeric, "%", {}},
      {"sp", FeatureKind::kNumeric, "%", {}},
      {"ca_fa", FeatureKind::kNumeric, "-", {}},
      {"curing_condition", FeatureKind::kCategorical, "", {"air", "water"}},
      {"curing_days", FeatureKind::kNumeric, "days", {}},
  };
  return schema;
}

FeatureVector to_features(const MixRecord& r) {
  return {r.w_b,   r.binder, r.fly_ash, r.ggbs, r.sp, r.ca_fa,
          static_cast<double>(r.curing_condition), static_cast<double>(r.curing_days)};
}

Table to_table(const Dataset& dataset) {
  Table table(mix_schema());
  for (const auto& r : dataset.records) table.add_row(to_features(r), r.porosity);
  return table;
}

Dataset subset(const Dataset& dataset, std::span<const std::size_t> indices) {
  Dataset out;
  out.records.reserve(indices.size());
  for (std::size_t i : indices) out.records.push_back(dataset.records.at(i));
  return out;
}

Dataset training_records(const Dataset& dataset) {
  const bool flagged = std::any_of(dataset.records.begin(), dataset.records.end(),
                                   [](const MixRecord& r) { return r.training.has_value(); });
  if (!flagged) return dataset;
  Dataset out;
  for (const auto& r : dataset.records) {
    if (r.training.value_or(false)) out.records.push_back(r);
  }
  return out;
}

Dataset testing_records(const Dataset& dataset) {
  Dataset out;
  for (const auto& r : dataset.records) {
    if (r.training.has_value() && !*r.training) out.records.push_back(r);
  }
  return out;
}

Dataset parse_csv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_line = line;
      break;
    }
  }
  if (header_line.empty()) throw DataError(std::string(source) + ": missing header row");
  // Strip a UTF-8 byte-order mark.
  if (header_line.rfind("\xEF\xBB\xBF", 0) == 0) header_line.erase(0, 3);
  header = split_fields(header_line);

  std::array<std::optional<std::size_t>, kColumns.size()> position;
  for (std::size_t f = 0; f < header.size(); ++f) {
    auto it = std::find(kColumns.begin(), kColumns.end(), header[f]);
    if (it == kColumns.end()) {
      throw DataError(location(source, line_no) + "unknown column '" + std::string(header[f]) + "'");
    }
    auto& slot = position[static_cast<std::size_t>(it - kColumns.begin())];
    if (slot) {
      throw DataError(location(source, line_no) + "duplicate column '" + std::string(header[f]) + "'");
    }
    slot = f;
  }
  for (std::size_t c = 0; c < kRequiredColumns; ++c) {
    if (!position[c]) {
      throw DataError(std::string(source) + ": missing column '" + std::string(kColumns[c]) + "'");
    }
  }

  Dataset dataset;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(location(source, line_no) + "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    auto cell = [&](std::size_t c) { return fields[*position[c]]; };
    auto number = [&](std::size_t c) {
      return parse_number(cell(c), kColumns[c], source, line_no);
    };
    MixRecord r;
    r.mix_id = std::string(cell(0));
    r.w_b = number(1);
    r.binder = number(2);
    r.fly_ash = number(3);
    r.ggbs = number(4);
    r.sp = number(5);
    r.ca_fa = number(6);
    try {
      r.curing_condition = parse_curing_condition(cell(7));
    } catch (const DataError& e) {
      throw DataError(location(source, line_no) + e.what());
    }
    r.curing_days = parse_integer(cell(8), kColumns[8], source, line_no);
    r.porosity = number(9);
    if (position[10]) r.training = parse_flag(cell(10), source, line_no);
    try {
      validate(r);
    } catch (const DataError& e) {
      throw DataError(location(source, line_no) + e.what());
    }
    dataset.records.push_back(std::move(r));
  }
  return dataset;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  const bool with_flag = std::any_of(dataset.records.begin(), dataset.records.end(),
                                     [](const MixRecord& r) { return r.training.has_value(); });
  const std::size_t ncols = with_flag ? kColumns.size() : kRequiredColumns;
  for (std::size_t c = 0; c < ncols; ++c) out << (c ? "," : "") << kColumns[c];
  out << '\n';
  for (const auto& r : dataset.records) {
    if (r.mix_id.find_first_of(",\"\n\r") != std::string::npos) {
      throw DataError("mix_id '" + r.mix_id + "' contains a character not representable in CSV");
    }
    out << r.mix_id << ',' << format_number(r.w_b) << ',' << format_number(r.binder) << ','
        << format_number(r.fly_ash) << ',' << format_number(r.ggbs) << ','
        << format_number(r.sp) << ',' << format_number(r.ca_fa) << ','
        << to_string(r.curing_condition) << ',' << r.curing_days << ','
        << format_number(r.porosity);
    if (with_flag) {
      out << ',';
      if (r.training) out << (*r.training ? "True" : "False");
    }
    out << '\n';
  }
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_csv(dataset, out);
}

Dataset embedded_sample() {
  std::istringstream in{std::string(resources::sample_mixes_csv())};
  return parse_csv(in, "<embedded sample>");
}

std::vector<ColumnStats> summarize(const Dataset& dataset) {
  if (dataset.empty()) throw DataError("cannot summarize an empty dataset");
  struct Column {
    const char* name;
    double (*get)(const MixRecord&);
  };
  static constexpr Column kContinuous[] = {
      {"w_b", [](const MixRecord& r) { return r.w_b; }},
      {"binder", [](const MixRecord& r) { return r.binder; }},
      {"fly_ash", [](const MixRecord& r) { return r.fly_ash; }},
      {"ggbs", [](const MixRecord& r) { return r.ggbs; }},
      {"sp", [](const MixRecord& r) { return r.sp; }},
      {"ca_fa", [](const MixRecord& r) { return r.ca_fa; }},
      {"curing_days", [](const MixRecord& r) { return static_cast<double>(r.curing_days); }},
      {"porosity", [](const MixRecord& r) { return r.porosity; }},
  };
  std::vector<ColumnStats> out;
  for (const auto& column : kContinuous) {
    std::vector<double> v;
    v.reserve(dataset.size());
    for (const auto& r : dataset.records) v.push_back(column.get(r));
    // Summing in sorted order makes the result independent of record order.
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    ColumnStats s;
    s.name = column.name;
    s.min = v.front();
    s.max = v.back();
    s.mean = std::clamp(mean, s.min, s.max);
    s.std = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

SplitAssignment stratified_split(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ParamError("split fraction must lie in (0, 1)");
  }
  const std::size_t n = dataset.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw ParamError("fraction " + format_number(fraction) + " leaves an empty train or test set for " +
                     std::to_string(n) + " records");
  }

  // Strata: concrete type x quartile bin of curing days within that type.
  // A value equal to a quartile boundary falls into the lower bin.
  constexpr std::size_t kTypes = 3;
  constexpr std::size_t kBins = 4;
  std::array<std::vector<double>, kTypes> days_by_type;
  for (const auto& r : dataset.records) {
    days_by_type[static_cast<std::size_t>(concrete_type(r))].push_back(r.curing_days);
  }
  std::array<std::array<double, 3>, kTypes> cuts{};
  for (std::size_t t = 0; t < kTypes; ++t) {
    auto& d = days_by_type[t];
    if (d.empty()) continue;
    std::sort(d.begin(), d.end());
    cuts[t] = {quantile(d, 0.25), quantile(d, 0.5), quantile(d, 0.75)};
  }
  std::array<std::array<std::vector<std::size_t>, kBins>, kTypes> strata;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = dataset.records[i];
    const auto t = static_cast<std::size_t>(concrete_type(r));
    std::size_t bin = 0;
    for (double c : cuts[t]) bin += r.curing_days > c ? 1 : 0;
    strata[t][bin].push_back(i);
  }

  std::vector<std::size_t> type_sizes(kTypes);
  for (std::size_t t = 0; t < kTypes; ++t) {
    for (const auto& s : strata[t]) type_sizes[t] += s.size();
  }
  const auto type_share = apportion(type_sizes, n_train);

  Rng rng = make_stream(seed, stream_id(StreamDomain::kSplit, 0));
  std::vector<char> in_train(n, 0);
  std::vector<std::size_t> stratum_of(n);
  for (std::size_t t = 0; t < kTypes; ++t) {
    if (type_sizes[t] == 0) continue;
    std::vector<std::size_t> bin_sizes(kBins);
    for (std::size_t b = 0; b < kBins; ++b) bin_sizes[b] = strata[t][b].size();
    const auto bin_share = apportion(bin_sizes, type_share[t]);
    for (std::size_t b = 0; b < kBins; ++b) {
      auto members = strata[t][b];
      std::shuffle(members.begin(), members.end(), rng);
      for (std::size_t m = 0; m < members.size(); ++m) {
        in_train[members[m]] = m < bin_share[b] ? 1 : 0;
        stratum_of[members[m]] = t * kBins + b;
      }
    }
  }

  // Make the training side span the full w/b and binder ranges. A missing
  // extreme is swapped in for a training record of the same stratum (else same
  // type, else any) that is not itself the sole holder of a required extreme.
  struct Extreme {
    double (*get)(const MixRecord&);
    double value;
  };
  auto wb = [](const MixRecord& r) { return r.w_b; };
  auto binder = [](const MixRecord& r) { return r.binder; };
  std::vector<Extreme> extremes;
  for (auto get : {+wb, +binder}) {
    double lo = get(dataset.records[0]);
    double hi = lo;
    for (const auto& r : dataset.records) {
      lo = std::min(lo, get(r));
      hi = std::max(hi, get(r));
    }
    extremes.push_back({get, lo});
    extremes.push_back({get, hi});
  }
  auto holders_in_train = [&](const Extreme& e) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_train[i] && e.get(dataset.records[i]) == e.value) ++count;
    }
    return count;
  };
  auto is_protected = [&](std::size_t i) {
    for (const auto& e : extremes) {
      if (e.get(dataset.records[i]) == e.value && holders_in_train(e) <= 1) return true;
    }
    return false;
  };
  for (const auto& e : extremes) {
    if (holders_in_train(e) > 0) continue;
    std::size_t incoming = n;
    for (std::size_t i = 0; i < n && incoming == n; ++i) {
      if (!in_train[i] && e.get(dataset.records[i]) == e.value) incoming = i;
    }
    const std::size_t type_of_incoming = stratum_of[incoming] / kBins;
    std::size_t outgoing = n;
    for (int pass = 0; pass < 3 && outgoing == n; ++pass) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!in_train[i] || is_protected(i)) continue;
        const bool eligible = pass == 0   ? stratum_of[i] == stratum_of[incoming]
                              : pass == 1 ? stratum_of[i] / kBins == type_of_incoming
                                          : true;
        if (eligible) {
          outgoing = i;
          break;
        }
      }
    }
    if (outgoing == n) continue;  // every training record already holds an extreme
    in_train[incoming] = 1;
    in_train[outgoing] = 0;
  }

  SplitAssignment split;
  split.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    (in_train[i] ? split.train_indices : split.test_indices).push_back(i);
  }
  return split;
}

Dataset apply_split(Dataset dataset, const SplitAssignment& split) {
  for (auto& r : dataset.records) r.training = false;
  for (std::size_t i : split.train_indices) dataset.records.at(i).training = true;
  return dataset;
}

}  // namespace porosity
