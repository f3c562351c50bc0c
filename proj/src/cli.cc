#include "porosity/cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"
#include "porosity/bayes_opt.h"
#include "porosity/boosting.h"
#include "porosity/chemomech.h"
#include "porosity/errors.h"
#include "porosity/forest.h"
#include "porosity/importance.h"
#include "porosity/metrics.h"
#include "porosity/model_io.h"
#include "porosity/objectives.h"
#include "porosity/partial_dependence.h"
#include "porosity/resources.h"

namespace porosity::cli {
namespace {

using ojson = nlohmann::ordered_json;

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Fixed-width number for human-readable tables.
std::string fixed(double v, int precision = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << v;
  return s.str();
}

struct Options {
  std::string input;
  std::string model;
  std::string output;
  std::string trace;
  std::string composition;
  std::uint64_t seed = kDefaultSeed;
  bool json = false;
  bool no_timing = false;
  int k = kTuningFolds;
  int budget = 30;
  double fraction = 0.75;
  std::string feature;
  std::string feature2;
  int grid = static_cast<int>(kDefaultGridPoints);
  std::string subset = "all";
  std::string type = "fly_ash";
  int repeats = 1;
  int min_days = 0;
  int threads = 1;
  std::optional<int> trees;
  std::optional<int> min_leaf;
  std::optional<int> features_per_split;
  std::optional<int> max_splits;
  std::optional<double> learning_rate;
};

Dataset read_input(const Options& o) {
  return o.input.empty() ? embedded_sample() : load_csv(o.input);
}

Dataset select_subset(const Dataset& data, const std::string& subset) {
  if (subset == "train") return training_records(data);
  if (subset == "test") return testing_records(data);
  return data;
}

// Writes through `out` when no path is given.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw DataError("cannot write " + o.output);
  f << text;
  if (!f) throw DataError("failed writing " + o.output);
}

ojson report_json(const EvalReport& r) {
  ojson j;
  j["m"] = r.m;
  j["rmse"] = r.rmse;
  j["mape"] = r.mape;
  j["r2"] = r.r2 ? ojson(*r.r2) : ojson(nullptr);
  return j;
}

void print_report(std::ostream& out, const std::string& label, const EvalReport& r) {
  out << label << ": m=" << r.m << " RMSE=" << fixed(r.rmse) << " MAPE=" << fixed(r.mape, 2)
      << "% R2=" << (r.r2 ? fixed(*r.r2) : std::string("n/a")) << '\n';
}

EvalReport score(const Model& model, const Table& data) {
  std::vector<double> predicted(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) predicted[i] = predict(model, data.row(i));
  return evaluate_partial(data.responses(), predicted);
}

ojson point_json(const HyperparamPoint& p) {
  ojson j = ojson::object();
  for (std::size_t d = 0; d < p.names.size(); ++d) {
    const double v = p.values[d];
    if (v == std::trunc(v) && std::abs(v) < 1e15) {
      j[p.names[d]] = static_cast<std::int64_t>(v);
    } else {
      j[p.names[d]] = v;
    }
  }
  return j;
}

ojson params_json(const ForestParams& p) {
  return ojson{{"n_trees", p.n_trees}, {"min_leaf", p.min_leaf},
               {"features_per_split", p.features_per_split}};
}

ojson params_json(const BoostParams& p) {
  return ojson{{"n_trees", p.n_trees}, {"learning_rate", p.learning_rate},
               {"max_splits", p.max_splits}, {"min_leaf", p.min_leaf}};
}

std::string params_text(const ojson& params) {
  std::string s;
  for (const auto& [key, value] : params.items()) {
    if (!s.empty()) s += ' ';
    s += key + '=' + (value.is_number_float() ? num(value.get<double>()) : value.dump());
  }
  return s;
}

void save_model_to(const Options& o, const Model& model) {
  if (!o.model.empty()) save_model(model, o.model);
}

void write_trace(const Options& o, const TuneResult& result) {
  if (o.trace.empty()) return;
  std::ofstream f(o.trace, std::ios::binary);
  if (!f) throw DataError("cannot write " + o.trace);
  write_trace_jsonl(result, f, !o.no_timing);
}

// Summary shared by train-* and tune-*.
void report_fit(const Options& o, std::ostream& out, const Model& model, const Table& train,
                const ojson& params, std::optional<double> oob, const TuneResult* search) {
  const EvalReport r = score(model, train);
  if (o.json) {
    ojson j;
    j["model_kind"] = std::string(model_kind(model));
    j["params"] = params;
    j["seed"] = o.seed;
    j["train"] = report_json(r);
    if (oob) j["oob_mse"] = *oob;
    if (search) {
      j["best_point"] = point_json(search->best_point);
      j["best_objective"] = search->best_value;
      j["evaluations"] = search->budget_used;
    }
    if (!o.model.empty()) j["model_path"] = o.model;
    out << j.dump(2) << '\n';
    return;
  }
  out << "model: " << model_kind(model) << " (" << params_text(params) << ")\n";
  if (search) {
    out << "best objective: " << num(search->best_value) << " after " << search->budget_used
        << " evaluations\n";
  }
  print_report(out, "train", r);
  if (oob) out << "OOB MSE: " << fixed(*oob) << '\n';
  if (!o.model.empty()) out << "saved " << o.model << '\n';
}

ForestParams forest_params(const Options& o) {
  ForestParams p;
  if (o.trees) p.n_trees = *o.trees;
  if (o.min_leaf) p.min_leaf = *o.min_leaf;
  if (o.features_per_split) p.features_per_split = *o.features_per_split;
  p.max_splits = o.max_splits;
  p.num_threads = o.threads;
  return p;
}

BoostParams boost_params(const Options& o) {
  BoostParams p;
  if (o.trees) p.n_trees = *o.trees;
  if (o.min_leaf) p.min_leaf = *o.min_leaf;
  if (o.max_splits) p.max_splits = *o.max_splits;
  if (o.learning_rate) p.learning_rate = *o.learning_rate;
  return p;
}

void cmd_split(const Options& o, std::ostream& out) {
  const Dataset data = read_input(o);
  const SplitAssignment split = stratified_split(data, o.fraction, o.seed);
  const Dataset labelled = apply_split(data, split);
  std::ostringstream csv;
  write_csv(labelled, csv);
  emit(o, out, csv.str());
  if (!o.output.empty()) {
    out << "train: " << split.train_indices.size() << " test: " << split.test_indices.size()
        << " -> " << o.output << '\n';
  }
}

void cmd_train_rf(const Options& o, std::ostream& out) {
  const Table train = to_table(training_records(read_input(o)));
  const ForestParams p = forest_params(o);
  ForestModel forest = fit_random_forest(train, p, o.seed);
  std::optional<double> oob;
  try {
    oob = oob_mse(forest, train);
  } catch (const NumericalError&) {
  }
  const Model model = std::move(forest);
  save_model_to(o, model);
  report_fit(o, out, model, train, params_json(p), oob, nullptr);
}

void cmd_train_gbt(const Options& o, std::ostream& out) {
  const Table train = to_table(training_records(read_input(o)));
  const BoostParams p = boost_params(o);
  const Model model = fit_lsboost(train, p, o.seed);
  save_model_to(o, model);
  report_fit(o, out, model, train, params_json(p), std::nullopt, nullptr);
}

void cmd_tune_rf(const Options& o, std::ostream& out) {
  const Table train = to_table(training_records(read_input(o)));
  ForestTuning tuned = tune_random_forest(train, o.budget, o.seed);
  const double oob = oob_mse(tuned.model, train);
  const Model model = std::move(tuned.model);
  save_model_to(o, model);
  write_trace(o, tuned.search);
  report_fit(o, out, model, train, params_json(tuned.params), oob, &tuned.search);
}

void cmd_tune_gbt(const Options& o, std::ostream& out) {
  const Table train = to_table(training_records(read_input(o)));
  BoostingTuning tuned = tune_lsboost(train, o.budget, o.seed, o.k);
  const Model model = std::move(tuned.model);
  save_model_to(o, model);
  write_trace(o, tuned.search);
  report_fit(o, out, model, train, params_json(tuned.params), std::nullopt, &tuned.search);
}

Model require_model(const Options& o) {
  if (o.model.empty()) throw ParamError("--model is required");
  return load_model(o.model);
}

void cmd_evaluate(const Options& o, std::ostream& out) {
  const Model model = require_model(o);
  const Dataset data = select_subset(read_input(o), o.subset);
  if (data.empty()) throw DataError("no records in subset '" + o.subset + "'");
  const Table table = to_table(data);
  std::vector<double> predicted(table.rows());
  for (std::size_t i = 0; i < table.rows(); ++i) predicted[i] = predict(model, table.row(i));
  const EvalReport r = evaluate_partial(table.responses(), predicted);
  if (o.json) {
    ojson j = report_json(r);
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < table.rows(); ++i) {
      rows.push_back({{"mix_id", data.records[i].mix_id},
                      {"actual", table.response(i)},
                      {"predicted", predicted[i]}});
    }
    j["predictions"] = rows;
    out << j.dump(2) << '\n';
    return;
  }
  print_report(out, o.subset, r);
  if (!o.output.empty()) {
    std::ostringstream csv;
    csv << "mix_id,actual,predicted\n";
    for (std::size_t i = 0; i < table.rows(); ++i) {
      csv << data.records[i].mix_id << ',' << num(table.response(i)) << ',' << num(predicted[i])
          << '\n';
    }
    emit(o, out, csv.str());
  }
}

void cmd_importance(const Options& o, std::ostream& out) {
  const Model model = require_model(o);
  const auto* forest = std::get_if<ForestModel>(&model);
  if (!forest) throw ParamError("importance needs a forest model");
  const Table train = to_table(training_records(read_input(o)));
  const ImportanceReport report = permutation_importance(*forest, train, o.repeats, o.seed);
  if (o.json) {
    ojson j;
    j["trees_used"] = report.trees_used;
    ojson rows = ojson::array();
    for (const auto& p : report.predictors) {
      rows.push_back({{"predictor", p.name},
                      {"importance", p.importance},
                      {"mean_increase", p.mean_increase},
                      {"std_increase", p.std_increase}});
    }
    j["predictors"] = rows;
    out << j.dump(2) << '\n';
    return;
  }
  out << std::left << std::setw(18) << "predictor" << std::right << std::setw(12) << "importance"
      << std::setw(14) << "mean_incr" << std::setw(14) << "std_incr" << '\n';
  for (const auto& p : report.predictors) {
    out << std::left << std::setw(18) << p.name << std::right << std::setw(12)
        << fixed(p.importance) << std::setw(14) << fixed(p.mean_increase) << std::setw(14)
        << fixed(p.std_increase) << '\n';
  }
  out << "trees with OOB rows: " << report.trees_used << '\n';
}

std::string grid_label(const Table& t, std::size_t j, double v) {
  const FeatureSpec& spec = t.feature(j);
  return spec.is_categorical() ? spec.categories[static_cast<std::size_t>(v)] : num(v);
}

void cmd_pdp(const Options& o, std::ostream& out) {
  if (o.feature.empty()) throw ParamError("--feature is required");
  if (o.grid < 1) throw ParamError("--grid must be >= 1");
  const Model model = require_model(o);
  const Table data = to_table(select_subset(read_input(o), o.subset));
  const Predictor f = make_predictor(model);
  const auto points = static_cast<std::size_t>(o.grid);
  std::ostringstream text;
  if (o.feature2.empty()) {
    const PDPCurve c = partial_dependence(f, data, o.feature, default_grid(data, o.feature, points));
    const std::size_t j = data.feature_index(o.feature);
    if (o.json) {
      ojson g = ojson::array();
      for (double v : c.grid) g.push_back(data.feature(j).is_categorical() ? ojson(grid_label(data, j, v)) : ojson(v));
      text << ojson{{"feature", c.feature}, {"grid", g}, {"values", c.values}, {"data_size", c.data_size}}.dump(2)
           << '\n';
    } else {
      text << c.feature << ",partial_dependence\n";
      for (std::size_t g = 0; g < c.grid.size(); ++g) {
        text << grid_label(data, j, c.grid[g]) << ',' << num(c.values[g]) << '\n';
      }
    }
  } else {
    const PDPSurface s = partial_dependence_2d(f, data, o.feature, o.feature2,
                                               default_grid(data, o.feature, points),
                                               default_grid(data, o.feature2, points));
    const std::size_t ja = data.feature_index(o.feature);
    const std::size_t jb = data.feature_index(o.feature2);
    if (o.json) {
      text << ojson{{"feature_a", s.feature_a}, {"feature_b", s.feature_b}, {"grid_a", s.grid_a},
                    {"grid_b", s.grid_b}, {"values", s.values}, {"data_size", s.data_size}}
                  .dump(2)
           << '\n';
    } else {
      text << s.feature_a << ',' << s.feature_b << ",partial_dependence\n";
      for (std::size_t a = 0; a < s.grid_a.size(); ++a) {
        for (std::size_t b = 0; b < s.grid_b.size(); ++b) {
          text << grid_label(data, ja, s.grid_a[a]) << ',' << grid_label(data, jb, s.grid_b[b])
               << ',' << num(s.values[a][b]) << '\n';
        }
      }
    }
  }
  emit(o, out, text.str());
}

void cmd_sensitivity(const Options& o, std::ostream& out) {
  const std::vector<MixRecord> mixes = sensitivity_grid(o.type);
  std::optional<Model> model;
  if (!o.model.empty()) model = load_model(o.model);
  const bool fly = o.type == "fly_ash";
  std::ostringstream text;
  if (o.json) {
    ojson rows = ojson::array();
    for (const auto& m : mixes) {
      ojson r{{o.type, fly ? m.fly_ash : m.ggbs}, {"curing_days", m.curing_days}};
      if (model) r["predicted_porosity"] = predict(*model, to_features(m));
      rows.push_back(r);
    }
    text << rows.dump(2) << '\n';
  } else {
    text << o.type << ",curing_days" << (model ? ",predicted_porosity" : "") << '\n';
    for (const auto& m : mixes) {
      text << num(fly ? m.fly_ash : m.ggbs) << ',' << m.curing_days;
      if (model) text << ',' << num(predict(*model, to_features(m)));
      text << '\n';
    }
  }
  emit(o, out, text.str());
}

struct ChemoRow {
  std::string id;
  ChemoMixInput mix;
  std::optional<double> measured;  // porosity, %
};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

// Either the dataset schema (C, P and W are derived from binder, fly ash and
// w/b) or a plain table with cement, fly_ash, water and optional id, eps_air
// and porosity columns, all in kg/m3 except porosity (%).
std::vector<ChemoRow> read_chemo_rows(const Options& o) {
  std::string text;
  if (o.input.empty()) {
    text = std::string(resources::sample_mixes_csv());
  } else {
    std::ifstream f(o.input, std::ios::binary);
    if (!f) throw DataError("cannot open " + o.input);
    std::ostringstream s;
    s << f.rdbuf();
    text = s.str();
  }
  std::istringstream in(text);
  std::string header_line;
  std::getline(in, header_line);
  const auto header = split_fields(header_line);
  const auto has = [&](const char* name) {
    return std::find(header.begin(), header.end(), name) != header.end();
  };
  std::vector<ChemoRow> rows;
  const std::string source = o.input.empty() ? "<embedded>" : o.input;
  if (!has("cement")) {
    std::istringstream again(text);
    for (const auto& r : parse_csv(again, source).records) {
      if (r.curing_days < o.min_days) continue;
      if (r.ggbs > 0.0) continue;
      const std::string id = r.mix_id.empty() || r.mix_id == "-" ? "#" + std::to_string(rows.size() + 1) : r.mix_id;
      rows.push_back({id, chemo_input(r), r.porosity});
    }
    return rows;
  }
  const auto col = [&](const char* name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  for (const char* required : {"cement", "fly_ash", "water"}) {
    if (!col(required)) throw DataError(source + ": missing column '" + required + "'");
  }
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    const auto number = [&](std::size_t c) {
      double v = 0.0;
      const std::string& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw DataError(source + ":" + std::to_string(line_no) + ": '" + f + "' is not a number");
      }
      return v;
    };
    ChemoRow row;
    row.id = col("id") ? fields[*col("id")] : std::to_string(rows.size() + 1);
    row.mix.cement = number(*col("cement"));
    row.mix.fly_ash = number(*col("fly_ash"));
    row.mix.water = number(*col("water"));
    if (col("eps_air")) row.mix.eps_air = number(*col("eps_air"));
    if (col("porosity") && !fields[*col("porosity")].empty()) row.measured = number(*col("porosity"));
    try {
      row.mix.validate();
    } catch (const ParamError& e) {
      throw DataError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(row);
  }
  return rows;
}

void cmd_chemomech(const Options& o, std::ostream& out) {
  const CompositionSet comp =
      o.composition.empty() ? default_composition() : load_composition(o.composition);
  const auto rows = read_chemo_rows(o);
  if (rows.empty()) throw DataError("no OPC or fly ash mixes to evaluate");
  std::vector<double> measured;
  std::vector<double> predicted;
  ojson jrows = ojson::array();
  std::ostringstream csv;
  csv << "id,cement,fly_ash,water,branch,p_max,p_effective,porosity_pct,measured_pct\n";
  for (const auto& row : rows) {
    const ChemoResult r = papadakis_porosity(row.mix, comp);
    const double pct = 100.0 * r.porosity;
    if (row.measured) {
      measured.push_back(*row.measured);
      predicted.push_back(pct);
    }
    csv << row.id << ',' << num(row.mix.cement) << ',' << num(row.mix.fly_ash) << ','
        << num(row.mix.water) << ',' << to_string(r.branch) << ',' << num(r.p_max) << ','
        << num(r.p_effective) << ',' << num(pct) << ','
        << (row.measured ? num(*row.measured) : std::string()) << '\n';
    ojson j{{"id", row.id},
            {"cement", row.mix.cement},
            {"fly_ash", row.mix.fly_ash},
            {"water", row.mix.water},
            {"branch", std::string(to_string(r.branch))},
            {"p_max", r.p_max},
            {"p_effective", r.p_effective},
            {"porosity_pct", pct}};
    j["measured_pct"] = row.measured ? ojson(*row.measured) : ojson(nullptr);
    jrows.push_back(j);
  }
  std::optional<EvalReport> report;
  if (!measured.empty()) report = evaluate_partial(measured, predicted);
  if (o.json) {
    ojson j{{"rows", jrows}};
    j["comparison"] = report ? report_json(*report) : ojson(nullptr);
    emit(o, out, j.dump(2) + "\n");
    return;
  }
  emit(o, out, csv.str());
  if (report && !o.output.empty()) print_report(out, "measured vs model", *report);
}

}  // namespace

std::vector<MixRecord> sensitivity_grid(std::string_view type) {
  std::vector<int> days;
  if (type == "fly_ash") {
    days = {7, 28, 90, 180, 270};
  } else if (type == "ggbs") {
    days = {3, 7, 28, 56};
  } else {
    throw ParamError("--type must be fly_ash or ggbs");
  }
  std::vector<MixRecord> mixes;
  for (double pct : {0.0, 10.0, 20.0, 30.0, 40.0}) {
    for (int d : days) {
      MixRecord m;
      m.mix_id = std::string(type) + "-" + num(pct) + "-" + std::to_string(d);
      m.w_b = 0.4;
      m.binder = 400;
      (type == "fly_ash" ? m.fly_ash : m.ggbs) = pct;
      m.sp = 0;
      m.ca_fa = 2;
      m.curing_condition = CuringCondition::kAir;
      m.curing_days = d;
      mixes.push_back(m);
    }
  }
  return mixes;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Concrete porosity modelling: tree ensembles, tuning and a chemo-mechanical baseline",
               "porosity"};
  app.require_subcommand(1);
  Options o;

  const auto add_input = [&](CLI::App* c) {
    c->add_option("--input", o.input, "Dataset CSV (default: embedded sample)");
  };
  const auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Random seed"); };
  const auto add_json = [&](CLI::App* c) { c->add_flag("--json", o.json, "Print JSON"); };
  const auto add_output = [&](CLI::App* c) {
    c->add_option("--output", o.output, "Output file (default: stdout)");
  };
  const auto add_subset = [&](CLI::App* c) {
    c->add_option("--subset", o.subset, "Records to use")->check(CLI::IsMember({"all", "train", "test"}));
  };

  auto* split = app.add_subcommand("split", "Stratified train/test assignment");
  add_input(split);
  add_seed(split);
  add_output(split);
  split->add_option("--fraction", o.fraction, "Training fraction");

  auto* train_rf = app.add_subcommand("train-rf", "Fit a random forest on the training records");
  auto* train_gbt = app.add_subcommand("train-gbt", "Fit LSBoost on the training records");
  for (auto* c : {train_rf, train_gbt}) {
    add_input(c);
    add_seed(c);
    add_json(c);
    c->add_option("--model", o.model, "Where to save the model JSON");
    c->add_option("--trees", o.trees, "Number of trees");
    c->add_option("--min-leaf", o.min_leaf, "Minimum observations per leaf");
    c->add_option("--max-splits", o.max_splits, "Maximum splits per tree");
  }
  train_rf->add_option("--features-per-split", o.features_per_split, "Predictors drawn per split");
  train_rf->add_option("--threads", o.threads, "Worker threads");
  train_gbt->add_option("--learning-rate", o.learning_rate, "Shrinkage");

  auto* tune_rf = app.add_subcommand("tune-rf", "Bayesian optimization of the OOB error");
  auto* tune_gbt = app.add_subcommand("tune-gbt", "Bayesian optimization of the k-fold CV error");
  for (auto* c : {tune_rf, tune_gbt}) {
    add_input(c);
    add_seed(c);
    add_json(c);
    c->add_option("--model", o.model, "Where to save the tuned model JSON");
    c->add_option("--budget", o.budget, "Objective evaluations");
    c->add_option("--trace", o.trace, "Write the evaluation trace as JSON lines");
    c->add_flag("--no-timing", o.no_timing, "Write elapsed_ms as 0 in the trace");
  }
  tune_gbt->add_option("--k", o.k, "Cross-validation folds");

  auto* eval = app.add_subcommand("evaluate", "Score a model on a dataset");
  add_input(eval);
  add_json(eval);
  add_subset(eval);
  eval->add_option("--model", o.model, "Model JSON")->required();
  eval->add_option("--output", o.output, "Per-record predictions CSV");

  auto* imp = app.add_subcommand("importance", "OOB permutation importance of a forest");
  add_input(imp);
  add_seed(imp);
  add_json(imp);
  imp->add_option("--model", o.model, "Forest model JSON")->required();
  imp->add_option("--repeats", o.repeats, "Shuffles per tree and predictor");

  auto* pdp = app.add_subcommand("pdp", "Partial dependence on one or two predictors");
  add_input(pdp);
  add_json(pdp);
  add_output(pdp);
  add_subset(pdp);
  pdp->add_option("--model", o.model, "Model JSON")->required();
  pdp->add_option("--feature", o.feature, "Predictor")->required();
  pdp->add_option("--feature2", o.feature2, "Second predictor for a surface");
  pdp->add_option("--grid", o.grid, "Grid points per numeric predictor");

  auto* sens = app.add_subcommand("sensitivity", "Predictions over the artificial mix grid");
  add_json(sens);
  add_output(sens);
  sens->add_option("--type", o.type, "fly_ash or ggbs")->check(CLI::IsMember({"fly_ash", "ggbs"}));
  sens->add_option("--model", o.model, "Model JSON (omit to list the grid only)");

  auto* chemo = app.add_subcommand("chemomech", "Chemo-mechanical porosity of OPC/fly-ash mixes");
  add_input(chemo);
  add_json(chemo);
  add_output(chemo);
  chemo->add_option("--composition", o.composition, "Oxide composition JSON");
  chemo->add_option("--min-days", o.min_days, "Skip dataset records cured fewer days");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*split) cmd_split(o, out);
    else if (*train_rf) cmd_train_rf(o, out);
    else if (*train_gbt) cmd_train_gbt(o, out);
    else if (*tune_rf) cmd_tune_rf(o, out);
    else if (*tune_gbt) cmd_tune_gbt(o, out);
    else if (*eval) cmd_evaluate(o, out);
    else if (*imp) cmd_importance(o, out);
    else if (*pdp) cmd_pdp(o, out);
    else if (*sens) cmd_sensitivity(o, out);
    else if (*chemo) cmd_chemomech(o, out);
  } catch (const ParamError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataFailure;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace porosity::cli
