#include "lidc/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lidc/corpus.hpp"
#include "lidc/ensemble.hpp"
#include "lidc/error.hpp"
#include "lidc/features.hpp"
#include "lidc/log.hpp"
#include "lidc/metrics.hpp"
#include "lidc/model_store.hpp"
#include "lidc/parallel.hpp"
#include "lidc/tuning.hpp"

namespace lidc::cli {

namespace {

using nlohmann::json;

struct RunConfig {
  std::string config_path;
  std::string train, dev, test, model, input, out;
  std::string report, confusion_csv_path, confusion_svg_path, error_report_path;
  std::string tsv, json_out, candidates;
  std::string features = "char:2,char:3,char:4";
  std::string skip_mode = "upto";
  std::string loss = "squared_hinge";
  std::string baseline;
  std::vector<double> c_grid = default_c_grid();
  double C = 1.0;
  double tol = 1e-4;
  int max_epochs = 1000;
  std::uint64_t seed = 0;
  bool fit_bias = true;
  double bias_scale = 1.0;
  std::uint32_t min_df = 1;
  bool strip_punctuation = false;
  bool lowercase = false;
  unsigned threads = 0;  // 0: LIDC_THREADS or hardware concurrency
  std::size_t powerset_max_size = 0;
  std::size_t short_threshold = 3;
  bool quiet = false;
  bool verbose = false;

  TrainConfig train_config() const {
    TrainConfig cfg;
    cfg.C = C;
    cfg.loss = parse_loss(loss);
    cfg.tol = tol;
    cfg.max_epochs = max_epochs;
    cfg.shuffle_seed = seed;
    cfg.fit_bias = fit_bias;
    cfg.bias_scale = bias_scale;
    cfg.validate();
    return cfg;
  }

  EnsembleOptions ensemble_options() const {
    EnsembleOptions o;
    o.preprocess.strip_punctuation = strip_punctuation;
    o.preprocess.lowercase = lowercase;
    o.min_df = min_df;
    o.threads = resolve_threads(threads > 0 ? std::optional<unsigned>(threads) : std::nullopt);
    return o;
  }

  std::vector<FeatureSpec> feature_specs(const std::string& list) const {
    if (skip_mode != "upto" && skip_mode != "exact") {
      throw ConfigError("--skip-mode must be upto or exact");
    }
    auto specs = FeatureSpec::parse_list(list);
    if (skip_mode == "exact") {
      for (auto& s : specs) {
        if (s.kind() == FeatureKind::kSkip) s = FeatureSpec::skip_bigram(s.order(), SkipMode::kExact);
      }
    }
    return specs;
  }

  json echo() const {
    return json{{"train", train},
                {"dev", dev},
                {"test", test},
                {"model", model},
                {"features", features},
                {"skip_mode", skip_mode},
                {"c", C},
                {"loss", loss},
                {"tol", tol},
                {"max_epochs", max_epochs},
                {"seed", seed},
                {"fit_bias", fit_bias},
                {"bias_scale", bias_scale},
                {"min_df", min_df},
                {"strip_punctuation", strip_punctuation},
                {"lowercase", lowercase},
                {"threads", ensemble_options().threads}};
  }
};

void add_common(CLI::App* app, RunConfig& rc) {
  app->add_option("--config", rc.config_path, "JSON file of default flag values (flags win)");
  app->add_option("--threads", rc.threads,
                  "Worker threads (default: LIDC_THREADS, else available parallelism)")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--quiet", rc.quiet, "Only log warnings and errors");
  app->add_flag("--verbose", rc.verbose, "Log debug messages");
}

void add_training(CLI::App* app, RunConfig& rc, bool with_features = true) {
  app->add_option("--train", rc.train, "Labeled training TSV (text<TAB>label)")->required();
  if (with_features) {
    app->add_option("--features", rc.features,
                    "Comma-separated feature specs: char:N (1..8), word:N (1..3), skip:K (1..3)")
        ->capture_default_str();
  }
  app->add_option("--skip-mode", rc.skip_mode, "Skip-bigram gap convention")
      ->check(CLI::IsMember({"upto", "exact"}))
      ->capture_default_str();
  app->add_option("--c", rc.C, "SVM regularization parameter C")->capture_default_str();
  app->add_option("--loss", rc.loss, "SVM loss")
      ->check(CLI::IsMember({"squared_hinge", "hinge"}))
      ->capture_default_str();
  app->add_option("--tol", rc.tol, "Dual coordinate descent stopping tolerance")
      ->capture_default_str();
  app->add_option("--max-epochs", rc.max_epochs, "Epoch cap per binary problem")
      ->capture_default_str();
  app->add_option("--seed", rc.seed, "Shuffle seed")->capture_default_str();
  app->add_flag("--fit-bias,!--no-fit-bias", rc.fit_bias, "Append a regularized bias feature")
      ->capture_default_str();
  app->add_option("--bias-scale", rc.bias_scale, "Value of the bias feature")
      ->capture_default_str();
  app->add_option("--min-df", rc.min_df, "Drop terms found in fewer documents")
      ->capture_default_str();
  app->add_flag("--strip-punctuation", rc.strip_punctuation,
                "Replace Unicode punctuation with spaces before feature extraction");
  app->add_flag("--lowercase", rc.lowercase, "Apply Unicode simple lowercasing");
  add_common(app, rc);
}

void configure_logging(const RunConfig& rc) {
  if (rc.quiet) log::set_level(log::Level::kWarn);
  else if (rc.verbose) log::set_level(log::Level::kDebug);
  else log::set_level(log::Level::kInfo);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path);
}

Dataset load_labeled(const std::string& path, const char* role) {
  Dataset ds = load_tsv(path, true);
  if (ds.empty()) throw DataError(std::string(role) + " file " + path + " has no instances");
  return ds;
}

int cmd_train(const RunConfig& rc) {
  const auto specs = rc.feature_specs(rc.features);
  const TrainConfig cfg = rc.train_config();
  const auto options = rc.ensemble_options();
  log::info("run config " + rc.echo().dump());

  const Dataset train = load_labeled(rc.train, "training");
  const auto start = std::chrono::steady_clock::now();
  std::vector<MemberSummary> summary;
  const Ensemble ens = train_ensemble(train, specs, cfg, options, &summary);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  save_model(ens, rc.out);

  for (const auto& m : summary) {
    std::ostringstream msg;
    msg << "member " << m.spec << ": vocabulary " << m.vocabulary_size << ", epochs [";
    for (std::size_t i = 0; i < m.epochs.size(); ++i) msg << (i ? "," : "") << m.epochs[i];
    msg << "], " << m.seconds << " s";
    log::info(msg.str());
  }
  std::ostringstream msg;
  msg << "trained " << specs.size() << " member(s) on " << train.size() << " documents, "
      << train.catalog.size() << " labels in " << elapsed.count() << " s; wrote " << rc.out;
  log::info(msg.str());
  return kExitOk;
}

int cmd_predict(const RunConfig& rc) {
  const Ensemble ens = load_model(rc.model);
  const Dataset input = load_tsv(rc.input, false);
  const auto options = rc.ensemble_options();
  const auto preds = predict_all(ens, input.texts(), options.threads);

  std::ostringstream out;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out << input.documents[i].text << '\t' << ens.catalog().name(preds[i]) << '\n';
  }
  if (rc.out.empty() || rc.out == "-") std::cout << out.str() << std::flush;
  else write_text(rc.out, out.str());
  log::info("predicted " + std::to_string(preds.size()) + " line(s)");
  return kExitOk;
}

int cmd_evaluate(const RunConfig& rc) {
  const Dataset test = load_labeled(rc.test, "test");
  const auto options = rc.ensemble_options();

  LabelCatalog catalog;
  std::vector<LabelId> gold;
  std::vector<LabelId> preds;
  if (!rc.baseline.empty()) {
    catalog = test.catalog;
    gold = test.labels();
    preds = random_predictions(gold.size(), catalog.size(), rc.seed);
  } else {
    if (rc.model.empty()) throw ConfigError("--model is required unless --baseline is given");
    const Ensemble ens = load_model(rc.model);
    catalog = ens.catalog();
    gold = remap_labels(test, catalog);
    preds = predict_all(ens, test.texts(), options.threads);
  }

  const ConfusionMatrix cm = confusion(gold, preds, catalog.size());
  const ScoreReport report = score(cm);
  if (!rc.report.empty()) write_text(rc.report, score_json(report, catalog));
  if (!rc.confusion_csv_path.empty()) write_text(rc.confusion_csv_path, confusion_csv(cm, catalog));
  if (!rc.confusion_svg_path.empty()) write_text(rc.confusion_svg_path, confusion_svg(cm, catalog));
  if (!rc.error_report_path.empty()) {
    Dataset relabeled = test;
    relabeled.catalog = catalog;
    for (std::size_t i = 0; i < relabeled.documents.size(); ++i) {
      relabeled.documents[i].label = gold[i];
    }
    write_text(rc.error_report_path,
               error_report_tsv(error_report(relabeled, preds, rc.short_threshold), catalog));
  }
  std::ostringstream msg;
  msg << (rc.baseline.empty() ? "model" : "random baseline") << ": macro-F1 " << report.macro_f1
      << ", weighted-F1 " << report.weighted_f1 << ", accuracy " << report.accuracy << " on "
      << report.total << " instances";
  log::info(msg.str());
  return kExitOk;
}

std::vector<std::vector<FeatureSpec>> read_candidates(const RunConfig& rc) {
  std::ifstream in(rc.candidates);
  if (!in) throw ConfigError("cannot open candidate file " + rc.candidates);
  std::vector<std::vector<FeatureSpec>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      auto specs = rc.feature_specs(line.substr(first));
      check_member_specs(specs);
      out.push_back(std::move(specs));
    } catch (const ConfigError& e) {
      throw ConfigError(rc.candidates + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw ConfigError("candidate file " + rc.candidates + " lists no combinations");
  return out;
}

void emit_grid(const RunConfig& rc, const GridResult& result) {
  if (!rc.tsv.empty()) write_text(rc.tsv, grid_tsv(result));
  if (!rc.json_out.empty()) write_text(rc.json_out, grid_json(result));
  const auto& w = result.winner();
  std::cout << "best\t";
  for (std::size_t i = 0; i < w.specs.size(); ++i) std::cout << (i ? "," : "") << w.specs[i];
  std::cout << "\tC=" << w.C << "\tmacro_f1=" << w.macro_f1 << "\tweighted_f1=" << w.weighted_f1
            << '\n';
}

int cmd_tune_c(const RunConfig& rc) {
  const auto specs = rc.feature_specs(rc.features);
  const TrainConfig cfg = rc.train_config();
  const auto options = rc.ensemble_options();
  log::info("run config " + rc.echo().dump());
  const Dataset train = load_labeled(rc.train, "training");
  const Dataset dev = load_labeled(rc.dev, "development");
  emit_grid(rc, grid_search_c(train, dev, specs, rc.c_grid, cfg, options));
  return kExitOk;
}

int cmd_tune_ablate(const RunConfig& rc, const std::string& features) {
  const auto specs = rc.feature_specs(features);
  const TrainConfig cfg = rc.train_config();
  const auto options = rc.ensemble_options();
  log::info("run config " + rc.echo().dump() + " features=" + features);
  const Dataset train = load_labeled(rc.train, "training");
  const Dataset dev = load_labeled(rc.dev, "development");
  emit_grid(rc, ablate_features(train, dev, specs, cfg, options));
  return kExitOk;
}

int cmd_tune_combos(const RunConfig& rc, const std::string& pool) {
  std::vector<std::vector<FeatureSpec>> candidates;
  if (!rc.candidates.empty()) {
    candidates = read_candidates(rc);
  } else if (rc.powerset_max_size > 0) {
    const auto specs = rc.feature_specs(pool);
    candidates = powerset(specs, rc.powerset_max_size);
  } else {
    throw ConfigError("tune combos needs --candidates FILE or --powerset-max-size N");
  }
  const TrainConfig cfg = rc.train_config();
  const auto options = rc.ensemble_options();
  log::info("run config " + rc.echo().dump() + " pool=" + pool);
  const Dataset train = load_labeled(rc.train, "training");
  const Dataset dev = load_labeled(rc.dev, "development");
  emit_grid(rc, search_combinations(train, dev, candidates, cfg, options));
  return kExitOk;
}

std::string full_grid_string() {
  std::string out;
  for (const auto& s : FeatureSpec::full_grid()) {
    if (!out.empty()) out += ',';
    out += s.to_string();
  }
  return out;
}

std::string config_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out += ',';
      out += config_value(item);
    }
    return out;
  }
  if (v.is_number()) return v.dump();
  throw ConfigError("unsupported config value " + v.dump());
}

int dispatch(const std::vector<std::string>& raw_args) {
  // Config file values become flags that the command line has not set.
  std::vector<std::string> args = raw_args;
  for (std::size_t i = 0; i < raw_args.size(); ++i) {
    std::string path;
    if (raw_args[i] == "--config" && i + 1 < raw_args.size()) path = raw_args[i + 1];
    else if (raw_args[i].rfind("--config=", 0) == 0) path = raw_args[i].substr(9);
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open config file " + path);
      std::stringstream buf;
      buf << in.rdbuf();
      args = merge_config(raw_args, buf.str());
      break;
    }
  }

  CLI::App app{"lidc: similar-language identification with SVM ensembles"};
  app.require_subcommand(1);
  RunConfig rc;
  std::string ablate_features = full_grid_string();
  std::string combo_pool = full_grid_string();

  auto* train = app.add_subcommand("train", "Train an ensemble and write a model file");
  add_training(train, rc);
  train->add_option("--out", rc.out, "Model output path (.gz for gzip)")->required();

  auto* predict = app.add_subcommand("predict", "Label one text per line");
  predict->add_option("--model", rc.model, "Model file")->required();
  predict->add_option("--input", rc.input, "Input texts, one per line")->required();
  predict->add_option("--out", rc.out, "Output TSV text<TAB>label (default: stdout)");
  add_common(predict, rc);

  auto* evaluate = app.add_subcommand("evaluate", "Score a model (or a random baseline)");
  evaluate->add_option("--model", rc.model, "Model file");
  evaluate->add_option("--test", rc.test, "Labeled test TSV")->required();
  evaluate->add_option("--report", rc.report, "Score report JSON");
  evaluate->add_option("--confusion", rc.confusion_csv_path, "Confusion matrix CSV");
  evaluate->add_option("--confusion-svg", rc.confusion_svg_path, "Confusion matrix SVG heatmap");
  evaluate->add_option("--error-report", rc.error_report_path, "Misclassified instances TSV");
  evaluate->add_option("--short-threshold", rc.short_threshold,
                       "Token count at or below which an error is flagged short")
      ->capture_default_str();
  evaluate->add_option("--baseline", rc.baseline, "Score a baseline instead of the model")
      ->check(CLI::IsMember({"random"}));
  evaluate->add_option("--seed", rc.seed, "Baseline seed")->capture_default_str();
  add_common(evaluate, rc);

  auto* tune = app.add_subcommand("tune", "Model selection on a development set");
  tune->require_subcommand(1);

  auto add_tune_common = [&](CLI::App* sub) {
    sub->add_option("--dev", rc.dev, "Labeled development TSV")->required();
    sub->add_option("--tsv", rc.tsv, "Result table as TSV");
    sub->add_option("--json", rc.json_out, "Result table as JSON");
  };
  auto* tune_c = tune->add_subcommand("c", "Grid search over C");
  add_training(tune_c, rc);
  add_tune_common(tune_c);
  tune_c->add_option("--c-grid", rc.c_grid, "Comma-separated C values")
      ->delimiter(',')
      ->capture_default_str();

  auto* tune_ablate = tune->add_subcommand("ablate", "One classifier per feature family");
  add_training(tune_ablate, rc, false);
  add_tune_common(tune_ablate);
  tune_ablate->add_option("--features", ablate_features, "Feature families to evaluate")
      ->capture_default_str();

  auto* tune_combos = tune->add_subcommand("combos", "Compare feature combinations");
  add_training(tune_combos, rc, false);
  add_tune_common(tune_combos);
  tune_combos->add_option("--candidates", rc.candidates,
                          "File with one comma-separated combination per line");
  tune_combos->add_option("--powerset-max-size", rc.powerset_max_size,
                          "Generate every subset of --features up to this size");
  tune_combos->add_option("--features", combo_pool, "Pool for --powerset-max-size")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  configure_logging(rc);
  if (*train) return cmd_train(rc);
  if (*predict) return cmd_predict(rc);
  if (*evaluate) return cmd_evaluate(rc);
  if (*tune_c) return cmd_tune_c(rc);
  if (*tune_ablate) return cmd_tune_ablate(rc, ablate_features);
  if (*tune_combos) return cmd_tune_combos(rc, combo_pool);
  return kExitUsage;
}

}  // namespace

std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::string& config_text) {
  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");

  auto given = [&](const std::string& flag) {
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  std::vector<std::string> out = args;
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    for (auto& c : flag) {
      if (c == '_') c = '-';
    }
    if (flag == "--config" || given(flag) || given("--no-" + flag.substr(2))) continue;
    out.push_back(flag + "=" + config_value(value));
  }
  return out;
}

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace lidc::cli
