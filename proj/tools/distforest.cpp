/*
 * Copyright 2026 The distforest Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// distforest: train, evaluate and query distributional random forests for
// recurrence-score prediction.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <httplib.h>

#include "distforest/cohort_io.hpp"
#include "distforest/evaluation.hpp"
#include "distforest/forest.hpp"
#include "distforest/model_io.hpp"
#include "distforest/neighbors.hpp"
#include "distforest/report.hpp"
#include "distforest/service.hpp"

namespace {

using namespace distforest;
using nlohmann::json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void report_rejected(const std::vector<RejectedRow>& rejected) {
  for (const auto& r : rejected) {
    std::cerr << fmt::format("warning: line {} rejected ({}): {}\n", r.line,
                             r.column.empty() ? "row" : r.column, r.reason);
  }
}

Dataset read_cohort(const std::string& path) {
  CohortLoad load = load_cohort(path);
  report_rejected(load.rejected);
  return std::move(load.dataset);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string cohort;
  std::string out;
  std::size_t trees = 2000;
  std::size_t mtry = 3;
  std::size_t min_leaf = 5;
  std::size_t max_depth = 0;
  std::string resampling = "subsample";
  double fraction = 0.5;
  std::uint64_t seed = 42;
};

int run_train(const TrainArgs& a) {
  const Dataset data = read_cohort(a.cohort);
  ForestConfig config;
  config.num_trees = a.trees;
  config.seed = a.seed;
  config.tree.mtry = a.mtry;
  config.tree.min_leaf_size = a.min_leaf;
  if (a.max_depth > 0) config.tree.max_depth = a.max_depth;
  config.resampling =
      a.resampling == "bootstrap" ? Resampling::bootstrap() : Resampling::subsample(a.fraction);
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (data.size() < 2 * a.min_leaf) {
    std::cerr << fmt::format(
        "warning: cohort has {} row(s), fewer than 2 x min-leaf; every tree is a single leaf\n",
        data.size());
  }
  const Forest forest = fit_forest(data, config);
  save_model(forest, a.out);
  std::cout << fmt::format("n={} B={} seed={} fingerprint={}\nmodel written to {}\n", data.size(),
                           forest.num_trees(), config.seed, forest.dataset_fingerprint(), a.out);
  return 0;
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string model;
  std::string cohort;
  std::size_t folds = 0;
  std::uint64_t cv_seed = 1;
  bool no_stratify = false;
  bool force = false;
  bool mean_auc = false;
  std::string table;
  std::string summary;
};

void write_table(const CrpsReport& report, const std::string& path) {
  if (path.empty() || path == "-") {
    write_observation_table(report, std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_observation_table(report, out);
}

void write_summary(const json& doc, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

int run_evaluate(const EvaluateArgs& a) {
  const Dataset data = read_cohort(a.cohort);
  const Forest forest = load_model(a.model);
  if (auto mismatch = fingerprint_mismatch(forest, data); !mismatch.empty()) {
    if (!a.force) throw std::runtime_error(mismatch + " (pass --force to evaluate anyway)");
    std::cerr << "warning: " << mismatch << '\n';
  }
  DecisionRule rule;
  if (a.mean_auc) rule.auc_score = AucScore::predicted_mean;
  const double baseline = climatological_crps(data);

  if (a.folds > 0) {
    if (a.folds > data.size()) throw UsageError("k exceeds cohort size");
    if (a.folds < 2) throw UsageError("--folds must be at least 2");
    CvConfig cv{a.folds, a.cv_seed, !a.no_stratify};
    const KFoldResult cvr = kfold_cv(data, forest.config(), cv, {}, rule);
    write_table(cvr.pooled.report, a.table);
    std::cout << fmt::format("\n{}-fold cross validation (pooled held-out predictions)\n", a.folds);
    std::cout << format_metrics_block(cvr.pooled.confusion, cvr.pooled.metrics) << '\n';
    std::cout << fmt::format("CV error (mean of fold CRPS): {:.4f}\n", cvr.mean_fold_crps);
    std::cout << fmt::format("Climatological CRPS: {:.4f}\n\n", baseline);
    std::cout << format_crps_listing(cvr.pooled.report);

    json folds = json::array();
    for (const auto& f : cvr.folds) {
      folds.push_back({{"size", f.report.per_observation.size()},
                       {"mean_crps", f.report.mean_crps()},
                       {"metrics", to_json(f.metrics)}});
    }
    write_summary({{"mode", "kfold"},
                   {"k", a.folds},
                   {"cv_error", cvr.mean_fold_crps},
                   {"climatological_crps", baseline},
                   {"confusion", to_json(cvr.pooled.confusion)},
                   {"metrics", to_json(cvr.pooled.metrics)},
                   {"folds", folds}},
                  a.summary);
    return 0;
  }

  const OobEvaluation oob = oob_evaluate(forest, data, {}, rule);
  for (const auto& id : oob.excluded_ids) {
    std::cerr << "warning: row " << id << " has no out-of-bag trees; excluded\n";
  }
  const auto& res = oob.result;
  write_table(res.report, a.table);
  std::cout << "\nOut-of-bag evaluation\n";
  std::cout << format_metrics_block(res.confusion, res.metrics) << '\n';
  std::cout << fmt::format("OOB mean CRPS: {:.4f}   climatological CRPS: {:.4f}\n\n",
                           res.report.mean_crps(), baseline);
  std::cout << format_crps_listing(res.report) << '\n';
  const DivergenceReport div = divergence_analysis(res.report, oob.weights, data);
  std::cout << format_divergence(div);

  write_summary({{"mode", "oob"},
                 {"oob_crps", res.report.mean_crps()},
                 {"climatological_crps", baseline},
                 {"excluded", oob.excluded_ids},
                 {"confusion", to_json(res.confusion)},
                 {"metrics", to_json(res.metrics)}},
                a.summary);
  return 0;
}

// ---------------------------------------------------- predict/neighbors

struct QueryArgs {
  std::string model;
  std::string cohort;
  std::string patient;  // JSON text, or @file
  std::string csv;
  std::size_t k = kDefaultNeighbors;
  std::size_t bins = kDefaultBins;
};

std::shared_ptr<const ModelContext> open_model(const std::string& model_path,
                                               const std::string& cohort_path) {
  Dataset data = read_cohort(cohort_path);
  LoadedModel loaded = load_model(model_path, data);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  if (loaded.forest.num_rows() != data.size()) {
    throw std::runtime_error("model indexes a different number of rows than the cohort");
  }
  return std::make_shared<const ModelContext>(
      ModelContext{std::move(loaded.forest), std::move(data), std::move(loaded.warnings)});
}

std::vector<json> query_documents(const QueryArgs& a) {
  std::vector<json> docs;
  if (!a.patient.empty()) {
    const std::string text = a.patient.front() == '@' ? slurp(a.patient.substr(1)) : a.patient;
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw UsageError("--patient is not valid JSON");
    if (doc.is_array()) {
      for (auto& d : doc) docs.push_back(std::move(d));
    } else {
      docs.push_back(std::move(doc));
    }
  }
  if (!a.csv.empty()) {
    const PatientTable table = read_patients(a.csv, {}, false);
    report_rejected(table.rejected);
    for (const auto& rec : table.records) {
      json doc = features_to_json(rec.features);
      doc["id"] = rec.id;
      docs.push_back(std::move(doc));
    }
  }
  if (docs.empty()) throw UsageError("one of --patient or --csv is required");
  return docs;
}

int run_query(const QueryArgs& a, bool neighbors_only) {
  const auto model = open_model(a.model, a.cohort);
  int status = 0;
  for (json doc : query_documents(a)) {
    if (!doc.contains("k")) doc["k"] = a.k;
    if (!doc.contains("bins")) doc["bins"] = a.bins;
    const std::string id = doc.value("id", "");
    auto parsed = parse_patient_query(doc);
    if (auto* err = std::get_if<RequestError>(&parsed)) {
      for (const auto& e : err->errors) {
        std::cerr << fmt::format("error: {}{}: {}\n", id.empty() ? "" : id + ": ", e.field,
                                 e.message);
      }
      status = kExitRuntime;
      continue;
    }
    const auto& query = std::get<PatientQuery>(parsed);
    json out = neighbors_only ? neighbors_response(*model, query)
                              : prediction_response(*model, query);
    if (!id.empty()) out["id"] = id;
    std::cout << out.dump() << '\n';
  }
  return status;
}

// ----------------------------------------------------------------- synth

struct SynthArgs {
  std::size_t n = 333;
  std::uint64_t seed = 7;
  std::string out;
  bool report = false;
};

int run_synth(const SynthArgs& a) {
  const auto marginals = CohortMarginals::reference();
  const Dataset data = synth_cohort(marginals, a.n, a.seed);
  if (a.out.empty() || a.out == "-") {
    write_cohort(data, std::cout);
  } else {
    write_cohort(data, a.out);
  }
  if (a.report) std::cerr << cohort_report(data, marginals);
  return 0;
}

// ----------------------------------------------------------------- serve

struct ServeArgs {
  std::string model;
  std::string cohort;
  std::string host = "0.0.0.0";
  int port = kDefaultPort;
};

int run_serve(const ServeArgs& a) {
  std::shared_ptr<const ModelContext> model;
  if (!a.model.empty()) {
    if (a.cohort.empty()) throw UsageError("--cohort (or DISTFOREST_COHORT) is required with a model");
    model = open_model(a.model, a.cohort);
  } else {
    std::cerr << "warning: no model configured; every endpoint answers 503\n";
  }
  const PredictionService service(model);
  auto server = service.make_server();
  std::cerr << fmt::format("listening on {}:{}\n", a.host, a.port);
  if (!server->listen(a.host, a.port)) {
    throw std::runtime_error(fmt::format("cannot listen on {}:{}", a.host, a.port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributional random forest for recurrence-score prediction"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a forest on a cohort CSV");
  train_cmd->add_option("--cohort", train.cohort, "Cohort CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Model file to write")->required();
  train_cmd->add_option("--trees", train.trees, "Number of trees")->capture_default_str();
  train_cmd->add_option("--mtry", train.mtry, "Candidate features per split")->capture_default_str();
  train_cmd->add_option("--min-leaf", train.min_leaf, "Minimum leaf size")->capture_default_str();
  train_cmd->add_option("--max-depth", train.max_depth, "Depth limit, 0 = unbounded")
      ->capture_default_str();
  train_cmd->add_option("--resampling", train.resampling, "subsample or bootstrap")
      ->check(CLI::IsMember({"subsample", "bootstrap"}))
      ->capture_default_str();
  train_cmd->add_option("--fraction", train.fraction, "Subsample fraction in (0, 1]")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Random seed")->capture_default_str();

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Out-of-bag or K-fold evaluation");
  eval_cmd->add_option("--model", eval.model, "Model file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--cohort", eval.cohort, "Cohort CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--folds", eval.folds, "K-fold cross validation instead of out-of-bag");
  eval_cmd->add_option("--cv-seed", eval.cv_seed, "Fold assignment seed")->capture_default_str();
  eval_cmd->add_flag("--no-stratify", eval.no_stratify, "Do not stratify folds by class");
  eval_cmd->add_flag("--force", eval.force, "Evaluate even if the cohort fingerprint differs");
  eval_cmd->add_flag("--auc-from-mean", eval.mean_auc, "Rank by predicted mean for the AUC");
  eval_cmd->add_option("--table", eval.table, "Per-observation table path (default stdout)");
  eval_cmd->add_option("--summary", eval.summary, "Summary JSON path");

  QueryArgs predict, neighbors;
  auto add_query_options = [](CLI::App* cmd, QueryArgs& q) {
    cmd->add_option("--model", q.model, "Model file")
        ->envname("DISTFOREST_MODEL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--cohort", q.cohort, "Training cohort CSV")
        ->envname("DISTFOREST_COHORT")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--patient", q.patient, "Request JSON (object or array), or @file");
    cmd->add_option("--csv", q.csv, "Patients CSV (odx_score optional)")->check(CLI::ExistingFile);
    cmd->add_option("--k", q.k, "Neighbors to list")->capture_default_str();
    cmd->add_option("--bins", q.bins, "Histogram bins")->capture_default_str();
  };
  auto* predict_cmd = app.add_subcommand("predict", "Predictive distribution for new patients");
  add_query_options(predict_cmd, predict);
  auto* neighbors_cmd = app.add_subcommand("neighbors", "Most similar cohort patients");
  add_query_options(neighbors_cmd, neighbors);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic cohort (non-clinical test data)");
  synth_cmd->add_option("--n", synth.n, "Number of patients")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "CSV path (default stdout)");
  synth_cmd->add_flag("--report", synth.report, "Print a characteristics table to stderr");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP service under /api/v1");
  serve_cmd->add_option("--model", serve.model, "Model file")->envname("DISTFOREST_MODEL");
  serve_cmd->add_option("--cohort", serve.cohort, "Training cohort CSV")->envname("DISTFOREST_COHORT");
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port")->envname("DISTFOREST_PORT")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_evaluate(eval);
    if (*predict_cmd) return run_query(predict, false);
    if (*neighbors_cmd) return run_query(neighbors, true);
    if (*synth_cmd) return run_synth(synth);
    if (*serve_cmd) return run_serve(serve);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
