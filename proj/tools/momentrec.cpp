#include <iostream>

#include "CLI11.hpp"
#include "momentrec/cli/commands.hpp"
#include "momentrec/core/error.hpp"
#include "momentrec/core/log.hpp"

using namespace momentrec;

int main(int argc, char** argv) {
  CLI::App app{"Time-of-day music recommendations from listening history"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  cli::IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Fetch scrobbles, tags and audio features into a cache");
  ingest_cmd->add_option("--mode", ingest.mode, "offline or live")->check(CLI::IsMember({"offline", "live"}));
  ingest_cmd->add_option("--fixtures", ingest.fixtures_dir, "Fixture directory (offline mode)");
  ingest_cmd->add_option("--cache", ingest.cache_dir, "Cache directory")->capture_default_str();
  ingest_cmd->add_option("--since", ingest.since, "Start instant, UTC ISO 8601")->capture_default_str();
  ingest_cmd->add_option("--until", ingest.until, "End instant (exclusive), default now");
  ingest_cmd->add_option("--user", ingest.user, "Last.fm user name (live mode)");
  ingest_cmd->add_option("--rate", ingest.rate, "Requests per second")->capture_default_str();

  cli::BuildDatasetOptions build;
  auto* build_cmd = app.add_subcommand("build-dataset", "Aggregate a cache into the moments dataset");
  build_cmd->add_option("--cache", build.cache_dir, "Cache directory")->capture_default_str();
  build_cmd->add_option("--out", build.out_dir, "Dataset directory")->capture_default_str();
  build_cmd->add_option("--k", build.k, "Vocabulary size")->capture_default_str()->check(CLI::PositiveNumber);
  build_cmd->add_option("--tz-offset", build.tz_offset_minutes, "Local time offset from UTC, minutes")
      ->capture_default_str()
      ->check(CLI::Range(-840, 840));
  build_cmd->add_option("--target", build.target, "Audio feature to predict")->capture_default_str();

  cli::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Fit a model on the dataset and report test RMSE");
  train_cmd->add_option("--dataset", train.dataset_dir, "Dataset directory")->capture_default_str();
  train_cmd->add_option("--model", train.model, "baseline, ridge or gbt")
      ->capture_default_str()
      ->check(CLI::IsMember({"baseline", "ridge", "gbt"}));
  train_cmd->add_option("--out", train.out_path, "Model file to write")->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Split and model seed")->capture_default_str();
  train_cmd->add_option("--train-fraction", train.train_fraction)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--lambda", train.lambda, "Ridge penalty")->capture_default_str();
  train_cmd->add_option("--rounds", train.gbt.rounds, "Boosting rounds")->capture_default_str();
  train_cmd->add_option("--depth", train.gbt.max_depth, "Tree depth")->capture_default_str();
  train_cmd->add_option("--lr", train.gbt.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_flag("--compare", train.compare, "Fit all three models and print a table");

  cli::RecommendOptions rec;
  auto* rec_cmd = app.add_subcommand("recommend", "Run the four-phase pipeline for an hour");
  rec_cmd->add_option("--dataset", rec.dataset_dir, "Dataset directory")->capture_default_str();
  rec_cmd->add_option("--model", rec.model_path, "Model file")->capture_default_str();
  rec_cmd->add_option("--library", rec.library, "Library file or cache directory");
  rec_cmd->add_option("--hour", rec.hour, "Hour of day, default now")->check(CLI::Range(0, 23));
  rec_cmd->add_option("--k", rec.k, "Tracks to return")->capture_default_str()->check(CLI::PositiveNumber);
  rec_cmd->add_option("--epsilon", rec.epsilon, "Exploration weight")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  rec_cmd->add_flag("--json", rec.json, "Emit JSON instead of the report");

  cli::SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic listening history as fixtures");
  sim_cmd->add_option("--spec", sim.spec, "Listener spec JSON, default built-in");
  sim_cmd->add_option("--out", sim.out_dir, "Fixture directory")->capture_default_str();

  cli::ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the recommendation API");
  serve_cmd->add_option("--dataset", serve.dataset_dir, "Dataset directory")->capture_default_str();
  serve_cmd->add_option("--model", serve.model_path, "Model file")->capture_default_str();
  serve_cmd->add_option("--library", serve.library, "Library file or cache directory");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str()->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--static", serve.static_dir, "Directory served at /");
  serve_cmd->add_option("--feedback-log", serve.feedback_log)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (verbose) log::set_level(log::Level::info);

  try {
    if (*ingest_cmd) {
      const auto report = cli::run_ingest(ingest, std::cout);
      return report.balanced() ? 0 : 1;
    }
    if (*build_cmd) cli::run_build_dataset(build, std::cout);
    if (*train_cmd) cli::run_train(train, std::cout);
    if (*rec_cmd) cli::run_recommend(rec, std::cout);
    if (*sim_cmd) cli::run_simulate(sim, std::cout);
    if (*serve_cmd) cli::run_serve(serve, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
