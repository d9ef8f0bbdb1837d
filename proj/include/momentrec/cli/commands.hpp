#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "momentrec/ingestion/ingest.hpp"
#include "momentrec/models/regressor.hpp"

// Subcommand bodies of the momentrec tool. Each writes its human-readable
// output to `out` and throws momentrec::Error on failure.
namespace momentrec::cli {

namespace fs = std::filesystem;

struct IngestOptions {
  std::string mode = "offline";
  fs::path fixtures_dir;
  fs::path cache_dir = "cache";
  std::string since = "1970-01-01T00:00:01";
  std::optional<std::string> until;  // default: now
  std::string user;
  double rate = 5.0;
};
ingestion::IngestReport run_ingest(const IngestOptions& options, std::ostream& out);

struct BuildDatasetOptions {
  fs::path cache_dir = "cache";
  fs::path out_dir = "dataset";
  std::size_t k = 1000;
  int tz_offset_minutes = 0;
  std::string target = "danceability";
};
void run_build_dataset(const BuildDatasetOptions& options, std::ostream& out);

struct TrainOptions {
  fs::path dataset_dir = "dataset";
  std::string model = "gbt";
  fs::path out_path = "model.json";
  std::uint64_t seed = 42;
  double train_fraction = 0.67;
  double lambda = models::kDefaultRidgeLambda;
  models::GbtOptions gbt;
  bool compare = false;  // fit and report all three kinds
};

struct TrainRow {
  models::ModelKind kind = models::ModelKind::baseline;
  double test_rmse = 0.0;
  double train_rmse = 0.0;
  double seconds = 0.0;
};
std::vector<TrainRow> run_train(const TrainOptions& options, std::ostream& out);

struct RecommendOptions {
  fs::path dataset_dir = "dataset";
  fs::path model_path = "model.json";
  std::optional<fs::path> library;  // default: <dataset>/library.jsonl
  std::optional<int> hour;          // default: local wall-clock hour
  std::size_t k = 20;
  double epsilon = 0.0;
  bool json = false;
};
void run_recommend(const RecommendOptions& options, std::ostream& out);

struct SimulateOptions {
  std::optional<fs::path> spec;  // default: built-in listener
  fs::path out_dir = "fixtures";
};
void run_simulate(const SimulateOptions& options, std::ostream& out);

struct ServeOptions {
  fs::path dataset_dir = "dataset";
  fs::path model_path = "model.json";
  std::optional<fs::path> library;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<fs::path> static_dir;
  fs::path feedback_log = "feedback.jsonl";
};
void run_serve(const ServeOptions& options, std::ostream& out);

}  // namespace momentrec::cli
