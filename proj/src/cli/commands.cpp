#include "momentrec/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "momentrec/core/error.hpp"
#include "momentrec/core/format.hpp"
#include "momentrec/core/moment_key.hpp"
#include "momentrec/dataset/dataset.hpp"
#include "momentrec/ingestion/clock.hpp"
#include "momentrec/pipeline/pipeline.hpp"
#include "momentrec/service/service.hpp"
#include "momentrec/simulator/simulator.hpp"

namespace momentrec::cli {

namespace {

Feature parse_target(const std::string& name) {
  const auto f = feature_from_name(name);
  if (!f) throw ValidationError("unknown audio feature '" + name + "'");
  return *f;
}

int local_hour() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  return tm.tm_hour;
}

struct LoadedArtifacts {
  dataset::MomentsDataset dataset;
  models::TrainedRegressor model;
  pipeline::TrackLibrary library;
};

LoadedArtifacts load_artifacts(const fs::path& dataset_dir, const fs::path& model_path,
                               const std::optional<fs::path>& library) {
  LoadedArtifacts a{dataset::read_dataset(dataset_dir), models::load_model(model_path), {}};
  a.library = pipeline::load_library(library.value_or(dataset_dir / pipeline::kLibraryFile));
  return a;
}

}  // namespace

ingestion::IngestReport run_ingest(const IngestOptions& o, std::ostream& out) {
  ingestion::ApiConfig config;
  config.cache_dir = o.cache_dir;
  config.fixtures_dir = o.fixtures_dir;
  config.lastfm_user = o.user;
  config.rate_limit_per_sec = o.rate;
  if (o.mode == "offline") {
    config.mode = ingestion::Mode::offline;
  } else if (o.mode == "live") {
    config.mode = ingestion::Mode::live;
    config.load_credentials_from_env();
  } else {
    throw ValidationError("mode must be 'offline' or 'live'");
  }

  const Instant since = parse_iso_instant(o.since);
  const Instant until =
      o.until ? parse_iso_instant(*o.until) : std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  ingestion::HttplibTransport transport;
  ingestion::SystemClock clock;
  auto source = ingestion::make_source(config, transport, clock);
  ingestion::RecordCache cache(o.cache_dir);
  const ingestion::IngestReport report = ingestion::ingest(*source, cache, since, until);
  out << report.to_json().dump(2) << '\n';
  return report;
}

void run_build_dataset(const BuildDatasetOptions& o, std::ostream& out) {
  dataset::BuildOptions build;
  build.k = o.k;
  build.tz_offset_minutes = o.tz_offset_minutes;
  build.target = parse_target(o.target);
  const ingestion::IngestedData data = ingestion::load_ingested(o.cache_dir);
  const dataset::MomentsDataset ds = dataset::build_dataset(data, build);
  fs::create_directories(o.out_dir);
  dataset::write_dataset(ds, o.out_dir);
  const pipeline::TrackLibrary library = pipeline::library_from_ingested(data);
  pipeline::save_library(library, o.out_dir / pipeline::kLibraryFile);
  out << "moments: " << ds.samples.size() << " (" << ds.samples.size() - ds.non_degenerate_count()
      << " degenerate)\n"
      << "vocabulary: " << ds.vocabulary.size() << " tags\n"
      << "library: " << library.size() << " tracks\n"
      << "written to " << o.out_dir.string() << '\n';
}

std::vector<TrainRow> run_train(const TrainOptions& o, std::ostream& out) {
  const models::ModelKind chosen = models::model_kind_from_string(o.model);
  const dataset::MomentsDataset ds = dataset::read_dataset(o.dataset_dir);
  const dataset::DatasetSplit split = dataset::split_dataset(ds, o.train_fraction, o.seed);
  if (split.train.size() < 2 || split.test.empty()) throw ValidationError("too few moments to train and test");
  const dataset::Design train = dataset::make_design(ds, split.train);
  const dataset::Design test = dataset::make_design(ds, split.test);

  std::vector<models::ModelKind> kinds{chosen};
  if (o.compare) kinds = {models::ModelKind::baseline, models::ModelKind::ridge, models::ModelKind::gbt};

  std::vector<TrainRow> rows;
  std::optional<models::TrainedRegressor> to_save;
  for (models::ModelKind kind : kinds) {
    const auto t0 = std::chrono::steady_clock::now();
    models::TrainedRegressor m;
    switch (kind) {
      case models::ModelKind::baseline:
        m = models::train_baseline(train.y, o.seed, ds.target_feature);
        m.input_size = ds.vocabulary.size();
        break;
      case models::ModelKind::ridge:
        m = models::train_ridge(train.x, train.y, o.lambda, ds.target_feature);
        break;
      case models::ModelKind::gbt:
        m = models::train_gbt(train.x, train.y, o.gbt, o.seed, ds.target_feature);
        break;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.seed = o.seed;
    m.vocabulary = ds.vocabulary.names();
    rows.push_back({kind, models::evaluate_rmse(m, test.x, test.y), m.train_rmse, seconds});
    if (kind == chosen) to_save = std::move(m);
  }
  models::save_model(*to_save, o.out_path);

  char line[128];
  out << "train " << split.train.size() << " / test " << split.test.size() << " moments\n";
  std::snprintf(line, sizeof line, "%-9s %10s %11s %9s\n", "model", "test_rmse", "train_rmse", "seconds");
  out << line;
  for (const TrainRow& r : rows) {
    std::snprintf(line, sizeof line, "%-9s %10.4f %11.4f %9.2f\n", std::string(models::to_string(r.kind)).c_str(),
                  r.test_rmse, r.train_rmse, r.seconds);
    out << line;
  }
  out << "saved " << models::to_string(chosen) << " model to " << o.out_path.string() << '\n';
  return rows;
}

void run_recommend(const RecommendOptions& o, std::ostream& out) {
  const LoadedArtifacts a = load_artifacts(o.dataset_dir, o.model_path, o.library);
  pipeline::PipelineRequest request;
  request.hour = o.hour.value_or(local_hour());
  request.k = o.k;
  request.epsilon = o.epsilon;
  const pipeline::PipelineResult result = pipeline::run_pipeline(a.dataset, a.model, a.library, request);
  if (o.json) {
    out << pipeline::to_json(result).dump(2) << '\n';
  } else {
    out << pipeline::render_report(result);
  }
}

void run_simulate(const SimulateOptions& o, std::ostream& out) {
  const simulator::ListenerSpec spec = o.spec ? simulator::load_spec(*o.spec) : simulator::default_spec();
  const simulator::GenerationSummary s = simulator::generate_history(spec, o.out_dir);
  out << "scrobbles: " << s.scrobbles << "\n"
      << "tracks: " << s.tracks << " (" << s.artist_fallback_tracks << " artist-tagged, " << s.featureless_tracks
      << " without features)\n"
      << "written to " << o.out_dir.string() << '\n';
}

void run_serve(const ServeOptions& o, std::ostream& out) {
  LoadedArtifacts a = load_artifacts(o.dataset_dir, o.model_path, o.library);
  service::ServiceOptions options;
  options.feedback_log = o.feedback_log;
  options.static_dir = o.static_dir;
  service::RecommendationService svc(options);
  svc.load(std::make_shared<const service::Artifacts>(
      service::Artifacts{std::move(a.dataset), std::move(a.model), std::move(a.library)}));
  service::HttpServer server(svc);
  out << "listening on http://" << o.host << ":" << o.port << std::endl;
  server.run(o.host, o.port);
}

}  // namespace momentrec::cli
