#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "momentrec/core/records.hpp"
#include "momentrec/pipeline/pipeline.hpp"

namespace httplib {
class Server;
}

namespace momentrec::service {

// Everything a request reads. Never mutated once loaded.
struct Artifacts {
  dataset::MomentsDataset dataset;
  models::TrainedRegressor model;
  pipeline::TrackLibrary library;
};

enum class FeedbackAction { listened, skipped };

struct FeedbackEvent {
  std::string session_id;
  std::string track_key;
  FeedbackAction action = FeedbackAction::listened;
  Instant at{};
  double epsilon_at_time = 0.0;
};

std::string_view to_string(FeedbackAction action);
std::optional<FeedbackAction> feedback_action_from_string(std::string_view s);
nlohmann::json to_json(const FeedbackEvent& event);

// Append-only JSON-lines log; appends are serialized.
class FeedbackLog {
 public:
  explicit FeedbackLog(std::filesystem::path path);
  void append(const FeedbackEvent& event);
  std::size_t appended() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::size_t appended_ = 0;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON, empty for 204
};

struct ServiceOptions {
  std::filesystem::path feedback_log = "feedback.jsonl";
  std::optional<std::filesystem::path> static_dir;
  std::function<int()> clock_hour;        // defaults to the local wall-clock hour
  std::function<Instant()> clock_instant; // timestamps feedback events
};

// Endpoint logic, independent of the HTTP transport.
class RecommendationService {
 public:
  explicit RecommendationService(ServiceOptions options);

  void load(std::shared_ptr<const Artifacts> artifacts);
  bool loaded() const;

  ApiResponse recommendations(const std::map<std::string, std::string>& query) const;
  ApiResponse profile(const std::string& hour_text) const;
  ApiResponse feedback(const std::string& body);
  ApiResponse health() const;

  // Registers every /api route (and the static mount, when configured).
  void mount(httplib::Server& server);

  FeedbackLog& feedback_log() { return log_; }

 private:
  std::shared_ptr<const Artifacts> snapshot() const;

  ServiceOptions options_;
  FeedbackLog log_;
  mutable std::mutex artifacts_mutex_;
  std::shared_ptr<const Artifacts> artifacts_;
};

// Runs a service on a background thread until stop() or destruction.
class HttpServer {
 public:
  explicit HttpServer(RecommendationService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free port) and starts serving. Returns the port.
  int start(const std::string& host, int port);
  // Binds and serves on the calling thread.
  void run(const std::string& host, int port);
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace momentrec::service
