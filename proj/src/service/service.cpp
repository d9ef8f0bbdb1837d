#include "momentrec/service/service.hpp"

#include <charconv>
#include <ctime>
#include <fstream>

#include "httplib.h"
#include "momentrec/core/error.hpp"
#include "momentrec/core/format.hpp"
#include "momentrec/core/log.hpp"
#include "momentrec/core/moment_key.hpp"

namespace momentrec::service {

using nlohmann::json;

std::string_view to_string(FeedbackAction action) {
  return action == FeedbackAction::listened ? "listened" : "skipped";
}

std::optional<FeedbackAction> feedback_action_from_string(std::string_view s) {
  if (s == "listened") return FeedbackAction::listened;
  if (s == "skipped") return FeedbackAction::skipped;
  return std::nullopt;
}

json to_json(const FeedbackEvent& e) {
  return {{"session_id", e.session_id},
          {"track_key", e.track_key},
          {"action", std::string(to_string(e.action))},
          {"at", format_iso_instant(e.at)},
          {"epsilon_at_time", e.epsilon_at_time}};
}

FeedbackLog::FeedbackLog(std::filesystem::path path) : path_(std::move(path)) {}

void FeedbackLog::append(const FeedbackEvent& event) {
  const std::string line = to_json(event).dump() + "\n";
  std::lock_guard lock(mutex_);
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << line;
  out.flush();
  if (!out) throw Error("cannot append to " + path_.string());
  ++appended_;
}

std::size_t FeedbackLog::appended() const {
  std::lock_guard lock(mutex_);
  return appended_;
}

namespace {

ApiResponse error_response(int status, std::string code, std::string message, std::string parameter = {}) {
  json err{{"code", std::move(code)}, {"message", std::move(message)}};
  if (!parameter.empty()) err["parameter"] = std::move(parameter);
  return {status, json{{"error", err}}.dump()};
}

ApiResponse not_loaded() { return error_response(503, "not_loaded", "model and dataset are not loaded"); }

std::optional<long long> parse_integer(const std::string& text) {
  long long v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

int local_hour() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  return tm.tm_hour;
}

}  // namespace

RecommendationService::RecommendationService(ServiceOptions options)
    : options_(std::move(options)), log_(options_.feedback_log) {
  if (!options_.clock_hour) options_.clock_hour = local_hour;
  if (!options_.clock_instant) {
    options_.clock_instant = [] { return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()); };
  }
}

void RecommendationService::load(std::shared_ptr<const Artifacts> artifacts) {
  std::lock_guard lock(artifacts_mutex_);
  artifacts_ = std::move(artifacts);
}

bool RecommendationService::loaded() const { return snapshot() != nullptr; }

std::shared_ptr<const Artifacts> RecommendationService::snapshot() const {
  std::lock_guard lock(artifacts_mutex_);
  return artifacts_;
}

ApiResponse RecommendationService::recommendations(const std::map<std::string, std::string>& query) const {
  pipeline::PipelineRequest request;
  request.hour = options_.clock_hour();
  if (auto it = query.find("hour"); it != query.end()) {
    const auto v = parse_integer(it->second);
    if (!v || *v < 0 || *v > 23) return error_response(400, "bad_parameter", "hour must be an integer in 0..23", "hour");
    request.hour = static_cast<int>(*v);
  }
  if (auto it = query.find("k"); it != query.end()) {
    const auto v = parse_integer(it->second);
    if (!v || *v < 1 || *v > 100000) return error_response(400, "bad_parameter", "k must be an integer >= 1", "k");
    request.k = static_cast<std::size_t>(*v);
  }
  if (auto it = query.find("epsilon"); it != query.end()) {
    double eps = -1.0;
    try {
      eps = parse_double(it->second);
    } catch (const Error&) {
    }
    if (!(eps >= 0.0 && eps <= 1.0)) {
      return error_response(400, "bad_parameter", "epsilon must be a number in [0, 1]", "epsilon");
    }
    request.epsilon = eps;
  }
  const auto artifacts = snapshot();
  if (!artifacts) return not_loaded();
  try {
    const auto result = pipeline::run_pipeline(artifacts->dataset, artifacts->model, artifacts->library, request);
    return {200, pipeline::to_json(result).dump()};
  } catch (const std::exception& e) {
    return error_response(500, "pipeline_failed", e.what());
  }
}

ApiResponse RecommendationService::profile(const std::string& hour_text) const {
  const auto v = parse_integer(hour_text);
  if (!v || *v < 0 || *v > 23) return error_response(400, "bad_parameter", "hour must be an integer in 0..23", "hour");
  const auto artifacts = snapshot();
  if (!artifacts) return not_loaded();
  const auto profile = pipeline::phase1_tag_profile(artifacts->dataset, static_cast<int>(*v));
  return {200, pipeline::to_json(profile, artifacts->dataset.vocabulary, 50).dump()};
}

ApiResponse RecommendationService::feedback(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error&) {
    return error_response(400, "bad_body", "body must be a JSON object");
  }
  if (!j.is_object()) return error_response(400, "bad_body", "body must be a JSON object");

  FeedbackEvent event;
  const auto text_field = [&](const char* name, std::string& into) {
    const auto it = j.find(name);
    if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) return false;
    into = it->get<std::string>();
    return true;
  };
  if (!text_field("session_id", event.session_id)) {
    return error_response(400, "bad_parameter", "session_id must be a non-empty string", "session_id");
  }
  if (!text_field("track_key", event.track_key)) {
    return error_response(400, "bad_parameter", "track_key must be a non-empty string", "track_key");
  }
  std::string action;
  text_field("action", action);
  const auto parsed = feedback_action_from_string(action);
  if (!parsed) return error_response(400, "bad_parameter", "action must be 'listened' or 'skipped'", "action");
  event.action = *parsed;
  if (auto it = j.find("epsilon"); it != j.end()) {
    if (!it->is_number() || !(it->get<double>() >= 0.0 && it->get<double>() <= 1.0)) {
      return error_response(400, "bad_parameter", "epsilon must be a number in [0, 1]", "epsilon");
    }
    event.epsilon_at_time = it->get<double>();
  }
  event.at = options_.clock_instant();
  try {
    log_.append(event);
  } catch (const std::exception& e) {
    return error_response(500, "log_failed", e.what());
  }
  return {204, {}};
}

ApiResponse RecommendationService::health() const {
  const auto artifacts = snapshot();
  if (!artifacts) return {503, json{{"status", "unavailable"}}.dump()};
  return {200, json{{"status", "ok"},
                    {"dataset_moments", artifacts->dataset.samples.size()},
                    {"model_kind", std::string(models::to_string(artifacts->model.kind))},
                    {"model_rmse", artifacts->model.train_rmse}}
                   .dump()};
}

void RecommendationService::mount(httplib::Server& server) {
  const auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    if (!api.body.empty()) res.set_content(api.body, "application/json");
  };
  server.Get("/api/recommendations", [this, reply](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    reply(res, recommendations(query));
  });
  server.Get(R"(/api/profile/([^/]*))", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, profile(req.matches[1].str()));
  });
  server.Post("/api/feedback", [this, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, feedback(req.body));
  });
  server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
  if (options_.static_dir) {
    if (!server.set_mount_point("/", options_.static_dir->string())) {
      log::warn("static directory not found: " + options_.static_dir->string());
    }
  }
}

HttpServer::HttpServer(RecommendationService& service) : server_(std::make_unique<httplib::Server>()) {
  service.mount(*server_);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!server_->listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace momentrec::service
