// Copyright 2026 The rceval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rceval/service.h"

#include <utility>

#include "httplib.h"
#include "rceval/checkpoint.h"
#include "rceval/corpus.h"
#include "rceval/errors.h"

namespace rceval::service {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

InferenceQueue::Ticket& InferenceQueue::Ticket::operator=(
    Ticket&& other) noexcept {
  if (this != &other) {
    if (queue_ != nullptr) queue_->pending_.fetch_sub(1);
    queue_ = other.queue_;
    other.queue_ = nullptr;
  }
  return *this;
}

InferenceQueue::Ticket::~Ticket() {
  if (queue_ != nullptr) queue_->pending_.fetch_sub(1);
}

InferenceQueue::Ticket InferenceQueue::TryEnter() {
  size_t current = pending_.load();
  while (current < capacity_) {
    if (pending_.compare_exchange_weak(current, current + 1)) {
      return Ticket(this);
    }
  }
  return Ticket();
}

void MetricRegistry::AddLexicalMetrics() {
  for (auto m : {lexical::Metric::kBleu1, lexical::Metric::kRougeL,
                 lexical::Metric::kMeteor}) {
    RegisteredMetric r;
    r.name = std::string(lexical::MetricName(m));
    r.min_score = 0.0;
    r.max_score = 1.0;
    r.fingerprint = "builtin:" + r.name + ":v1";
    r.lexical = m;
    metrics_[r.name] = std::move(r);
  }
}

void MetricRegistry::AddLearned(
    std::string name, std::shared_ptr<const learned::RegressionModel> model,
    std::string fingerprint, size_t queue_capacity) {
  if (metrics_.count(name) != 0) {
    throw UsageError("duplicate metric name '" + name + "'");
  }
  RegisteredMetric r;
  r.name = name;
  r.min_score = 1.0;
  r.max_score = 5.0;
  r.fingerprint = std::move(fingerprint);
  r.model = std::move(model);
  r.queue = std::make_shared<InferenceQueue>(queue_capacity);
  metrics_[std::move(name)] = std::move(r);
}

const RegisteredMetric* MetricRegistry::Find(std::string_view name) const {
  auto it = metrics_.find(name);
  return it == metrics_.end() ? nullptr : &it->second;
}

std::vector<std::string> MetricRegistry::Names() const {
  std::vector<std::string> names;
  for (const auto& [name, m] : metrics_) names.push_back(name);
  return names;
}

MetricRegistry LoadModelsManifest(const std::filesystem::path& path) {
  json manifest;
  try {
    manifest = json::parse(ReadFileToString(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
  if (!manifest.is_object()) {
    throw ParseError(path.string(), "models manifest must be an object");
  }
  MetricRegistry registry;
  if (manifest.value("lexical", true)) registry.AddLexicalMetrics();
  const size_t capacity = manifest.value("queue_capacity", size_t{32});
  if (manifest.contains("models")) {
    const auto& models = manifest["models"];
    if (!models.is_array()) {
      throw ParseError(path.string(), "'models' must be an array");
    }
    for (const auto& entry : models) {
      if (!entry.is_object() || !entry.contains("name") ||
          !entry["name"].is_string() || !entry.contains("checkpoint") ||
          !entry["checkpoint"].is_string()) {
        throw ParseError(path.string(),
                         "each model needs string 'name' and 'checkpoint'");
      }
      std::filesystem::path dir = entry["checkpoint"].get<std::string>();
      if (dir.is_relative()) dir = path.parent_path() / dir;
      auto model = std::make_shared<const learned::RegressionModel>(
          learned::LoadRegressionCheckpoint(dir));
      registry.AddLearned(entry["name"].get<std::string>(), std::move(model),
                          learned::ModelFingerprint(dir), capacity);
    }
  }
  return registry;
}

std::string ErrorBody(std::string_view code, std::string_view message,
                      ordered_json details) {
  ordered_json body;
  body["code"] = code;
  body["message"] = message;
  body["details"] = std::move(details);
  return body.dump();
}

ScoringService::ScoringService(MetricRegistry registry,
                               std::ostream* request_log)
    : registry_(std::move(registry)), log_(request_log) {}

namespace {

struct FieldError {
  std::string message;
};

std::string StringField(const json& request, const char* key, bool required) {
  auto it = request.find(key);
  if (it == request.end()) {
    if (required) throw FieldError{std::string("missing field '") + key + "'"};
    return "";
  }
  if (!it->is_string()) {
    throw FieldError{std::string("field '") + key + "' must be a string"};
  }
  return it->get<std::string>();
}

Response FromOutcome(int status, const ordered_json& body) {
  return Response{status, body.dump()};
}

ordered_json Envelope(std::string_view code, std::string_view message,
                      ordered_json details = ordered_json::object()) {
  return ordered_json::parse(ErrorBody(code, message, std::move(details)));
}

}  // namespace

ScoringService::Outcome ScoringService::ScoreOne(const json& request) const {
  Outcome out;
  if (!request.is_object()) {
    out.status = 400;
    out.body = Envelope("malformed_body", "request must be a JSON object");
    return out;
  }
  std::string metric_name, passage, question, reference, candidate;
  try {
    metric_name = StringField(request, "metric", true);
    passage = StringField(request, "passage", false);
    question = StringField(request, "question", false);
    reference = StringField(request, "reference", true);
    candidate = StringField(request, "candidate", true);
  } catch (const FieldError& e) {
    out.status = 400;
    out.body = Envelope("malformed_body", e.message);
    return out;
  }
  out.metric = metric_name;
  const RegisteredMetric* metric = registry_.Find(metric_name);
  if (metric == nullptr) {
    out.status = 400;
    out.body = Envelope("unknown_metric",
                        "unknown metric '" + metric_name + "'",
                        {{"valid_metrics", registry_.Names()}});
    return out;
  }
  ordered_json body;
  if (metric->is_learned()) {
    auto ticket = metric->queue->TryEnter();
    if (!ticket) {
      out.status = 503;
      out.body = Envelope("queue_full",
                          "inference queue for '" + metric_name + "' is full",
                          {{"capacity", metric->queue->capacity()}});
      return out;
    }
    learned::ScorePrediction p;
    try {
      std::lock_guard<std::mutex> lock(metric->queue->execution_mutex());
      p = metric->model->Predict(passage, question, reference, candidate);
    } catch (const LengthError& e) {
      out.status = 400;
      out.body = Envelope("input_too_long", e.what(),
                          {{"segment", e.segment()}});
      return out;
    }
    body["score"] = p.reported;
    body["raw"] = p.raw;
  } else {
    body["score"] = lexical::ScorePair(*metric->lexical, reference, candidate);
  }
  body["metric"] = metric->name;
  body["model_fingerprint"] = metric->fingerprint;
  out.body = std::move(body);
  return out;
}

Response ScoringService::Score(std::string_view body) const {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  json request = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (request.is_discarded()) {
    out.status = 400;
    out.body = Envelope("malformed_body", "request body is not valid JSON");
  } else {
    out = ScoreOne(request);
  }
  Log("POST", "/v1/score", out.metric, out.status,
      std::chrono::steady_clock::now() - start);
  return FromOutcome(out.status, out.body);
}

Response ScoringService::ScoreBatch(std::string_view body) const {
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](int status, const ordered_json& payload,
                    const std::string& metric) {
    Log("POST", "/v1/score/batch", metric, status,
        std::chrono::steady_clock::now() - start);
    return FromOutcome(status, payload);
  };
  json request = json::parse(body, nullptr, false);
  if (request.is_discarded()) {
    return finish(400, Envelope("malformed_body", "request body is not valid JSON"),
                  "");
  }
  if (request.is_object() && request.contains("requests")) {
    request = request["requests"];
  }
  if (!request.is_array()) {
    return finish(400,
                  Envelope("malformed_body",
                           "batch body must be an array of score requests"),
                  "");
  }
  if (request.size() > kMaxBatchSize) {
    return finish(413,
                  Envelope("batch_too_large", "batch exceeds the maximum size",
                           {{"max_batch_size", kMaxBatchSize},
                            {"received", request.size()}}),
                  "");
  }
  ordered_json results = ordered_json::array();
  std::string metrics_seen;
  for (size_t i = 0; i < request.size(); ++i) {
    Outcome out = ScoreOne(request[i]);
    if (metrics_seen.find(out.metric) == std::string::npos) {
      if (!metrics_seen.empty()) metrics_seen += ",";
      metrics_seen += out.metric;
    }
    if (out.status != 200) {
      out.body["details"]["index"] = i;
      return finish(out.status, out.body, metrics_seen);
    }
    results.push_back(std::move(out.body));
  }
  return finish(200, ordered_json{{"results", std::move(results)}},
                metrics_seen);
}

Response ScoringService::Health() const {
  ordered_json fingerprints = ordered_json::object();
  for (const auto& [name, m] : registry_.metrics()) {
    fingerprints[name] = m.fingerprint;
  }
  return FromOutcome(200, ordered_json{{"status", "ok"},
                                       {"fingerprints", fingerprints}});
}

Response ScoringService::Metrics() const {
  ordered_json list = ordered_json::array();
  for (const auto& [name, m] : registry_.metrics()) {
    list.push_back({{"name", name},
                    {"kind", m.is_learned() ? "learned" : "lexical"},
                    {"min", m.min_score},
                    {"max", m.max_score},
                    {"model_fingerprint", m.fingerprint}});
  }
  return FromOutcome(200, ordered_json{{"metrics", list}});
}

Response ScoringService::Handle(std::string_view method, std::string_view path,
                                std::string_view body) const {
  if (path == "/v1/score" && method == "POST") return Score(body);
  if (path == "/v1/score/batch" && method == "POST") return ScoreBatch(body);
  const auto start = std::chrono::steady_clock::now();
  Response r;
  if (path == "/v1/health" && method == "GET") {
    r = Health();
  } else if (path == "/v1/metrics" && method == "GET") {
    r = Metrics();
  } else if (path == "/v1/score" || path == "/v1/score/batch" ||
             path == "/v1/health" || path == "/v1/metrics") {
    r = Response{405, ErrorBody("method_not_allowed",
                                std::string(method) + " not allowed on " +
                                    std::string(path))};
  } else {
    r = Response{404, ErrorBody("not_found",
                                "no route for " + std::string(path))};
  }
  Log(method, path, "", r.status, std::chrono::steady_clock::now() - start);
  return r;
}

void ScoringService::Log(std::string_view method, std::string_view path,
                         std::string_view metric, int status,
                         std::chrono::steady_clock::duration latency) const {
  if (log_ == nullptr) return;
  ordered_json line;
  line["method"] = method;
  line["path"] = path;
  line["metric"] = metric;
  line["status"] = status;
  line["latency_ms"] =
      std::chrono::duration<double, std::milli>(latency).count();
  std::lock_guard<std::mutex> lock(log_mu_);
  *log_ << line.dump() << "\n";
  log_->flush();
}

HttpServer::HttpServer(const ScoringService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  Install();
}

HttpServer::~HttpServer() { Stop(); }

void HttpServer::Install() {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    Response r = service_.Handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->Post("/v1/score", route);
  server_->Post("/v1/score/batch", route);
  server_->Get("/v1/health", route);
  server_->Get("/v1/metrics", route);
  server_->set_error_handler(
      [this](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        Response r = service_.Handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
      });
}

int HttpServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error("failed to bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw Error("failed to bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::Run(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) {
    throw Error("failed to bind " + host + ":" + std::to_string(port));
  }
  server_->listen_after_bind();
}

void HttpServer::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace rceval::service
