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

#ifndef RCEVAL_SERVICE_H_
#define RCEVAL_SERVICE_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "rceval/learned.h"
#include "rceval/metaeval.h"

namespace httplib {
class Server;
}

namespace rceval::service {

inline constexpr size_t kMaxBatchSize = 256;

// Serializes inference for one model and bounds the number of requests
// waiting on it. Callers that find the queue full get no ticket.
class InferenceQueue {
 public:
  explicit InferenceQueue(size_t capacity) : capacity_(capacity) {}

  class Ticket {
   public:
    Ticket() = default;
    explicit Ticket(InferenceQueue* q) : queue_(q) {}
    Ticket(Ticket&& other) noexcept : queue_(other.queue_) {
      other.queue_ = nullptr;
    }
    Ticket& operator=(Ticket&& other) noexcept;
    ~Ticket();
    explicit operator bool() const { return queue_ != nullptr; }

   private:
    InferenceQueue* queue_ = nullptr;
  };

  Ticket TryEnter();
  std::mutex& execution_mutex() { return exec_mu_; }
  size_t capacity() const { return capacity_; }
  size_t pending() const { return pending_.load(); }

 private:
  size_t capacity_;
  std::atomic<size_t> pending_{0};
  std::mutex exec_mu_;
};

struct RegisteredMetric {
  std::string name;
  double min_score = 0.0;
  double max_score = 1.0;
  std::string fingerprint;
  // Exactly one of the two is set.
  std::optional<lexical::Metric> lexical;
  std::shared_ptr<const learned::RegressionModel> model;
  std::shared_ptr<InferenceQueue> queue;

  bool is_learned() const { return model != nullptr; }
};

class MetricRegistry {
 public:
  // Registers bleu1, rouge_l and meteor.
  void AddLexicalMetrics();
  void AddLearned(std::string name,
                  std::shared_ptr<const learned::RegressionModel> model,
                  std::string fingerprint, size_t queue_capacity = 32);

  const RegisteredMetric* Find(std::string_view name) const;
  std::vector<std::string> Names() const;
  const std::map<std::string, RegisteredMetric, std::less<>>& metrics() const {
    return metrics_;
  }

 private:
  std::map<std::string, RegisteredMetric, std::less<>> metrics_;
};

// Models manifest:
//   {"lexical": true,
//    "queue_capacity": 32,
//    "models": [{"name": "learned", "checkpoint": "path/to/ckpt"}]}
// Relative checkpoint paths resolve against the manifest directory. All
// checkpoints are loaded (and verified) before this returns.
MetricRegistry LoadModelsManifest(const std::filesystem::path& path);

struct Response {
  int status = 200;
  std::string body;
};

// Transport-independent request handling; safe for concurrent use.
class ScoringService {
 public:
  explicit ScoringService(MetricRegistry registry,
                          std::ostream* request_log = nullptr);

  Response Handle(std::string_view method, std::string_view path,
                  std::string_view body) const;

  Response Score(std::string_view body) const;
  Response ScoreBatch(std::string_view body) const;
  Response Health() const;
  Response Metrics() const;

  const MetricRegistry& registry() const { return registry_; }

 private:
  struct Outcome {
    int status = 200;
    nlohmann::ordered_json body;
    std::string metric;
  };
  Outcome ScoreOne(const nlohmann::json& request) const;
  void Log(std::string_view method, std::string_view path,
           std::string_view metric, int status,
           std::chrono::steady_clock::duration latency) const;

  MetricRegistry registry_;
  std::ostream* log_;
  mutable std::mutex log_mu_;
};

std::string ErrorBody(std::string_view code, std::string_view message,
                      nlohmann::ordered_json details = nlohmann::ordered_json::object());

// Runs a ScoringService behind cpp-httplib.
class HttpServer {
 public:
  explicit HttpServer(const ScoringService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds and starts serving on a background thread. Port 0 picks an
  // ephemeral port. Returns the bound port.
  int Start(const std::string& host, int port);
  // Binds and serves on the calling thread until Stop().
  void Run(const std::string& host, int port);
  void Stop();

 private:
  void Install();

  const ScoringService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace rceval::service

#endif  // RCEVAL_SERVICE_H_
