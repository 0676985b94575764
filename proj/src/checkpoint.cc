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

#include "rceval/checkpoint.h"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rceval/errors.h"
#include "rceval/hashing.h"

namespace rceval::learned {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr char kMagic[8] = {'R', 'C', 'E', 'V', 'A', 'L', 'C', 'K'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

std::string HexFloat(double v) {
  std::ostringstream ss;
  ss << std::hexfloat << v;
  return ss.str();
}

double ParseHexFloat(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw CheckpointError("bad probe value " + s);
  return v;
}

template <typename T>
void AppendPod(std::string& out, const T& value) {
  out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}

  template <typename T>
  T Pod() {
    T value;
    Bytes(reinterpret_cast<char*>(&value), sizeof(T));
    return value;
  }
  void Bytes(char* out, size_t n) {
    if (pos_ + n > data_.size()) {
      throw CheckpointError("parameter file is truncated");
    }
    std::memcpy(out, data_.data() + pos_, n);
    pos_ += n;
  }
  size_t position() const { return pos_; }

 private:
  const std::string& data_;
  size_t pos_ = 0;
};

std::string SerializeParams(const ordered_json& header,
                            const std::vector<const Parameter*>& params) {
  std::string out(kMagic, sizeof(kMagic));
  AppendPod(out, kCheckpointFormatVersion);
  const std::string header_text = header.dump();
  AppendPod(out, static_cast<uint64_t>(header_text.size()));
  out += header_text;
  for (const Parameter* p : params) {
    for (Eigen::Index c = 0; c < p->value.cols(); ++c) {
      for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
        AppendPod(out, p->value(r, c));
      }
    }
  }
  AppendPod(out, Fnv1a64(out));
  return out;
}

struct ParsedParams {
  nlohmann::json header;
  std::string payload;  // raw doubles
};

ParsedParams ParseParams(const std::string& data) {
  if (data.size() < sizeof(kMagic) + sizeof(uint32_t) + 2 * sizeof(uint64_t)) {
    throw CheckpointError("parameter file is truncated");
  }
  if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not a checkpoint parameter file");
  }
  const size_t body = data.size() - sizeof(uint64_t);
  uint64_t stored_checksum;
  std::memcpy(&stored_checksum, data.data() + body, sizeof(uint64_t));
  Reader reader(data);
  char magic[sizeof(kMagic)];
  reader.Bytes(magic, sizeof(magic));
  const uint32_t version = reader.Pod<uint32_t>();
  if (version != kCheckpointFormatVersion) {
    throw CheckpointError("incompatible checkpoint format version " +
                          std::to_string(version) + " (this build reads " +
                          std::to_string(kCheckpointFormatVersion) + ")");
  }
  if (Fnv1a64(std::string_view(data.data(), body)) != stored_checksum) {
    throw CheckpointError("parameter file is truncated or corrupt");
  }
  const uint64_t header_len = reader.Pod<uint64_t>();
  if (reader.position() + header_len > body) {
    throw CheckpointError("parameter file is truncated");
  }
  std::string header_text(header_len, '\0');
  reader.Bytes(header_text.data(), header_len);
  ParsedParams parsed;
  try {
    parsed.header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }
  parsed.payload = data.substr(reader.position(), body - reader.position());
  return parsed;
}

void FillParams(const nlohmann::json& specs, const std::string& payload,
                const std::vector<Parameter*>& params) {
  if (!specs.is_array() || specs.size() != params.size()) {
    throw CheckpointError("parameter list does not match the architecture");
  }
  size_t offset = 0;
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    const auto& spec = specs[i];
    if (spec.value("name", "") != p.name ||
        spec.value("rows", -1) != p.value.rows() ||
        spec.value("cols", -1) != p.value.cols()) {
      throw CheckpointError("parameter " + p.name +
                            " does not match the stored layout");
    }
    const size_t bytes = sizeof(double) * p.value.size();
    if (offset + bytes > payload.size()) {
      throw CheckpointError("parameter file is truncated");
    }
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
      for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
        std::memcpy(&p.value(r, c), payload.data() + offset, sizeof(double));
        offset += sizeof(double);
      }
    }
    p.ZeroGrad();
  }
  if (offset != payload.size()) {
    throw CheckpointError("parameter file has trailing data");
  }
}

ordered_json ParamSpecs(const std::vector<const Parameter*>& params) {
  ordered_json specs = ordered_json::array();
  for (const Parameter* p : params) {
    specs.push_back({{"name", p->name},
                     {"rows", p->value.rows()},
                     {"cols", p->value.cols()}});
  }
  return specs;
}

void WriteAtomically(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string ReadBinary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void CheckComplete(const fs::path& dir) {
  if (fs::exists(dir / kIncompleteMarker)) {
    throw CheckpointError("checkpoint " + dir.string() +
                          " is incomplete (interrupted training run)");
  }
}

ordered_json ProvenanceJson(const CheckpointMetadata& metadata,
                            const std::string& model_kind) {
  ordered_json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["model"] = model_kind;
  j["phase"] = metadata.phase;
  j["seed"] = metadata.config.seed;
  j["config"] = ToJson(metadata.config);
  j["optimizer"] = {{"name", "adamw"},
                    {"beta1", 0.9},
                    {"beta2", 0.999},
                    {"epsilon", 1e-8},
                    {"schedule", "linear_warmup_then_linear_decay"}};
  j["data_fingerprints"] = metadata.data_fingerprints;
  j["manifest"] = metadata.manifest;
  j["history"] = ToJson(metadata.history);
  return j;
}

void WriteProbe(const fs::path& dir, double raw) {
  const ProbeInput& probe = DefaultProbe();
  ordered_json j;
  j["passage"] = probe.passage;
  j["question"] = probe.question;
  j["reference"] = probe.reference;
  j["candidate"] = probe.candidate;
  j["raw"] = raw;
  j["raw_hex"] = HexFloat(raw);
  WriteAtomically(dir / kProbeFile, j.dump(2) + "\n");
}

void VerifyProbe(const fs::path& dir, double raw) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ReadBinary(dir / kProbeFile));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("corrupt probe.json: ") + e.what());
  }
  const double stored = ParseHexFloat(j.value("raw_hex", ""));
  if (std::memcmp(&stored, &raw, sizeof(double)) != 0) {
    throw CheckpointError("probe score mismatch: stored " + HexFloat(stored) +
                          ", recomputed " + HexFloat(raw));
  }
}

double ProbeRaw(const RegressionModel& model) {
  const ProbeInput& p = DefaultProbe();
  return model.Predict(p.passage, p.question, p.reference, p.candidate).raw;
}

double ProbeRaw(const PairClassifier& model) {
  const ProbeInput& p = DefaultProbe();
  return model.Logits(model.Pack({p.passage, p.question, p.reference,
                                  p.candidate, PretrainLabel::kBothCorrect}))(0);
}

struct LoadedParams {
  nlohmann::json header;
  std::string payload;
  std::unique_ptr<Encoder> encoder;
};

LoadedParams LoadParams(const fs::path& dir, const std::string& expected_kind) {
  CheckComplete(dir);
  ParsedParams parsed = ParseParams(ReadBinary(dir / kParamsFile));
  if (parsed.header.value("model", "") != expected_kind) {
    throw CheckpointError("checkpoint holds a " +
                          parsed.header.value("model", std::string("?")) +
                          " model, expected " + expected_kind);
  }
  LoadedParams loaded;
  loaded.encoder = MakeEncoder(parsed.header.at("encoder").dump());
  loaded.header = std::move(parsed.header);
  loaded.payload = std::move(parsed.payload);
  return loaded;
}

}  // namespace

const ProbeInput& DefaultProbe() {
  static const ProbeInput kProbe{
      "Both doors are heavily soundproofed to prevent the accused from "
      "hearing what is behind each one.",
      "What feature do the doors have?", "soundproofed",
      "They are heavily soundproofed."};
  return kProbe;
}

ordered_json ToJson(const TrainConfig& c) {
  ordered_json j;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["learning_rates"] = c.learning_rates;
  j["runs_per_learning_rate"] = c.runs_per_learning_rate;
  j["seed"] = c.seed;
  j["ablation"] = c.ablation.Names();
  j["selection_metric"] = std::string(ToString(c.selection_metric));
  j["dev_pooling"] = std::string(ToString(c.dev_pooling));
  j["weight_decay"] = c.weight_decay;
  j["warmup_fraction"] = c.warmup_fraction;
  j["max_grad_norm"] = c.max_grad_norm;
  return j;
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j, TrainConfig c) {
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  if (j.contains("learning_rates")) {
    c.learning_rates = j.at("learning_rates").get<std::vector<double>>();
  }
  c.runs_per_learning_rate =
      j.value("runs_per_learning_rate", c.runs_per_learning_rate);
  c.seed = j.value("seed", c.seed);
  if (j.contains("ablation")) {
    c.ablation =
        FieldSet::FromNames(j.at("ablation").get<std::vector<std::string>>());
  }
  if (j.contains("selection_metric")) {
    const auto m = j.at("selection_metric").get<std::string>();
    if (m == "accuracy") {
      c.selection_metric = SelectionMetric::kAccuracy;
    } else if (m == "pearson") {
      c.selection_metric = SelectionMetric::kPearson;
    } else {
      throw UsageError("unknown selection_metric " + m);
    }
  }
  if (j.contains("dev_pooling")) {
    const auto p = j.at("dev_pooling").get<std::string>();
    if (p == "pooled") {
      c.dev_pooling = DevPooling::kPooled;
    } else if (p == "per_dataset_mean") {
      c.dev_pooling = DevPooling::kPerDatasetMean;
    } else {
      throw UsageError("unknown dev_pooling " + p);
    }
  }
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.warmup_fraction = j.value("warmup_fraction", c.warmup_fraction);
  c.max_grad_norm = j.value("max_grad_norm", c.max_grad_norm);
  return c;
}

ordered_json ToJson(const TrainingHistory& h) {
  ordered_json j;
  j["phase"] = h.phase;
  j["selection_metric"] = std::string(ToString(h.selection_metric));
  j["training_datasets"] = h.training_datasets;
  j["selection_datasets"] = h.selection_datasets;
  j["training_examples"] = h.training_examples;
  j["selection_examples"] = h.selection_examples;
  j["selected_run"] = h.selected_run;
  j["selected_learning_rate"] = h.selected_learning_rate;
  ordered_json runs = ordered_json::array();
  for (const auto& run : h.runs) {
    ordered_json r;
    r["learning_rate"] = run.learning_rate;
    r["run_index"] = run.run_index;
    r["seed"] = run.seed;
    r["best_epoch"] = run.best_epoch;
    r["best_value"] =
        run.best_value ? ordered_json(*run.best_value) : ordered_json(nullptr);
    ordered_json epochs = ordered_json::array();
    for (const auto& e : run.epochs) {
      epochs.push_back(
          {{"epoch", e.epoch},
           {"train_loss", e.train_loss},
           {"selection_value", e.selection_value
                                   ? ordered_json(*e.selection_value)
                                   : ordered_json(nullptr)}});
    }
    r["epochs"] = std::move(epochs);
    runs.push_back(std::move(r));
  }
  j["runs"] = std::move(runs);
  j["warnings"] = h.warnings;
  return j;
}

void SaveCheckpoint(const RegressionModel& model,
                    const CheckpointMetadata& metadata, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<const Parameter*> params = model.encoder().Parameters();
  params.push_back(&model.head().weight());
  params.push_back(&model.head().bias());
  ordered_json header;
  header["model"] = "regression";
  header["encoder"] = ordered_json::parse(model.encoder().SerializeConfig());
  header["use_bias"] = model.head().use_bias();
  header["ablation"] = model.ablation().Names();
  header["parameters"] = ParamSpecs(params);
  WriteAtomically(dir / kParamsFile, SerializeParams(header, params));
  WriteAtomically(dir / kProvenanceFile,
                  ProvenanceJson(metadata, "regression").dump(2) + "\n");
  WriteProbe(dir, ProbeRaw(model));
  fs::remove(dir / kIncompleteMarker);
}

void SaveCheckpoint(const PairClassifier& model,
                    const CheckpointMetadata& metadata, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<const Parameter*> params = model.encoder().Parameters();
  params.push_back(&model.head().weight());
  params.push_back(&model.head().bias());
  ordered_json header;
  header["model"] = "classifier";
  header["encoder"] = ordered_json::parse(model.encoder().SerializeConfig());
  header["parameters"] = ParamSpecs(params);
  WriteAtomically(dir / kParamsFile, SerializeParams(header, params));
  WriteAtomically(dir / kProvenanceFile,
                  ProvenanceJson(metadata, "classifier").dump(2) + "\n");
  WriteProbe(dir, ProbeRaw(model));
  fs::remove(dir / kIncompleteMarker);
}

RegressionModel LoadRegressionCheckpoint(const fs::path& dir) {
  LoadedParams loaded = LoadParams(dir, "regression");
  const int d = loaded.encoder->hidden_size();
  RegressionHead head =
      RegressionHead::Zero(d, loaded.header.value("use_bias", true));
  std::vector<Parameter*> params = loaded.encoder->Parameters();
  params.push_back(&head.weight());
  params.push_back(&head.bias());
  FillParams(loaded.header.at("parameters"), loaded.payload, params);
  FieldSet ablation = FieldSet::FromNames(
      loaded.header.value("ablation", FieldSet::All().Names()));
  RegressionModel model(std::move(loaded.encoder), std::move(head), ablation);
  VerifyProbe(dir, ProbeRaw(model));
  return model;
}

PairClassifier LoadClassifierCheckpoint(const fs::path& dir) {
  LoadedParams loaded = LoadParams(dir, "classifier");
  ClassificationHead head(loaded.encoder->hidden_size(), 0.0, 0);
  std::vector<Parameter*> params = loaded.encoder->Parameters();
  for (Parameter* p : head.Parameters()) params.push_back(p);
  FillParams(loaded.header.at("parameters"), loaded.payload, params);
  PairClassifier model(std::move(loaded.encoder), std::move(head));
  VerifyProbe(dir, ProbeRaw(model));
  return model;
}

std::string ModelFingerprint(const fs::path& dir) {
  return Sha256Hex(ReadBinary(dir / kParamsFile));
}

DirectoryLock::DirectoryLock(const fs::path& dir) : path_(dir / kLockFile) {
  fs::create_directories(dir);
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw Error("checkpoint directory " + dir.string() +
                " is locked by another training run (" + path_.string() +
                ": " + std::strerror(errno) + ")");
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

DirectoryLock::~DirectoryLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

}  // namespace rceval::learned
