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

#ifndef RCEVAL_ENCODER_H_
#define RCEVAL_ENCODER_H_

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rceval/packing.h"
#include "rceval/tokenizer.h"

namespace rceval::learned {

// A trainable tensor and its accumulated gradient.
struct Parameter {
  std::string name;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;
  bool decay = true;  // subject to weight decay

  Parameter() = default;
  Parameter(std::string n, Eigen::MatrixXd v, bool d)
      : name(std::move(n)),
        value(std::move(v)),
        grad(Eigen::MatrixXd::Zero(value.rows(), value.cols())),
        decay(d) {}
  void ZeroGrad() { grad.setZero(); }
};

// Opaque per-input cache produced by Forward and consumed by Backward.
struct EncoderActivations {
  virtual ~EncoderActivations() = default;
  Eigen::MatrixXd hidden;  // one row per packed token; row 0 is pooled
};

// Contract every encoder satisfies: a packed input of length T maps to T
// hidden states of width hidden_size(), and the first state is the pooled
// representation. Forward is const and safe to call concurrently; Backward
// accumulates into the parameter gradients.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::string_view kind() const = 0;
  virtual int hidden_size() const = 0;
  virtual int max_length() const = 0;
  virtual const HashingTokenizer& tokenizer() const = 0;

  virtual std::unique_ptr<EncoderActivations> Forward(
      const PackedInput& input) const = 0;
  virtual void Backward(const EncoderActivations& activations,
                        const Eigen::MatrixXd& d_hidden) = 0;

  virtual std::vector<Parameter*> Parameters() = 0;
  virtual std::vector<const Parameter*> Parameters() const = 0;
  virtual std::unique_ptr<Encoder> Clone() const = 0;

  // JSON object describing the architecture; parameters excluded.
  virtual std::string SerializeConfig() const = 0;
};

struct TransformerConfig {
  int vocab_buckets = 30000;
  int hidden_size = 768;
  int num_layers = 12;
  int num_heads = 12;
  int ffn_size = 3072;
  int max_length = 512;
  double init_stddev = 0.02;
  double layer_norm_eps = 1e-12;

  // Desk-scale configuration used by tests and the overfit smoke run.
  static TransformerConfig Tiny() {
    TransformerConfig c;
    c.vocab_buckets = 512;
    c.hidden_size = 16;
    c.num_layers = 2;
    c.num_heads = 2;
    c.ffn_size = 32;
    c.max_length = 128;
    c.layer_norm_eps = 1e-6;
    return c;
  }
};

// Post-layer-norm transformer encoder (token + position + segment
// embeddings, multi-head self-attention, GELU feed-forward) with
// hand-written backpropagation.
class TransformerEncoder : public Encoder {
 public:
  TransformerEncoder(const TransformerConfig& config, uint64_t seed);

  std::string_view kind() const override { return "transformer"; }
  int hidden_size() const override { return config_.hidden_size; }
  int max_length() const override { return config_.max_length; }
  const HashingTokenizer& tokenizer() const override { return tokenizer_; }
  const TransformerConfig& config() const { return config_; }

  std::unique_ptr<EncoderActivations> Forward(
      const PackedInput& input) const override;
  void Backward(const EncoderActivations& activations,
                const Eigen::MatrixXd& d_hidden) override;

  std::vector<Parameter*> Parameters() override;
  std::vector<const Parameter*> Parameters() const override;
  std::unique_ptr<Encoder> Clone() const override;
  std::string SerializeConfig() const override;

  static TransformerConfig ParseConfig(std::string_view json);

 private:
  struct Layer {
    Parameter wq, bq, wk, bk, wv, bv, wo, bo;
    Parameter ln1_gain, ln1_bias;
    Parameter w1, b1, w2, b2;
    Parameter ln2_gain, ln2_bias;
  };

  TransformerConfig config_;
  HashingTokenizer tokenizer_;
  Parameter token_embedding_;
  Parameter position_embedding_;
  Parameter segment_embedding_;
  Parameter embedding_ln_gain_;
  Parameter embedding_ln_bias_;
  std::vector<Layer> layers_;
};

// Rebuilds an encoder from SerializeConfig() output. Parameters are randomly
// initialized and are expected to be overwritten by the caller.
std::unique_ptr<Encoder> MakeEncoder(std::string_view serialized_config);

}  // namespace rceval::learned

#endif  // RCEVAL_ENCODER_H_
