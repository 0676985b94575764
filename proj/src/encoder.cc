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

#include "rceval/encoder.h"

#include <cmath>
#include <numbers>

#include "json.hpp"
#include "rceval/errors.h"
#include "rceval/hashing.h"
#include "rceval/random.h"

namespace rceval::learned {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kSegmentTypes = 4;

MatrixXd RandomNormal(int rows, int cols, double stddev, Rng& rng) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = stddev * StandardNormal(rng);
  }
  return m;
}

Parameter Weight(std::string name, int rows, int cols, double stddev,
                 Rng& rng) {
  return Parameter(std::move(name), RandomNormal(rows, cols, stddev, rng),
                   true);
}

Parameter Bias(std::string name, int cols) {
  return Parameter(std::move(name), MatrixXd::Zero(1, cols), false);
}

Parameter Gain(std::string name, int cols) {
  return Parameter(std::move(name), MatrixXd::Ones(1, cols), false);
}

struct LayerNormCache {
  MatrixXd xhat;
  VectorXd inv_std;
};

MatrixXd LayerNormForward(const MatrixXd& x, const Parameter& gain,
                          const Parameter& bias, double eps,
                          LayerNormCache& cache) {
  const int n = static_cast<int>(x.cols());
  cache.xhat.resize(x.rows(), n);
  cache.inv_std.resize(x.rows());
  for (int r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const auto centered = (x.row(r).array() - mean).matrix();
    const double var = centered.squaredNorm() / n;
    const double inv = 1.0 / std::sqrt(var + eps);
    cache.inv_std(r) = inv;
    cache.xhat.row(r) = centered * inv;
  }
  MatrixXd y = cache.xhat.array().rowwise() * gain.value.row(0).array();
  y.rowwise() += bias.value.row(0);
  return y;
}

MatrixXd LayerNormBackward(const MatrixXd& dy, const LayerNormCache& cache,
                           Parameter& gain, Parameter& bias) {
  const int n = static_cast<int>(dy.cols());
  gain.grad.row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  bias.grad.row(0) += dy.colwise().sum();
  const MatrixXd dxhat = dy.array().rowwise() * gain.value.row(0).array();
  MatrixXd dx(dy.rows(), n);
  for (int r = 0; r < dy.rows(); ++r) {
    const double sum = dxhat.row(r).sum();
    const double dot = dxhat.row(r).dot(cache.xhat.row(r));
    dx.row(r) = (cache.inv_std(r) / n) *
                (n * dxhat.row(r).array() - sum -
                 cache.xhat.row(r).array() * dot)
                    .matrix();
  }
  return dx;
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

double Gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double GeluGrad(double x) {
  const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
  return 0.5 * (1.0 + t) +
         0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

MatrixXd Affine(const MatrixXd& x, const Parameter& w, const Parameter& b) {
  MatrixXd y = x * w.value;
  y.rowwise() += b.value.row(0);
  return y;
}

void AffineBackward(const MatrixXd& x, const MatrixXd& dy, Parameter& w,
                    Parameter& b) {
  w.grad.noalias() += x.transpose() * dy;
  b.grad.row(0) += dy.colwise().sum();
}

void SoftmaxRowsInPlace(MatrixXd& s) {
  for (int r = 0; r < s.rows(); ++r) {
    const double max = s.row(r).maxCoeff();
    s.row(r) = (s.row(r).array() - max).exp().matrix();
    s.row(r) /= s.row(r).sum();
  }
}

struct LayerCache {
  MatrixXd x;
  MatrixXd q, k, v;
  std::vector<MatrixXd> attention;
  MatrixXd context;
  LayerNormCache ln1;
  MatrixXd y1;
  MatrixXd h1;
  MatrixXd g1;
  LayerNormCache ln2;
};

struct TransformerActivations : EncoderActivations {
  std::vector<int> token_ids;
  std::vector<int> segment_ids;
  LayerNormCache embedding_ln;
  std::vector<LayerCache> layers;
};

}  // namespace

TransformerEncoder::TransformerEncoder(const TransformerConfig& config,
                                       uint64_t seed)
    : config_(config), tokenizer_(config.vocab_buckets) {
  if (config.hidden_size <= 0 || config.num_layers < 0 ||
      config.num_heads <= 0 || config.hidden_size % config.num_heads != 0 ||
      config.ffn_size <= 0 || config.max_length < 5) {
    throw PreconditionError("invalid transformer configuration");
  }
  Rng rng(DeriveSeed(seed, "encoder/init"));
  const int d = config.hidden_size;
  const int f = config.ffn_size;
  const double sd = config.init_stddev;
  token_embedding_ = Weight("embeddings.token", tokenizer_.vocab_size(), d, sd, rng);
  position_embedding_ = Weight("embeddings.position", config.max_length, d, sd, rng);
  segment_embedding_ = Weight("embeddings.segment", kSegmentTypes, d, sd, rng);
  embedding_ln_gain_ = Gain("embeddings.ln.gain", d);
  embedding_ln_bias_ = Bias("embeddings.ln.bias", d);
  for (int l = 0; l < config.num_layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    Layer layer;
    layer.wq = Weight(p + "attn.wq", d, d, sd, rng);
    layer.bq = Bias(p + "attn.bq", d);
    layer.wk = Weight(p + "attn.wk", d, d, sd, rng);
    layer.bk = Bias(p + "attn.bk", d);
    layer.wv = Weight(p + "attn.wv", d, d, sd, rng);
    layer.bv = Bias(p + "attn.bv", d);
    layer.wo = Weight(p + "attn.wo", d, d, sd, rng);
    layer.bo = Bias(p + "attn.bo", d);
    layer.ln1_gain = Gain(p + "ln1.gain", d);
    layer.ln1_bias = Bias(p + "ln1.bias", d);
    layer.w1 = Weight(p + "ffn.w1", d, f, sd, rng);
    layer.b1 = Bias(p + "ffn.b1", f);
    layer.w2 = Weight(p + "ffn.w2", f, d, sd, rng);
    layer.b2 = Bias(p + "ffn.b2", d);
    layer.ln2_gain = Gain(p + "ln2.gain", d);
    layer.ln2_bias = Bias(p + "ln2.bias", d);
    layers_.push_back(std::move(layer));
  }
}

std::unique_ptr<EncoderActivations> TransformerEncoder::Forward(
    const PackedInput& input) const {
  const int t = input.size();
  if (t > config_.max_length) {
    throw LengthError("input", "packed input longer than encoder max length");
  }
  const int d = config_.hidden_size;
  const int heads = config_.num_heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  auto act = std::make_unique<TransformerActivations>();
  act->token_ids = input.token_ids;
  act->segment_ids = input.segment_ids;
  MatrixXd e(t, d);
  for (int i = 0; i < t; ++i) {
    const int id = input.token_ids[i];
    const int seg = input.segment_ids[i];
    if (id < 0 || id >= tokenizer_.vocab_size() || seg < 0 ||
        seg >= kSegmentTypes) {
      throw PreconditionError("token or segment id out of range");
    }
    e.row(i) = token_embedding_.value.row(id) +
               position_embedding_.value.row(i) +
               segment_embedding_.value.row(seg);
  }
  MatrixXd x = LayerNormForward(e, embedding_ln_gain_, embedding_ln_bias_,
                                config_.layer_norm_eps, act->embedding_ln);

  act->layers.resize(layers_.size());
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    LayerCache& c = act->layers[l];
    c.x = std::move(x);
    c.q = Affine(c.x, layer.wq, layer.bq);
    c.k = Affine(c.x, layer.wk, layer.bk);
    c.v = Affine(c.x, layer.wv, layer.bv);
    c.context.resize(t, d);
    c.attention.resize(heads);
    for (int h = 0; h < heads; ++h) {
      MatrixXd s = c.q.middleCols(h * dh, dh) *
                   c.k.middleCols(h * dh, dh).transpose() * scale;
      SoftmaxRowsInPlace(s);
      c.context.middleCols(h * dh, dh) = s * c.v.middleCols(h * dh, dh);
      c.attention[h] = std::move(s);
    }
    MatrixXd s1 = c.x + Affine(c.context, layer.wo, layer.bo);
    c.y1 = LayerNormForward(s1, layer.ln1_gain, layer.ln1_bias,
                            config_.layer_norm_eps, c.ln1);
    c.h1 = Affine(c.y1, layer.w1, layer.b1);
    c.g1 = c.h1.unaryExpr([](double v) { return Gelu(v); });
    MatrixXd s2 = c.y1 + Affine(c.g1, layer.w2, layer.b2);
    x = LayerNormForward(s2, layer.ln2_gain, layer.ln2_bias,
                         config_.layer_norm_eps, c.ln2);
  }
  act->hidden = std::move(x);
  return act;
}

void TransformerEncoder::Backward(const EncoderActivations& activations,
                                  const Eigen::MatrixXd& d_hidden) {
  const auto& act = dynamic_cast<const TransformerActivations&>(activations);
  const int d = config_.hidden_size;
  const int heads = config_.num_heads;
  const int dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  MatrixXd dx = d_hidden;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    Layer& layer = layers_[l];
    const LayerCache& c = act.layers[l];

    const MatrixXd ds2 =
        LayerNormBackward(dx, c.ln2, layer.ln2_gain, layer.ln2_bias);
    AffineBackward(c.g1, ds2, layer.w2, layer.b2);
    MatrixXd dh1 = ds2 * layer.w2.value.transpose();
    dh1.array() *= c.h1.unaryExpr([](double v) { return GeluGrad(v); }).array();
    AffineBackward(c.y1, dh1, layer.w1, layer.b1);
    const MatrixXd dy1 = ds2 + dh1 * layer.w1.value.transpose();

    const MatrixXd ds1 =
        LayerNormBackward(dy1, c.ln1, layer.ln1_gain, layer.ln1_bias);
    AffineBackward(c.context, ds1, layer.wo, layer.bo);
    const MatrixXd dcontext = ds1 * layer.wo.value.transpose();

    MatrixXd dq(c.q.rows(), d), dk(c.k.rows(), d), dv(c.v.rows(), d);
    for (int h = 0; h < heads; ++h) {
      const MatrixXd& a = c.attention[h];
      const auto dctx_h = dcontext.middleCols(h * dh, dh);
      const MatrixXd da = dctx_h * c.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh) = a.transpose() * dctx_h;
      const Eigen::VectorXd row_dot = (da.array() * a.array()).rowwise().sum();
      MatrixXd ds = a.array() * (da.colwise() - row_dot).array();
      ds *= scale;
      dq.middleCols(h * dh, dh) = ds * c.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh) = ds.transpose() * c.q.middleCols(h * dh, dh);
    }
    AffineBackward(c.x, dq, layer.wq, layer.bq);
    AffineBackward(c.x, dk, layer.wk, layer.bk);
    AffineBackward(c.x, dv, layer.wv, layer.bv);
    dx = ds1 + dq * layer.wq.value.transpose() +
         dk * layer.wk.value.transpose() + dv * layer.wv.value.transpose();
  }

  const MatrixXd de = LayerNormBackward(dx, act.embedding_ln,
                                        embedding_ln_gain_, embedding_ln_bias_);
  for (int i = 0; i < de.rows(); ++i) {
    token_embedding_.grad.row(act.token_ids[i]) += de.row(i);
    position_embedding_.grad.row(i) += de.row(i);
    segment_embedding_.grad.row(act.segment_ids[i]) += de.row(i);
  }
}

std::vector<Parameter*> TransformerEncoder::Parameters() {
  std::vector<Parameter*> out = {&token_embedding_, &position_embedding_,
                                 &segment_embedding_, &embedding_ln_gain_,
                                 &embedding_ln_bias_};
  for (auto& l : layers_) {
    for (Parameter* p : {&l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo,
                         &l.bo, &l.ln1_gain, &l.ln1_bias, &l.w1, &l.b1, &l.w2,
                         &l.b2, &l.ln2_gain, &l.ln2_bias}) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<const Parameter*> TransformerEncoder::Parameters() const {
  auto mutable_params = const_cast<TransformerEncoder*>(this)->Parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

std::unique_ptr<Encoder> TransformerEncoder::Clone() const {
  return std::make_unique<TransformerEncoder>(*this);
}

std::string TransformerEncoder::SerializeConfig() const {
  nlohmann::ordered_json j;
  j["kind"] = "transformer";
  j["vocab_buckets"] = config_.vocab_buckets;
  j["hidden_size"] = config_.hidden_size;
  j["num_layers"] = config_.num_layers;
  j["num_heads"] = config_.num_heads;
  j["ffn_size"] = config_.ffn_size;
  j["max_length"] = config_.max_length;
  j["init_stddev"] = config_.init_stddev;
  j["layer_norm_eps"] = config_.layer_norm_eps;
  return j.dump();
}

TransformerConfig TransformerEncoder::ParseConfig(std::string_view json) {
  TransformerConfig c;
  try {
    const auto j = nlohmann::json::parse(json);
    c.vocab_buckets = j.value("vocab_buckets", c.vocab_buckets);
    c.hidden_size = j.value("hidden_size", c.hidden_size);
    c.num_layers = j.value("num_layers", c.num_layers);
    c.num_heads = j.value("num_heads", c.num_heads);
    c.ffn_size = j.value("ffn_size", c.ffn_size);
    c.max_length = j.value("max_length", c.max_length);
    c.init_stddev = j.value("init_stddev", c.init_stddev);
    c.layer_norm_eps = j.value("layer_norm_eps", c.layer_norm_eps);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("encoder config", e.what());
  }
  return c;
}

std::unique_ptr<Encoder> MakeEncoder(std::string_view serialized_config) {
  std::string kind;
  try {
    kind = nlohmann::json::parse(serialized_config).value("kind", "");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("encoder config", e.what());
  }
  if (kind != "transformer") {
    throw CheckpointError("unknown encoder kind \"" + kind + "\"");
  }
  return std::make_unique<TransformerEncoder>(
      TransformerEncoder::ParseConfig(serialized_config), 0);
}

}  // namespace rceval::learned
