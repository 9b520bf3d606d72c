// Copyright 2026 The bctx Authors
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

#include "bctx/fusion.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "bctx/error.h"
#include "bctx/rng.h"

namespace bctx {
namespace {

constexpr char kModelMagic[] = "BCTXM1";

Linear MakeLinear(std::size_t out, std::size_t in) {
  return Linear{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)),
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out))};
}

void GlorotFill(Linear& l, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(l.w.rows() + l.w.cols()));
  // Row-major draw order keeps the stream independent of Eigen's storage.
  for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
    for (Eigen::Index c = 0; c < l.w.cols(); ++c) l.w(r, c) = rng.Uniform(-limit, limit);
  }
}

std::size_t EnabledCount(const ViewMask& m) { return std::count(m.begin(), m.end(), true); }

struct Forward {
  std::array<Eigen::MatrixXd, 3> x;
  std::array<Eigen::MatrixXd, 3> z;
  Eigen::MatrixXd f;
  std::vector<Eigen::MatrixXd> hz;
  std::vector<Eigen::MatrixXd> ha;
  Eigen::MatrixXd logits;
  std::vector<DenseCnnTrace> traces;
};

Eigen::MatrixXd Rectify(const Eigen::MatrixXd& z) { return z.cwiseMax(0.0); }

Eigen::MatrixXd StepMask(const Eigen::MatrixXd& z) { return (z.array() > 0.0).cast<double>().matrix(); }

void RunForward(const FusionModel& model, std::span<const FeatureTriple* const> inputs, Forward& fw,
                bool keep_traces) {
  const auto n = static_cast<Eigen::Index>(inputs.size());
  if (model.encoder && keep_traces) fw.traces.resize(inputs.size());
  for (View v : kAllViews) {
    const auto vi = static_cast<std::size_t>(v);
    if (!model.views[vi]) continue;
    const auto d = static_cast<Eigen::Index>(model.view_dims[vi]);
    Eigen::MatrixXd& x = fw.x[vi];
    x.resize(d, n);
    for (Eigen::Index s = 0; s < n; ++s) {
      const FeatureTriple& in = *inputs[static_cast<std::size_t>(s)];
      if (v == View::kBin && model.encoder) {
        if (!in.image) throw Error(ErrorCode::kDimMismatch, "model has an image encoder but sample has no image");
        auto emb = DenseCnnForward(*in.image, *model.encoder,
                                   keep_traces ? &fw.traces[static_cast<std::size_t>(s)] : nullptr);
        x.col(s) = Eigen::Map<const Eigen::VectorXd>(emb.data(), d);
        continue;
      }
      const auto& raw = in.view(v);
      if (static_cast<Eigen::Index>(raw.size()) != d) {
        throw Error(ErrorCode::kDimMismatch, std::string(ViewName(v)) + " view has " + std::to_string(raw.size()) +
                                                 " dims, model expects " + std::to_string(d));
      }
      if (v == View::kLib) {
        x.col(s) = LibTransform(raw, model.raw_counts);
      } else {
        x.col(s) = Eigen::Map<const Eigen::VectorXd>(raw.data(), d);
      }
    }
  }

  fw.f.resize(static_cast<Eigen::Index>(EnabledCount(model.views) * model.d_common), n);
  Eigen::Index row = 0;
  for (std::size_t vi = 0; vi < 3; ++vi) {
    if (!model.views[vi]) continue;
    const Linear& p = model.projections[vi];
    fw.z[vi] = p.w * fw.x[vi];
    fw.z[vi].colwise() += p.b;
    fw.f.middleRows(row, p.w.rows()) = Rectify(fw.z[vi]);
    row += p.w.rows();
  }

  fw.hz.clear();
  fw.ha.clear();
  const Eigen::MatrixXd* prev = &fw.f;
  for (const Linear& h : model.hidden) {
    Eigen::MatrixXd z = h.w * *prev;
    z.colwise() += h.b;
    fw.ha.push_back(Rectify(z));
    fw.hz.push_back(std::move(z));
    prev = &fw.ha.back();
  }
  fw.logits = model.output.w * *prev;
  fw.logits.colwise() += model.output.b;
}

std::vector<const FeatureTriple*> Pointers(std::span<const FeatureTriple> inputs) {
  std::vector<const FeatureTriple*> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) out.push_back(&in);
  return out;
}

LossAndGrads LossAndGradsImpl(const FusionModel& model, std::span<const Example* const> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyDataset, "empty batch");
  std::vector<const FeatureTriple*> inputs;
  inputs.reserve(batch.size());
  for (const Example* e : batch) {
    if (e->label >= model.num_classes()) {
      throw Error(ErrorCode::kDimMismatch, "label index " + std::to_string(e->label) + " out of range");
    }
    inputs.push_back(&e->features);
  }
  Forward fw;
  RunForward(model, inputs, fw, model.encoder.has_value());

  const auto n = static_cast<Eigen::Index>(batch.size());
  const double inv_n = 1.0 / static_cast<double>(n);
  LossAndGrads out;
  out.grads = model.ZerosLike();
  FusionModel& g = out.grads;

  // Softmax cross-entropy: d loss / d logits = (p - onehot) / n.
  Eigen::MatrixXd dlogits = Softmax(fw.logits);
  double loss = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto label = static_cast<Eigen::Index>(batch[static_cast<std::size_t>(s)]->label);
    const auto col = fw.logits.col(s);
    const double m = col.maxCoeff();
    const double lse = m + std::log((col.array() - m).exp().sum());
    loss += lse - col(label);
    Eigen::Index arg = 0;
    col.maxCoeff(&arg);
    if (arg == label) ++out.correct;
    dlogits(label, s) -= 1.0;
  }
  out.loss = loss * inv_n;
  dlogits *= inv_n;

  const Eigen::MatrixXd& last = model.hidden.empty() ? fw.f : fw.ha.back();
  g.output.w = dlogits * last.transpose();
  g.output.b = dlogits.rowwise().sum();
  Eigen::MatrixXd dh = model.output.w.transpose() * dlogits;
  for (std::size_t i = model.hidden.size(); i-- > 0;) {
    const Eigen::MatrixXd dz = dh.cwiseProduct(StepMask(fw.hz[i]));
    const Eigen::MatrixXd& prev = i == 0 ? fw.f : fw.ha[i - 1];
    g.hidden[i].w = dz * prev.transpose();
    g.hidden[i].b = dz.rowwise().sum();
    dh = model.hidden[i].w.transpose() * dz;
  }

  Eigen::Index row = 0;
  for (std::size_t vi = 0; vi < 3; ++vi) {
    if (!model.views[vi]) continue;
    const Linear& p = model.projections[vi];
    const Eigen::MatrixXd dz = dh.middleRows(row, p.w.rows()).cwiseProduct(StepMask(fw.z[vi]));
    row += p.w.rows();
    g.projections[vi].w = dz * fw.x[vi].transpose();
    g.projections[vi].b = dz.rowwise().sum();
    if (vi == static_cast<std::size_t>(View::kBin) && model.encoder) {
      const Eigen::MatrixXd dx = p.w.transpose() * dz;
      auto enc_blocks = g.encoder->Blocks();
      for (Eigen::Index s = 0; s < n; ++s) {
        const Eigen::VectorXd col = dx.col(s);
        DenseCnnParams sg = DenseCnnBackward(fw.traces[static_cast<std::size_t>(s)], *model.encoder,
                                             std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
        auto sb = sg.Blocks();
        for (std::size_t k = 0; k < sb.size(); ++k) {
          for (std::size_t j = 0; j < sb[k].size(); ++j) enc_blocks[k][j] += sb[k][j];
        }
      }
    }
  }
  return out;
}

void WriteLinear(ByteWriter& w, const Linear& l) {
  w.U64(static_cast<std::uint64_t>(l.w.rows()));
  w.U64(static_cast<std::uint64_t>(l.w.cols()));
  for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
    for (Eigen::Index c = 0; c < l.w.cols(); ++c) w.F64(l.w(r, c));
  }
  for (Eigen::Index r = 0; r < l.b.size(); ++r) w.F64(l.b(r));
}

Linear ReadLinear(ByteReader& r) {
  const std::uint64_t rows = r.U64();
  const std::uint64_t cols = r.U64();
  if (rows > (1u << 24) || cols > (1u << 24) || rows * cols * 8 > r.remaining()) {
    throw Error(ErrorCode::kTruncatedSection, "model weight table exceeds file");
  }
  Linear l = MakeLinear(rows, cols);
  for (Eigen::Index i = 0; i < l.w.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.w.cols(); ++j) l.w(i, j) = ReadF64(r);
  }
  for (Eigen::Index i = 0; i < l.b.size(); ++i) l.b(i) = ReadF64(r);
  return l;
}

void WriteString(ByteWriter& w, std::string_view s) {
  w.U32(static_cast<std::uint32_t>(s.size()));
  w.Append(s);
}

std::string ReadString(ByteReader& r) {
  const std::uint32_t n = r.U32();
  const auto b = r.Take(n);
  return {b.begin(), b.end()};
}

}  // namespace

std::string_view ViewName(View v) {
  switch (v) {
    case View::kBin: return "bin";
    case View::kCxt: return "cxt";
    case View::kLib: return "lib";
  }
  return "?";
}

View ParseView(std::string_view name) {
  for (View v : kAllViews) {
    if (ViewName(v) == name) return v;
  }
  throw Error(ErrorCode::kBadConfig, "unknown view '" + std::string(name) + "' (expected bin, cxt or lib)");
}

TrainConfig TrainConfig::FullProfile() {
  TrainConfig c;
  c.hidden_width = 3000;
  return c;
}

void TrainConfig::Validate() const {
  if (hidden_width == 0 || d_common == 0 || batch_size == 0 || epochs == 0) {
    throw Error(ErrorCode::kBadConfig, "hidden_width, d_common, batch_size and epochs must be positive");
  }
  if (!(learning_rate > 0.0) || !(epsilon > 0.0) || beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw Error(ErrorCode::kBadConfig, "invalid optimizer settings");
  }
  if (EnabledCount(views) == 0) throw Error(ErrorCode::kBadConfig, "at least one view must be enabled");
}

FusionModel FusionModel::Init(const std::array<std::size_t, 3>& view_dims, const TrainConfig& config,
                              std::vector<std::string> class_labels) {
  config.Validate();
  if (class_labels.size() < 2) throw Error(ErrorCode::kLabelUnseen, "a model needs at least two classes");
  FusionModel m;
  m.views = config.views;
  m.view_dims = view_dims;
  m.d_common = config.d_common;
  m.raw_counts = config.raw_counts;
  m.class_labels = std::move(class_labels);
  Rng rng(config.seed);
  if (config.encoder && m.views[0]) {
    m.encoder = DenseCnnParams::Init(*config.encoder, rng.Next());
    m.view_dims[0] = config.encoder->EmbeddingDim();
  }
  for (std::size_t vi = 0; vi < 3; ++vi) {
    if (!m.views[vi]) {
      m.view_dims[vi] = 0;
      continue;
    }
    if (m.view_dims[vi] == 0) throw Error(ErrorCode::kDimMismatch, "enabled view has zero dimensions");
    m.projections[vi] = MakeLinear(m.d_common, m.view_dims[vi]);
    GlorotFill(m.projections[vi], rng);
  }
  std::size_t in = EnabledCount(m.views) * m.d_common;
  for (std::size_t i = 0; i < config.hidden_layers; ++i) {
    m.hidden.push_back(MakeLinear(config.hidden_width, in));
    GlorotFill(m.hidden.back(), rng);
    in = config.hidden_width;
  }
  m.output = MakeLinear(m.class_labels.size(), in);
  GlorotFill(m.output, rng);
  return m;
}

FusionModel FusionModel::ZerosLike() const {
  FusionModel z = *this;
  for (auto b : z.Blocks()) std::fill(b.begin(), b.end(), 0.0);
  return z;
}

std::vector<std::span<double>> FusionModel::Blocks() {
  std::vector<std::span<double>> out;
  auto add = [&out](Linear& l) {
    out.emplace_back(l.w.data(), static_cast<std::size_t>(l.w.size()));
    out.emplace_back(l.b.data(), static_cast<std::size_t>(l.b.size()));
  };
  for (std::size_t vi = 0; vi < 3; ++vi) {
    if (views[vi]) add(projections[vi]);
  }
  for (auto& h : hidden) add(h);
  add(output);
  if (encoder) {
    for (auto b : encoder->Blocks()) out.push_back(b);
  }
  return out;
}

std::vector<std::span<const double>> FusionModel::Blocks() const {
  std::vector<std::span<const double>> out;
  for (auto s : const_cast<FusionModel*>(this)->Blocks()) out.emplace_back(s.data(), s.size());
  return out;
}

std::size_t FusionModel::ParameterCount() const {
  std::size_t n = 0;
  for (auto b : Blocks()) n += b.size();
  return n;
}

Eigen::VectorXd LibTransform(std::span<const double> counts, bool raw_counts) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = raw_counts ? counts[i] : std::log1p(counts[i]);
  }
  return out;
}

Eigen::MatrixXd Softmax(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double m = logits.col(c).maxCoeff();
    p.col(c) = (logits.col(c).array() - m).exp().matrix();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

Eigen::MatrixXd PredictBatch(const FusionModel& model, std::span<const FeatureTriple> inputs) {
  if (inputs.empty()) return Eigen::MatrixXd(static_cast<Eigen::Index>(model.num_classes()), 0);
  const auto ptrs = Pointers(inputs);
  Forward fw;
  RunForward(model, ptrs, fw, false);
  return Softmax(fw.logits);
}

Eigen::VectorXd Predict(const FusionModel& model, const FeatureTriple& input) {
  return PredictBatch(model, std::span<const FeatureTriple>(&input, 1)).col(0);
}

std::vector<std::size_t> PredictLabels(const FusionModel& model, std::span<const FeatureTriple> inputs) {
  const Eigen::MatrixXd p = PredictBatch(model, inputs);
  std::vector<std::size_t> out;
  out.reserve(inputs.size());
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    Eigen::Index arg = 0;
    p.col(c).maxCoeff(&arg);
    out.push_back(static_cast<std::size_t>(arg));
  }
  return out;
}

LossAndGrads ComputeLossAndGrads(const FusionModel& model, std::span<const Example> batch) {
  std::vector<const Example*> ptrs;
  ptrs.reserve(batch.size());
  for (const auto& e : batch) ptrs.push_back(&e);
  return LossAndGradsImpl(model, ptrs);
}

TrainResult Train(const TrainConfig& config, std::span<const Example> examples,
                  std::vector<std::string> class_labels, std::string vocab_fingerprint,
                  std::string catalog_fingerprint) {
  config.Validate();
  if (examples.empty()) throw Error(ErrorCode::kEmptyDataset, "no training examples");
  if (class_labels.size() < 2) throw Error(ErrorCode::kLabelUnseen, "training needs at least two classes");
  std::vector<std::size_t> support(class_labels.size(), 0);
  for (const auto& e : examples) {
    if (e.label >= class_labels.size()) throw Error(ErrorCode::kLabelUnseen, "label index out of range");
    ++support[e.label];
  }
  for (std::size_t c = 0; c < support.size(); ++c) {
    if (support[c] == 0) throw Error(ErrorCode::kLabelUnseen, "class '" + class_labels[c] + "' has no training examples");
  }

  std::vector<const Example*> order;
  order.reserve(examples.size());
  for (const auto& e : examples) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const Example* a, const Example* b) {
    return std::tie(a->id, a->label) < std::tie(b->id, b->label);
  });

  const FeatureTriple& first = order.front()->features;
  const std::array<std::size_t, 3> dims{first.bin.size(), first.cxt.size(), first.lib.size()};
  TrainResult result;
  result.model = FusionModel::Init(dims, config, std::move(class_labels));
  FusionModel& model = result.model;
  model.vocab_fingerprint = std::move(vocab_fingerprint);
  model.catalog_fingerprint = std::move(catalog_fingerprint);

  auto params = model.Blocks();
  std::size_t trainable = params.size();
  if (model.encoder && !config.train_encoder) trainable -= model.encoder->Blocks().size();
  std::vector<std::vector<double>> m1(trainable), m2(trainable);
  for (std::size_t k = 0; k < trainable; ++k) {
    m1[k].assign(params[k].size(), 0.0);
    m2[k].assign(params[k].size(), 0.0);
  }

  Rng shuffle_rng(config.seed ^ 0x5DEECE66DULL);
  std::uint64_t step = 0;
  std::vector<const Example*> batch;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<const Example*> perm = order;
    shuffle_rng.Shuffle(std::span<const Example*>(perm));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < perm.size(); start += config.batch_size) {
      const std::size_t end = std::min(perm.size(), start + config.batch_size);
      batch.assign(perm.begin() + static_cast<std::ptrdiff_t>(start), perm.begin() + static_cast<std::ptrdiff_t>(end));
      LossAndGrads lg = LossAndGradsImpl(model, batch);
      loss_sum += lg.loss * static_cast<double>(batch.size());
      correct += lg.correct;

      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto grads = lg.grads.Blocks();
      for (std::size_t k = 0; k < trainable; ++k) {
        double* p = params[k].data();
        const double* g = grads[k].data();
        double* m = m1[k].data();
        double* v = m2[k].data();
        for (std::size_t j = 0; j < params[k].size(); ++j) {
          m[j] = config.beta1 * m[j] + (1.0 - config.beta1) * g[j];
          v[j] = config.beta2 * v[j] + (1.0 - config.beta2) * g[j] * g[j];
          p[j] -= config.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + config.epsilon);
        }
      }
    }
    const double n = static_cast<double>(perm.size());
    result.log.push_back(EpochLog{epoch, loss_sum / n, static_cast<double>(correct) / n});
  }
  return result;
}

void WriteTrainingLog(std::span<const EpochLog> log, std::ostream& out) {
  for (const auto& e : log) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["loss"] = e.loss;
    j["accuracy"] = e.accuracy;
    out << j.dump() << '\n';
  }
}

Bytes SerializeModel(const FusionModel& model) {
  ByteWriter w;
  w.Append(std::string_view(kModelMagic));
  w.U32(kModelFormatVersion);
  w.U8(model.raw_counts ? 1 : 0);
  w.U8(static_cast<std::uint8_t>((model.views[0] ? 1 : 0) | (model.views[1] ? 2 : 0) | (model.views[2] ? 4 : 0)));
  w.U8(model.encoder ? 1 : 0);
  w.U64(model.d_common);
  for (auto d : model.view_dims) w.U64(d);
  w.U64(model.hidden.size());
  w.U64(model.class_labels.size());
  for (std::size_t vi = 0; vi < 3; ++vi) {
    if (model.views[vi]) WriteLinear(w, model.projections[vi]);
  }
  for (const auto& h : model.hidden) WriteLinear(w, h);
  WriteLinear(w, model.output);
  if (model.encoder) {
    const auto& c = model.encoder->config;
    for (auto v : {c.input_side, c.stem_channels, c.blocks, c.layers_per_block, c.growth_rate}) w.U64(v);
    for (auto b : model.encoder->Blocks()) {
      for (double v : b) w.F64(v);
    }
  }
  for (const auto& l : model.class_labels) WriteString(w, l);
  WriteString(w, model.vocab_fingerprint);
  WriteString(w, model.catalog_fingerprint);
  return w.Release();
}

FusionModel DeserializeModel(ByteView data) {
  constexpr std::size_t kMagicLen = sizeof(kModelMagic) - 1;
  if (data.size() < kMagicLen || !std::equal(data.begin(), data.begin() + kMagicLen, kModelMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a BCTXM1 model file");
  }
  ByteReader r(data);
  r.Skip(kMagicLen);
  const std::uint32_t version = r.U32();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kVersionUnsupported, "model format version " + std::to_string(version));
  }
  FusionModel m;
  m.raw_counts = r.U8() != 0;
  const std::uint8_t mask = r.U8();
  m.views = {(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0};
  const bool has_encoder = r.U8() != 0;
  m.d_common = r.U64();
  for (auto& d : m.view_dims) d = r.U64();
  const std::uint64_t hidden = r.U64();
  const std::uint64_t classes = r.U64();
  if (hidden > 1024 || classes > (1u << 20)) throw Error(ErrorCode::kTruncatedSection, "implausible model header");
  for (std::size_t vi = 0; vi < 3; ++vi) {
    if (!m.views[vi]) continue;
    m.projections[vi] = ReadLinear(r);
    if (static_cast<std::size_t>(m.projections[vi].w.rows()) != m.d_common ||
        static_cast<std::size_t>(m.projections[vi].w.cols()) != m.view_dims[vi]) {
      throw Error(ErrorCode::kShapeMismatch, "projection shape disagrees with dimension table");
    }
  }
  for (std::uint64_t i = 0; i < hidden; ++i) m.hidden.push_back(ReadLinear(r));
  m.output = ReadLinear(r);
  if (static_cast<std::uint64_t>(m.output.w.rows()) != classes) {
    throw Error(ErrorCode::kShapeMismatch, "output layer disagrees with class count");
  }
  if (has_encoder) {
    DenseCnnConfig c;
    c.input_side = r.U64();
    c.stem_channels = r.U64();
    c.blocks = r.U64();
    c.layers_per_block = r.U64();
    c.growth_rate = r.U64();
    if (c.input_side > 4096 || c.stem_channels > 4096 || c.blocks > 16 || c.layers_per_block > 64 ||
        c.growth_rate > 4096) {
      throw Error(ErrorCode::kTruncatedSection, "implausible encoder config");
    }
    m.encoder = DenseCnnParams::Init(c, 0);
    for (auto b : m.encoder->Blocks()) {
      for (double& v : b) v = ReadF64(r);
    }
  }
  for (std::uint64_t i = 0; i < classes; ++i) m.class_labels.push_back(ReadString(r));
  m.vocab_fingerprint = ReadString(r);
  m.catalog_fingerprint = ReadString(r);
  return m;
}

void SaveModel(const FusionModel& model, const std::filesystem::path& path) { WriteFile(path, SerializeModel(model)); }

FusionModel LoadModel(const std::filesystem::path& path) { return DeserializeModel(ReadFile(path)); }

void CheckFingerprints(const FusionModel& model, std::string_view vocab_fingerprint,
                       std::string_view catalog_fingerprint, bool allow_mismatch) {
  if (allow_mismatch) return;
  if (model.vocab_fingerprint != vocab_fingerprint) {
    throw Error(ErrorCode::kFingerprintMismatch, "vocabulary fingerprint differs from the one the model was trained with");
  }
  if (model.catalog_fingerprint != catalog_fingerprint) {
    throw Error(ErrorCode::kFingerprintMismatch, "SDK catalog fingerprint differs from the one the model was trained with");
  }
}

}  // namespace bctx
