#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "ufd/dbd.hpp"
#include "ufd/error.hpp"
#include "ufd/fileio.hpp"

namespace ufd {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logit(const LRModel& m, const FeatureArray& z) {
  double s = m.bias;
  for (std::size_t i = 0; i < kNumFeatures; ++i) s += m.weights[i] * z[i];
  return s;
}

std::string fingerprint(std::span<const std::pair<FeatureVector, FrustrationLabel>> data) {
  std::uint64_t h = kFnvOffset;
  char buf[32];
  for (const auto& [x, y] : data) {
    for (double v : x.values) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      h = fnv1a64(buf, h);
    }
    h = fnv1a64(y.is_frustrated() ? "1;" : "0;", h);
  }
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LRModel untrained_model() {
  LRModel m;
  m.feature_stds.fill(1.0);
  return m;
}

FeatureArray standardize(const FeatureVector& x, const LRModel& m) {
  FeatureArray z;
  for (std::size_t i = 0; i < kNumFeatures; ++i) z[i] = (x.values[i] - m.feature_means[i]) / m.feature_stds[i];
  return z;
}

LossGrad lr_loss_grad(const LRModel& model, std::span<const Sample> batch) {
  if (batch.empty()) throw ValidationError("lr_loss_grad: empty batch");
  LossGrad out;
  const double n = static_cast<double>(batch.size());
  for (const auto& [z, label] : batch) {
    const double y = label.is_frustrated() ? 1.0 : 0.0;
    const double s = logit(model, z);
    out.loss += softplus(s) - y * s;
    const double r = sigmoid(s) - y;
    for (std::size_t i = 0; i < kNumFeatures; ++i) out.grad[i] += r * z[i];
    out.grad[kNumFeatures] += r;
  }
  out.loss /= n;
  for (auto& g : out.grad) g /= n;
  const double lambda = model.hyper.lambda;
  double w2 = 0.0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    w2 += model.weights[i] * model.weights[i];
    out.grad[i] += lambda * model.weights[i];
  }
  out.loss += 0.5 * lambda * w2;
  return out;
}

LRModel train_lr(std::span<const std::pair<FeatureVector, FrustrationLabel>> data, const TrainHyper& hyper,
                 std::vector<double>* loss_trace) {
  if (data.empty()) throw ValidationError("train_lr: no training data");
  if (!(hyper.lr > 0.0) || !std::isfinite(hyper.lr)) throw ValidationError("train_lr: learning rate must be > 0");
  if (!(hyper.lambda >= 0.0)) throw ValidationError("train_lr: lambda must be >= 0");
  std::size_t positives = 0;
  for (const auto& s : data) positives += s.second.is_frustrated() ? 1 : 0;
  if (positives == 0 || positives == data.size())
    throw ValidationError("train_lr: training data must contain both classes (got " + std::to_string(positives) +
                          " positive of " + std::to_string(data.size()) + ")");

  LRModel m;
  m.hyper = hyper;
  m.n_train = data.size();
  m.corpus_fingerprint = fingerprint(data);
  const double n = static_cast<double>(data.size());
  for (const auto& [x, y] : data)
    for (std::size_t i = 0; i < kNumFeatures; ++i) m.feature_means[i] += x.values[i];
  for (auto& v : m.feature_means) v /= n;
  for (const auto& [x, y] : data)
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      const double d = x.values[i] - m.feature_means[i];
      m.feature_stds[i] += d * d;
    }
  for (auto& v : m.feature_stds) v = std::max(std::sqrt(v / n), kStdFloor);

  std::vector<Sample> batch;
  batch.reserve(data.size());
  for (const auto& [x, y] : data) batch.emplace_back(standardize(x, m), y);

  if (loss_trace) loss_trace->clear();
  for (std::size_t epoch = 0; epoch <= hyper.epochs; ++epoch) {
    const auto lg = lr_loss_grad(m, batch);
    if (!std::isfinite(lg.loss))
      throw NumericError("train_lr: non-finite loss at epoch " + std::to_string(epoch) + " (lr=" +
                         std::to_string(hyper.lr) + ", lambda=" + std::to_string(hyper.lambda) + ")");
    if (loss_trace) loss_trace->push_back(lg.loss);
    m.final_loss = lg.loss;
    if (epoch == hyper.epochs) break;
    for (std::size_t i = 0; i < kNumFeatures; ++i) m.weights[i] -= hyper.lr * lg.grad[i];
    m.bias -= hyper.lr * lg.grad[kNumFeatures];
  }
  return m;
}

double predict_score(const LRModel& m, const FeatureVector& x) { return sigmoid(logit(m, standardize(x, m))); }

DetectionResult predict_lr(const LRModel& m, const FeatureVector& x, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
  const double score = predict_score(m, x);
  DetectionResult r;
  r.label = score >= threshold ? FrustrationLabel::frustrated() : FrustrationLabel::not_frustrated();
  r.score = score;
  r.detector = "dbd";
  return r;
}

std::string model_to_json(const LRModel& m) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["feature_names"] = kFeatureNames;
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["feature_means"] = m.feature_means;
  j["feature_stds"] = m.feature_stds;
  j["hyper"] = {{"lr", m.hyper.lr}, {"epochs", m.hyper.epochs}, {"lambda", m.hyper.lambda}, {"seed", m.hyper.seed}};
  j["metadata"] = {{"final_loss", m.final_loss},
                   {"corpus_fingerprint", m.corpus_fingerprint},
                   {"embedder", m.embedder},
                   {"n_train", m.n_train}};
  return j.dump(2) + "\n";
}

LRModel model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
  LRModel m;
  try {
    if (j.at("version").get<int>() != 1) throw ValidationError("unsupported model version");
    auto read_array = [&](const char* key, FeatureArray& out) {
      const auto& a = j.at(key);
      if (!a.is_array() || a.size() != kNumFeatures)
        throw ValidationError(std::string("model \"") + key + "\" must have " + std::to_string(kNumFeatures) +
                              " entries");
      for (std::size_t i = 0; i < kNumFeatures; ++i) {
        out[i] = a[i].get<double>();
        if (!std::isfinite(out[i])) throw ValidationError(std::string("model \"") + key + "\" is not finite");
      }
    };
    read_array("weights", m.weights);
    read_array("feature_means", m.feature_means);
    read_array("feature_stds", m.feature_stds);
    m.bias = j.at("bias").get<double>();
    if (!std::isfinite(m.bias)) throw ValidationError("model bias is not finite");
    for (double s : m.feature_stds)
      if (s < kStdFloor) throw ValidationError("model feature_stds must be >= 1e-8");
    if (j.contains("hyper")) {
      const auto& h = j["hyper"];
      m.hyper.lr = h.value("lr", m.hyper.lr);
      m.hyper.epochs = h.value("epochs", m.hyper.epochs);
      m.hyper.lambda = h.value("lambda", m.hyper.lambda);
      m.hyper.seed = h.value("seed", m.hyper.seed);
    }
    if (j.contains("metadata")) {
      const auto& md = j["metadata"];
      m.final_loss = md.value("final_loss", 0.0);
      m.corpus_fingerprint = md.value("corpus_fingerprint", std::string());
      m.embedder = md.value("embedder", std::string());
      m.n_train = md.value("n_train", std::size_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid model file: ") + e.what());
  }
  return m;
}

void save_model(const std::filesystem::path& path, const LRModel& m) { write_file_atomic(path, model_to_json(m)); }

LRModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

DbdDetector::DbdDetector(LRModel model, std::shared_ptr<const EmbeddingProvider> embed, double threshold)
    : model_(std::move(model)), embed_(std::move(embed)), threshold_(threshold) {
  if (!embed_) throw ValidationError("DbdDetector needs an embedding provider");
  if (!(threshold_ > 0.0 && threshold_ < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
}

DetectionResult DbdDetector::detect(const Dialog& d) const {
  auto r = predict_lr(model_, extract_features(d, *embed_), threshold_);
  r.dialog_id = d.id();
  return r;
}

}  // namespace ufd
