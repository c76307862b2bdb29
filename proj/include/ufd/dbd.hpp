#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ufd/detection.hpp"
#include "ufd/embeddings.hpp"

namespace ufd {

inline constexpr std::size_t kNumFeatures = 10;

// Dialog-breakdown features over the pairs (s_t, u_t) of a dialog.
enum class Feature : std::size_t {
  kSemParaphraseUser = 0,   // mean cos(u_{t-1}, u_t)
  kSemRepetitionSystem,     // mean cos(s_{t-1}, s_t)
  kSemCoherence,            // mean cos(s_{t-1}, u_t)
  kSynParaphraseUser,       // mean jaccard(u_{t-1}, u_t)
  kSynRepetitionSystem,     // mean jaccard(s_{t-1}, s_t)
  kSynCoherence,            // mean jaccard(s_{t-1}, u_t)
  kLenUser,                 // mean chars of u_t
  kLenSystem,               // mean chars of s_t
  kLenDialog,               // total chars in all pairs
  kNumTurns,                // number of pairs
};

inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "sem_paraphrase_user", "sem_repetition_system", "sem_coherence",
    "syn_paraphrase_user", "syn_repetition_system", "syn_coherence",
    "len_user",            "len_system",            "len_dialog",
    "n_turns",
};

using FeatureArray = std::array<double, kNumFeatures>;

struct FeatureVector {
  FeatureArray values{};

  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
};

// With a single pair the six pairwise features are 0. A trailing system turn
// with no user reply is not part of any pair and is ignored.
FeatureVector extract_features(const Dialog& d, const EmbeddingProvider& embed);

std::vector<FeatureVector> extract_features_batch(std::span<const Dialog> corpus,
                                                  const EmbeddingProvider& embed, std::size_t jobs);

struct TrainHyper {
  double lr = 0.1;
  std::size_t epochs = 500;
  double lambda = 1e-3;
  std::uint64_t seed = 0;
};

inline constexpr double kStdFloor = 1e-8;

struct LRModel {
  FeatureArray weights{};
  double bias = 0.0;
  FeatureArray feature_means{};
  FeatureArray feature_stds{};
  TrainHyper hyper{};
  // metadata
  double final_loss = 0.0;
  std::string corpus_fingerprint;
  std::string embedder;
  std::size_t n_train = 0;
};

// Zero weights, zero means, unit stds.
LRModel untrained_model();

FeatureArray standardize(const FeatureVector& x, const LRModel& m);

using Sample = std::pair<FeatureArray, FrustrationLabel>;

struct LossGrad {
  double loss = 0.0;
  std::array<double, kNumFeatures + 1> grad{};  // weights then bias
};

// Mean binary cross-entropy of sigmoid(w.z + b) plus lambda/2 |w|^2 (bias
// unpenalized), on already-standardized inputs.
LossGrad lr_loss_grad(const LRModel& model, std::span<const Sample> batch);

// Fits means/stds, standardizes and runs full-batch gradient descent from
// zero. Every epoch's loss is reported through `loss_trace` when non-null.
// Throws ValidationError for single-class data and NumericError when the
// loss becomes non-finite.
LRModel train_lr(std::span<const std::pair<FeatureVector, FrustrationLabel>> data, const TrainHyper& hyper,
                 std::vector<double>* loss_trace = nullptr);

double sigmoid(double z);
double predict_score(const LRModel& m, const FeatureVector& x);
// Label 1 iff score >= threshold.
DetectionResult predict_lr(const LRModel& m, const FeatureVector& x, double threshold = 0.5);

std::string model_to_json(const LRModel& m);
LRModel model_from_json(std::string_view text);
void save_model(const std::filesystem::path& path, const LRModel& m);
LRModel load_model(const std::filesystem::path& path);

class DbdDetector final : public Detector {
 public:
  DbdDetector(LRModel model, std::shared_ptr<const EmbeddingProvider> embed, double threshold = 0.5);
  DetectionResult detect(const Dialog& d) const override;
  std::string name() const override { return "dbd"; }

 private:
  LRModel model_;
  std::shared_ptr<const EmbeddingProvider> embed_;
  double threshold_;
};

}  // namespace ufd
