#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lidc/corpus.hpp"
#include "lidc/sparse.hpp"

namespace lidc {

enum class Loss { kSquaredHinge, kHinge };

std::string to_string(Loss loss);
Loss parse_loss(std::string_view text);

struct TrainConfig {
  double C = 1.0;
  Loss loss = Loss::kSquaredHinge;
  double tol = 1e-4;
  int max_epochs = 1000;
  std::uint64_t shuffle_seed = 0;
  bool fit_bias = true;
  double bias_scale = 1.0;

  // Throws ConfigError unless C > 0, tol > 0, max_epochs >= 1, bias_scale > 0.
  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  // 0.5 |w|^2 + C * sum loss
  double primal = 0.0;
  // Dual objective in maximization form; primal - dual >= 0.
  double dual = 0.0;
  // Largest absolute projected gradient seen during the epoch.
  double violation = 0.0;
};

using EpochObserver = std::function<void(const EpochStats&)>;

struct BinaryResult {
  // Feature weights followed by the bias weight when fit_bias is set.
  std::vector<double> weights;
  int epochs = 0;
  bool converged = false;
  double primal = 0.0;
  double dual = 0.0;
};

/// L2-regularized linear SVM on labels y in {-1,+1}, trained by dual
/// coordinate descent. `dimension` is the number of feature columns; the
/// bias, if any, is an extra column of constant value bias_scale.
BinaryResult train_binary(std::span<const SparseVector> X, std::span<const std::int8_t> y,
                          std::size_t dimension, const TrainConfig& cfg,
                          const EpochObserver& observer = {});

/// Primal objective 0.5|w|^2 + C sum loss(y_i, w.x_i) for an augmented
/// weight vector as returned by train_binary.
double primal_objective(std::span<const SparseVector> X, std::span<const std::int8_t> y,
                        std::span<const double> weights, std::size_t dimension,
                        const TrainConfig& cfg);

/// One-vs-rest model: one weight vector per catalog label.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(LabelCatalog catalog, std::size_t dimension, TrainConfig config,
              std::vector<std::vector<double>> weights);

  const LabelCatalog& catalog() const { return catalog_; }
  std::size_t dimension() const { return dimension_; }
  const TrainConfig& config() const { return config_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }

  std::vector<double> decision_values(const SparseVector& x) const;
  LabelId predict(const SparseVector& x) const;

 private:
  LabelCatalog catalog_;
  std::size_t dimension_ = 0;
  TrainConfig config_;
  std::vector<std::vector<double>> weights_;
};

/// Index of the largest score; ties go to the lowest index.
LabelId argmax_lowest(std::span<const double> scores);

struct MulticlassSummary {
  std::vector<int> epochs;
  std::vector<bool> converged;
};

LinearModel train_multiclass(std::span<const SparseVector> X, std::span<const LabelId> labels,
                             const LabelCatalog& catalog, std::size_t dimension,
                             const TrainConfig& cfg, unsigned threads = 1,
                             MulticlassSummary* summary = nullptr);

}  // namespace lidc
