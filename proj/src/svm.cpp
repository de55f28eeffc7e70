#include "lidc/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "lidc/error.hpp"
#include "lidc/log.hpp"
#include "lidc/parallel.hpp"

namespace lidc {

std::string to_string(Loss loss) {
  return loss == Loss::kHinge ? "hinge" : "squared_hinge";
}

Loss parse_loss(std::string_view text) {
  if (text == "squared_hinge") return Loss::kSquaredHinge;
  if (text == "hinge") return Loss::kHinge;
  throw ConfigError("unknown loss '" + std::string(text) + "' (expected squared_hinge or hinge)");
}

void TrainConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("C must be a positive finite number");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (fit_bias && !(bias_scale > 0.0)) throw ConfigError("bias_scale must be positive");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double margin_score(const SparseVector& x, std::span<const double> w, std::size_t dimension,
                    const TrainConfig& cfg) {
  double s = x.dot(w);
  if (cfg.fit_bias) s += w[dimension] * cfg.bias_scale;
  return s;
}

double loss_value(Loss loss, double margin) {
  const double slack = std::max(0.0, 1.0 - margin);
  return loss == Loss::kHinge ? slack : slack * slack;
}

void check_inputs(std::span<const SparseVector> X, std::span<const std::int8_t> y,
                  std::size_t dimension) {
  if (X.size() != y.size()) {
    throw DataError("dimension mismatch: " + std::to_string(X.size()) + " vectors, " +
                    std::to_string(y.size()) + " labels");
  }
  if (X.empty()) throw DataError("cannot train on zero examples");
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto& x = X[i];
    if (x.indices.size() != x.values.size()) {
      throw DataError("example " + std::to_string(i) + ": index/value length mismatch");
    }
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (x.indices[k] >= dimension) {
        throw DataError("example " + std::to_string(i) + ": feature index " +
                        std::to_string(x.indices[k]) + " >= dimension " +
                        std::to_string(dimension));
      }
      if (!std::isfinite(x.values[k])) {
        throw DataError("example " + std::to_string(i) + ": non-finite feature value");
      }
    }
    if (y[i] != 1 && y[i] != -1) {
      throw DataError("example " + std::to_string(i) + ": label must be -1 or +1");
    }
  }
}

}  // namespace

double primal_objective(std::span<const SparseVector> X, std::span<const std::int8_t> y,
                        std::span<const double> weights, std::size_t dimension,
                        const TrainConfig& cfg) {
  double reg = 0.0;
  for (double v : weights) reg += v * v;
  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    loss += loss_value(cfg.loss, y[i] * margin_score(X[i], weights, dimension, cfg));
  }
  return 0.5 * reg + cfg.C * loss;
}

// Coordinate descent on the dual
//
//   min_a  0.5 a^T (Q + D) a - e^T a,   0 <= a_i <= U,
//
// with Q_ij = y_i y_j x_i.x_j. Hinge loss: D = 0, U = C. Squared hinge:
// D = I/(2C), U = inf. w = sum_i a_i y_i x_i is kept in sync after every
// coordinate step. Inactive bound-constrained coordinates are shrunk out of
// the sweep and the full set is re-checked before declaring convergence.
BinaryResult train_binary(std::span<const SparseVector> X, std::span<const std::int8_t> y,
                          std::size_t dimension, const TrainConfig& cfg,
                          const EpochObserver& observer) {
  cfg.validate();
  check_inputs(X, y, dimension);

  const std::size_t n = X.size();
  const std::size_t w_size = dimension + (cfg.fit_bias ? 1 : 0);
  const double diag = cfg.loss == Loss::kHinge ? 0.0 : 0.5 / cfg.C;
  const double upper = cfg.loss == Loss::kHinge ? cfg.C : kInf;
  const double bias2 = cfg.fit_bias ? cfg.bias_scale * cfg.bias_scale : 0.0;

  BinaryResult result;
  std::vector<double>& w = result.weights;
  w.assign(w_size, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qd(n);
  std::vector<std::size_t> index(n);
  for (std::size_t i = 0; i < n; ++i) {
    qd[i] = diag + X[i].squared_norm() + bias2;
    index[i] = i;
  }

  auto dual_value = [&] {
    double ww = 0.0;
    for (double v : w) ww += v * v;
    double s = 0.0;
    for (double a : alpha) s += a - 0.5 * diag * a * a;
    return s - 0.5 * ww;
  };

  std::mt19937_64 rng(cfg.shuffle_seed);
  std::size_t active = n;
  double pg_max_old = kInf;
  double pg_min_old = -kInf;
  int epoch = 0;

  while (epoch < cfg.max_epochs) {
    double pg_max = -kInf;
    double pg_min = kInf;

    for (std::size_t i = 0; i + 1 < active; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (active - i));
      std::swap(index[i], index[j]);
    }

    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = index[s];
      const double yi = y[i];
      const double g = yi * margin_score(X[i], w, dimension, cfg) - 1.0 + diag * alpha[i];

      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == upper) {
        if (g < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }

      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::fabs(pg) > 1e-12) {
        const double old = alpha[i];
        // qd == 0 only for an all-zero example under hinge loss without bias:
        // the coordinate objective is linear and its minimum sits on a bound.
        alpha[i] = qd[i] > 0.0 ? std::min(std::max(old - g / qd[i], 0.0), upper)
                               : (g < 0.0 ? upper : 0.0);
        const double delta = (alpha[i] - old) * yi;
        X[i].axpy(delta, std::span<double>(w.data(), dimension));
        if (cfg.fit_bias) w[dimension] += delta * cfg.bias_scale;
      }
    }
    ++epoch;

    if (active == 0) {
      pg_max = 0.0;
      pg_min = 0.0;
    }
    const double violation = std::max(pg_max, -pg_min);
    if (observer) {
      observer({epoch, primal_objective(X, y, w, dimension, cfg), dual_value(), violation});
    }

    if (violation <= cfg.tol) {
      if (active == n) {
        result.converged = true;
        break;
      }
      active = n;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? kInf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -kInf : pg_min;
  }

  result.epochs = epoch;
  result.primal = primal_objective(X, y, w, dimension, cfg);
  result.dual = dual_value();
  if (!result.converged) {
    std::ostringstream msg;
    msg << "dual coordinate descent reached max_epochs=" << cfg.max_epochs
        << " without meeting tol=" << cfg.tol << " (C=" << cfg.C << ")";
    log::warn(msg.str());
  }
  return result;
}

// ---------------------------------------------------------------- LinearModel

LinearModel::LinearModel(LabelCatalog catalog, std::size_t dimension, TrainConfig config,
                         std::vector<std::vector<double>> weights)
    : catalog_(std::move(catalog)),
      dimension_(dimension),
      config_(config),
      weights_(std::move(weights)) {
  if (weights_.size() != catalog_.size()) {
    throw ModelError("linear model has " + std::to_string(weights_.size()) +
                     " weight vectors for " + std::to_string(catalog_.size()) + " labels");
  }
  const std::size_t expected = dimension_ + (config_.fit_bias ? 1 : 0);
  for (const auto& w : weights_) {
    if (w.size() != expected) {
      throw ModelError("weight vector length " + std::to_string(w.size()) + ", expected " +
                       std::to_string(expected));
    }
    if (!std::all_of(w.begin(), w.end(), [](double v) { return std::isfinite(v); })) {
      throw ModelError("non-finite weight in linear model");
    }
  }
}

std::vector<double> LinearModel::decision_values(const SparseVector& x) const {
  for (FeatureIndex idx : x.indices) {
    if (idx >= dimension_) {
      throw DataError("feature index " + std::to_string(idx) + " outside model dimension " +
                      std::to_string(dimension_));
    }
  }
  std::vector<double> scores;
  scores.reserve(weights_.size());
  for (const auto& w : weights_) scores.push_back(margin_score(x, w, dimension_, config_));
  return scores;
}

LabelId LinearModel::predict(const SparseVector& x) const {
  return argmax_lowest(decision_values(x));
}

LabelId argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw DataError("argmax of an empty score list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<LabelId>(best);
}

LinearModel train_multiclass(std::span<const SparseVector> X, std::span<const LabelId> labels,
                             const LabelCatalog& catalog, std::size_t dimension,
                             const TrainConfig& cfg, unsigned threads,
                             MulticlassSummary* summary) {
  cfg.validate();
  if (catalog.size() < 2) {
    throw ConfigError("one-vs-rest training needs at least 2 labels, catalog has " +
                      std::to_string(catalog.size()));
  }
  if (X.size() != labels.size()) {
    throw DataError("dimension mismatch: " + std::to_string(X.size()) + " vectors, " +
                    std::to_string(labels.size()) + " labels");
  }
  for (LabelId l : labels) {
    if (l >= catalog.size()) throw DataError("label id outside catalog");
  }

  const std::size_t L = catalog.size();
  std::vector<std::vector<double>> weights(L);
  std::vector<int> epochs(L, 0);
  std::vector<char> converged(L, 0);
  parallel_for(L, threads, [&](std::size_t label) {
    std::vector<std::int8_t> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == label ? 1 : -1;
    BinaryResult r = train_binary(X, y, dimension, cfg);
    weights[label] = std::move(r.weights);
    epochs[label] = r.epochs;
    converged[label] = r.converged;
  });

  if (summary) {
    summary->epochs = epochs;
    summary->converged.assign(converged.begin(), converged.end());
  }
  return LinearModel(catalog, dimension, cfg, std::move(weights));
}

}  // namespace lidc
