#include "ecgemo/svm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "ecgemo/error.hpp"
#include "ecgemo/random.hpp"

namespace ecgemo::svm {
namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kCacheBudget = std::size_t{16} << 20;  // doubles

double squared_distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Lazily computed kernel rows with FIFO eviction once the budget is exceeded.
class KernelRows {
public:
  KernelRows(const std::vector<Vector>& x, double gamma)
      : x_(x), gamma_(gamma), rows_(x.size()), capacity_(std::max<std::size_t>(2, kCacheBudget / std::max<std::size_t>(1, x.size()))) {}

  const std::vector<double>& row(std::size_t i) {
    if (rows_[i].empty()) {
      if (order_.size() >= capacity_) {
        rows_[order_.front()].clear();
        rows_[order_.front()].shrink_to_fit();
        order_.pop_front();
      }
      auto& r = rows_[i];
      r.resize(x_.size());
      for (std::size_t j = 0; j < x_.size(); ++j) r[j] = std::exp(-gamma_ * squared_distance(x_[i], x_[j]));
      order_.push_back(i);
    }
    return rows_[i];
  }

private:
  const std::vector<Vector>& x_;
  double gamma_;
  std::vector<std::vector<double>> rows_;
  std::deque<std::size_t> order_;
  std::size_t capacity_;
};

}  // namespace

void SvmParams::validate() const {
  if (!(c > 0.0)) throw ParameterError("SVM penalty C must be positive");
  if (!(gamma > 0.0)) throw ParameterError("RBF gamma must be positive");
  if (!(tolerance > 0.0)) throw ParameterError("SVM tolerance must be positive");
}

double rbf_kernel(const Vector& x, const Vector& y, double gamma) {
  if (x.size() != y.size()) {
    throw ParameterError("kernel arguments differ in length (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
  if (!(gamma > 0.0)) throw ParameterError("RBF gamma must be positive");
  return std::exp(-gamma * squared_distance(x, y));
}

BinarySvmModel train_binary(const std::vector<Vector>& x, const std::vector<int>& y, const SvmParams& params,
                            std::uint64_t seed) {
  params.validate();
  const std::size_t n = x.size();
  if (n != y.size()) throw ParameterError("sample and label counts differ");
  if (n < 2) throw ParameterError("SVM training needs at least two points");
  bool has_pos = false, has_neg = false;
  for (int label : y) {
    if (label == 1) has_pos = true;
    else if (label == -1) has_neg = true;
    else throw ParameterError("binary SVM labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw ParameterError("binary SVM training needs both classes");
  for (const auto& v : x) {
    if (v.size() != x.front().size()) throw ParameterError("training vectors differ in length");
  }

  const double c = params.c;
  const std::size_t max_iter = params.max_passes > 0 ? params.max_passes : std::max<std::size_t>(10 * n, 100000);

  // scan order decides exact ties in working-set selection
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);

  KernelRows kernel(x, params.gamma);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij
  const std::vector<double> diag(n, 1.0);  // K_ii = 1 for the RBF kernel
  auto yd = [&](std::size_t i) { return static_cast<double>(y[i]); };
  auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0.0); };
  auto in_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < c); };

  BinarySvmModel model;
  model.params = params;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // first index: maximal violator in I_up
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t : order) {
      if (in_up(t) && -yd(t) * grad[t] > gmax) {
        gmax = -yd(t) * grad[t];
        i = t;
      }
    }
    if (i == n) {
      model.converged = true;
      break;
    }
    const auto& ki = kernel.row(i);
    // second index: largest second-order gain among violating partners in I_low
    double gmin = std::numeric_limits<double>::infinity();
    double best_gain = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t : order) {
      if (!in_low(t)) continue;
      const double v = -yd(t) * grad[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b > 0.0) {
        double a = diag[i] + diag[t] - 2.0 * ki[t];
        if (a <= 0.0) a = kTau;
        const double gain = -(b * b) / a;
        if (gain < best_gain) {
          best_gain = gain;
          j = t;
        }
      }
    }
    if (gmax - gmin < params.tolerance || j == n) {
      model.converged = true;
      break;
    }
    const auto& kj = kernel.row(j);
    const double qij = yd(i) * yd(j) * ki[j];
    const double old_ai = alpha[i], old_aj = alpha[j];

    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += yd(t) * (yd(i) * ki[t] * dai + yd(j) * kj[t] * daj);
    }
  }
  model.iterations = iter;

  // bias: average over free multipliers, else the midpoint of the feasible interval
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = yd(t) * grad[t];
    if (alpha[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  model.bias = -rho;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_back(x[t]);
      model.dual_coefs.push_back(alpha[t] * yd(t));
      model.sv_indices.push_back(t);
    }
  }
  return model;
}

double predict_binary(const BinarySvmModel& model, const Vector& x) {
  if (!model.trained()) throw UsageError("predict called on an untrained SVM model");
  if (x.size() != model.dimension()) {
    throw ParameterError("input has " + std::to_string(x.size()) + " features, model expects " +
                         std::to_string(model.dimension()));
  }
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    f += model.dual_coefs[i] * std::exp(-model.params.gamma * squared_distance(model.support_vectors[i], x));
  }
  return f;
}

double dual_objective(const BinarySvmModel& model) {
  double linear = 0.0, quad = 0.0;
  const auto& sv = model.support_vectors;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    linear += std::abs(model.dual_coefs[i]);
    for (std::size_t j = 0; j < sv.size(); ++j) {
      quad += model.dual_coefs[i] * model.dual_coefs[j] * rbf_kernel(sv[i], sv[j], model.params.gamma);
    }
  }
  return linear - 0.5 * quad;
}

std::vector<double> training_alphas(const BinarySvmModel& model, std::size_t n) {
  if (model.sv_indices.size() != model.dual_coefs.size()) {
    throw UsageError("model carries no training indices (loaded from disk?)");
  }
  std::vector<double> alpha(n, 0.0);
  for (std::size_t k = 0; k < model.sv_indices.size(); ++k) {
    if (model.sv_indices[k] >= n) throw ParameterError("support-vector index outside the training set");
    alpha[model.sv_indices[k]] = std::abs(model.dual_coefs[k]);
  }
  return alpha;
}

double max_kkt_violation(const BinarySvmModel& model, const std::vector<Vector>& x, const std::vector<int>& y) {
  const auto alpha = training_alphas(model, x.size());
  const double c = model.params.c;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double margin = static_cast<double>(y[i]) * predict_binary(model, x[i]);
    double r;
    if (alpha[i] <= 0.0) r = 1.0 - margin;
    else if (alpha[i] >= c) r = margin - 1.0;
    else r = std::abs(margin - 1.0);
    worst = std::max(worst, r);
  }
  return worst;
}

MulticlassSvmModel train_multiclass(const std::vector<features::FeatureVector>& train, const SvmParams& params,
                                    std::uint64_t seed) {
  params.validate();
  std::array<std::vector<const features::FeatureVector*>, kNumEmotions> by_class;
  for (const auto& v : train) by_class[static_cast<std::size_t>(code(v.label))].push_back(&v);
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    if (by_class[c].empty()) {
      throw ParameterError("emotion " + std::string(name(static_cast<Emotion>(c))) + " absent from training data");
    }
  }
  MulticlassSvmModel model;
  model.params = params;
  for (std::size_t a = 0; a < kNumEmotions; ++a) {
    for (std::size_t b = a + 1; b < kNumEmotions; ++b) {
      std::vector<Vector> x;
      std::vector<int> y;
      // keep original training order within the pair subset
      for (const auto& v : train) {
        const auto c = static_cast<std::size_t>(code(v.label));
        if (c == a || c == b) {
          x.push_back(v.values);
          y.push_back(c == a ? 1 : -1);
        }
      }
      const auto pair_seed = derive_seed(seed, a * kNumEmotions + b);
      model.pairs.push_back(
          PairModel{static_cast<Emotion>(a), static_cast<Emotion>(b), train_binary(x, y, params, pair_seed)});
    }
  }
  return model;
}

std::array<int, kNumEmotions> votes(const MulticlassSvmModel& model, const Vector& x) {
  if (model.pairs.empty()) throw UsageError("predict called on an untrained multiclass SVM");
  std::array<int, kNumEmotions> counts{};
  for (const auto& p : model.pairs) {
    const double f = predict_binary(p.model, x);
    ++counts[static_cast<std::size_t>(code(f >= 0.0 ? p.positive : p.negative))];
  }
  return counts;
}

Emotion resolve_vote(const std::array<int, kNumEmotions>& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumEmotions; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<Emotion>(best);
}

Emotion predict_multiclass(const MulticlassSvmModel& model, const Vector& x) {
  return resolve_vote(votes(model, x));
}

}  // namespace ecgemo::svm
