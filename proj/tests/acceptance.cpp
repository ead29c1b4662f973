// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ecgemo/config.hpp"
#include "ecgemo/dsp.hpp"
#include "ecgemo/eval.hpp"
#include "ecgemo/features.hpp"
#include "ecgemo/forest.hpp"
#include "ecgemo/knn.hpp"
#include "ecgemo/pipeline.hpp"
#include "ecgemo/pso.hpp"
#include "ecgemo/random.hpp"
#include "ecgemo/svm.hpp"
#include "ecgemo/text.hpp"
#include "test_support.hpp"

using namespace ecgemo;
using features::FeatureVector;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail, double seconds) {
  std::printf("[%s] criterion %d: %s | %s | %.2f s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- 1: DCT

std::vector<double> double_loop_dct(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> y(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double w = k == 1 ? std::sqrt(1.0 / static_cast<double>(n)) : std::sqrt(2.0 / static_cast<double>(n));
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      s += x[i - 1] * std::cos(std::numbers::pi * static_cast<double>((2 * i - 1) * (k - 1)) /
                               (2.0 * static_cast<double>(n)));
    }
    y[k - 1] = w * s;
  }
  return y;
}

void criterion_dct() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  double worst_rel = 0.0, worst_parseval = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    for (int t = 0; t < 100; ++t) {
      std::vector<double> x(n);
      for (double& v : x) v = rng.uniform(-10.0, 10.0);
      const auto y = features::dct(x);
      const auto ref = double_loop_dct(x);
      double scale = 0.0, diff = 0.0, ex = 0.0, ey = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        scale = std::max(scale, std::abs(ref[k]));
        diff = std::max(diff, std::abs(y[k] - ref[k]));
        ex += x[k] * x[k];
        ey += y[k] * y[k];
      }
      worst_rel = std::max(worst_rel, diff / std::max(scale, 1e-300));
      worst_parseval = std::max(worst_parseval, std::abs(ey - ex) / ex);
    }
  }
  const double s = seconds_since(t0);
  report(1, worst_rel <= 1e-9 && worst_parseval <= 1e-9 && s < 5.0, "DCT matches double loop, Parseval",
         "max rel err " + fmt("%.2e", worst_rel) + ", max Parseval rel err " + fmt("%.2e", worst_parseval), s);
}

// ---------------------------------------------------------------- 2: FIR

double dft_gain(const std::vector<double>& taps, double f, double fs) {
  std::complex<double> h = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k) {
    h += taps[k] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(k) / fs);
  }
  return std::abs(h);
}

void criterion_fir() {
  const auto t0 = Clock::now();
  const auto filter = dsp::design_bandpass(3.0, 100.0, 128.0, 257, dsp::WindowKind::Hamming);
  const double stop_db = 20.0 * std::log10(dft_gain(filter.taps, 0.3, 128.0));
  const double pass_db = 20.0 * std::log10(dft_gain(filter.taps, 10.0, 128.0));
  const double s = seconds_since(t0);
  const bool clamped = std::abs(filter.high_cut_hz - 57.6) < 1e-9 && filter.warning.has_value();
  report(2, clamped && filter.taps.size() == 257 && stop_db <= -20.0 && std::abs(pass_db) <= 1.0 && s < 1.0,
         "257-tap Hamming band-pass 3/57.6 Hz at 128 Hz",
         "0.3 Hz " + fmt("%.1f dB", stop_db) + ", 10 Hz " + fmt("%+.4f dB", pass_db) +
             ", high cutoff " + text::format_double(filter.high_cut_hz) + " Hz",
         s);
}

// ---------------------------------------------------------------- 3: SVM

std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> m, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (std::abs(m[piv][c]) < 1e-12) return std::nullopt;
    std::swap(m[c], m[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= m[i][k] * x[k];
    x[i] = s / m[i][i];
  }
  return x;
}

// Exact dual maximum: enumerate every {0, C, free} pattern and solve the free block.
double enumerated_dual(const std::vector<svm::Vector>& x, const std::vector<int>& y, double c, double gamma) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < x[i].size(); ++k) d += (x[i][k] - x[j][k]) * (x[i][k] - x[j][k]);
      q[i][j] = y[i] * y[j] * std::exp(-gamma * d);
    }
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) patterns *= 3;
  double best = -1e300;
  for (std::size_t p = 0; p < patterns; ++p) {
    std::vector<int> status(n);
    for (std::size_t i = 0, code = p; i < n; ++i, code /= 3) status[i] = static_cast<int>(code % 3);
    std::vector<double> a(n, 0.0);
    std::vector<std::size_t> free;
    double fixed_eq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (status[i] == 1) {
        a[i] = c;
        fixed_eq += y[i] * c;
      }
      if (status[i] == 2) free.push_back(i);
    }
    if (free.empty()) {
      if (std::abs(fixed_eq) > 1e-9) continue;
    } else {
      const std::size_t m = free.size();
      std::vector<std::vector<double>> sys(m + 1, std::vector<double>(m + 1, 0.0));
      std::vector<double> rhs(m + 1, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        double fixed = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (status[j] == 1) fixed += q[free[r]][j] * c;
        for (std::size_t s = 0; s < m; ++s) sys[r][s] = q[free[r]][free[s]];
        sys[r][m] = y[free[r]];
        sys[m][r] = y[free[r]];
        rhs[r] = 1.0 - fixed;
      }
      rhs[m] = -fixed_eq;
      const auto sol = solve_linear(sys, rhs);
      if (!sol) continue;
      bool feasible = true;
      for (std::size_t s = 0; s < m; ++s) {
        if ((*sol)[s] < -1e-12 || (*sol)[s] > c + 1e-12) feasible = false;
        a[free[s]] = std::clamp((*sol)[s], 0.0, c);
      }
      if (!feasible) continue;
    }
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      lin += a[i];
      for (std::size_t j = 0; j < n; ++j) quad += a[i] * a[j] * q[i][j];
    }
    best = std::max(best, lin - 0.5 * quad);
  }
  return best;
}

void criterion_svm() {
  const auto t0 = Clock::now();
  double worst_kkt = 0.0, worst_gap = 0.0;
  std::size_t models = 0, oracle_instances = 0;
  auto fit = [&](const std::vector<svm::Vector>& x, const std::vector<int>& y, const svm::SvmParams& p,
                 std::uint64_t seed) {
    auto m = svm::train_binary(x, y, p, seed);
    worst_kkt = std::max(worst_kkt, svm::max_kkt_violation(m, x, y));
    ++models;
    return m;
  };

  // (b) small instances against the enumeration oracle
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
    std::vector<svm::Vector> x(n, svm::Vector(2));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (double& v : x[i]) v = rng.uniform(-1.5, 1.5);
      y[i] = i == 0 ? 1 : i == 1 ? -1 : (rng.uniform() < 0.5 ? 1 : -1);
    }
    const double c = trial % 3 == 0 ? 0.3 : trial % 3 == 1 ? 3.0 : 100.0;
    const double gamma = rng.uniform(0.1, 3.0);
    const auto m = fit(x, y, {c, gamma}, static_cast<std::uint64_t>(trial));
    worst_gap = std::max(worst_gap, std::abs(svm::dual_objective(m) - enumerated_dual(x, y, c, gamma)));
    ++oracle_instances;
  }

  // (c) XOR
  const std::vector<svm::Vector> xor_x{{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
  const std::vector<int> xor_y{-1, -1, 1, 1};
  const auto xor_model = fit(xor_x, xor_y, {10.0, 1.0}, 1);
  std::size_t xor_hits = 0;
  for (std::size_t i = 0; i < 4; ++i) xor_hits += svm::predict_binary(xor_model, xor_x[i]) * xor_y[i] > 0.0;

  // larger separable and overlapping pairwise problems
  for (double sigma : {0.1, 0.4}) {
    const auto blobs = ecgemo::testing::blobs(100, sigma, 5);
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        std::vector<svm::Vector> x;
        std::vector<int> y;
        for (const auto& v : blobs) {
          if (code(v.label) == a || code(v.label) == b) {
            x.push_back(v.values);
            y.push_back(code(v.label) == a ? 1 : -1);
          }
        }
        fit(x, y, {10.0, 2.0}, static_cast<std::uint64_t>(a * 4 + b));
      }
    }
  }
  const double s = seconds_since(t0);
  report(3, worst_kkt <= 1e-3 && worst_gap <= 1e-4 && xor_hits == 4 && s < 10.0,
         "SVM KKT, dual oracle, XOR",
         std::to_string(models) + " models max KKT " + fmt("%.2e", worst_kkt) + ", " +
             std::to_string(oracle_instances) + " oracle instances max gap " + fmt("%.2e", worst_gap) +
             ", XOR " + std::to_string(xor_hits) + "/4",
         s);
}

// ---------------------------------------------------------------- 4: PSO

void criterion_pso() {
  const auto t0 = Clock::now();
  const pso::Position star{1.3, -2.1};
  const pso::Fitness sphere = [&](const pso::Position& p) {
    return -((p[0] - star[0]) * (p[0] - star[0]) + (p[1] - star[1]) * (p[1] - star[1]));
  };
  bool monotone = true;
  auto check_history = [&](const pso::PsoResult& r) {
    for (std::size_t i = 1; i < r.history.size(); ++i) monotone = monotone && r.history[i] >= r.history[i - 1];
  };

  pso::PsoConfig cfg;
  cfg.swarm_size = 20;
  cfg.iterations = 100;
  cfg.inertia = 0.729;
  cfg.c1 = cfg.c2 = 1.49445;
  cfg.seed = 7;
  const auto r = pso::optimize(sphere, cfg);
  check_history(r);
  const double dist = std::hypot(r.best_position[0] - star[0], r.best_position[1] - star[1]);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    pso::PsoConfig plain;  // verbatim update, inertia 1
    plain.iterations = 100;
    plain.seed = seed;
    check_history(pso::optimize(sphere, plain));
    cfg.seed = seed;
    check_history(pso::optimize(sphere, cfg));
  }
  const double s = seconds_since(t0);
  report(4, dist < 1e-2 && monotone && s < 5.0, "PSO negated sphere, 20 particles x 100 iterations",
         "final distance " + fmt("%.2e", dist) + ", global best non-decreasing on 41 runs: " +
             (monotone ? "yes" : "no"),
         s);
}

// ---------------------------------------------------------------- 5: forest and K-NN

void criterion_forest_knn() {
  const auto t0 = Clock::now();
  const auto train = ecgemo::testing::blobs(100, 0.1, 1);
  const auto test = ecgemo::testing::blobs(100, 0.1, 2);
  const auto model = forest::train_forest(train, {.num_trees = 90}, 11);
  const double forest_acc =
      ecgemo::testing::accuracy_of(test, [&](const auto& x) { return forest::predict_forest(model, x); });
  const knn::KnnModel knn_model(train, 3, knn::Metric::euclidean());
  const double knn_acc = ecgemo::testing::accuracy_of(test, [&](const auto& x) { return knn_model.predict(x); });

  std::size_t negative = 0;
  for (const auto& v : test) {
    const auto votes = forest::vote_counts(model, v.values);
    const int truth = votes[static_cast<std::size_t>(code(v.label))];
    int other = 0;
    for (std::size_t k = 0; k < votes.size(); ++k)
      if (k != static_cast<std::size_t>(code(v.label))) other = std::max(other, votes[k]);
    negative += truth < other;
  }
  const double ge = forest::generalization_error(model, test);
  const bool ge_exact = ge == static_cast<double>(negative) / static_cast<double>(test.size());
  const double s = seconds_since(t0);
  report(5, forest_acc >= 0.97 && knn_acc >= 0.97 && ge_exact && forest_acc >= 1.0 - ge && s < 30.0,
         "forest (90 trees) and K-NN (k=3) on four blobs",
         "forest " + text::format_percent(forest_acc) + ", knn " + text::format_percent(knn_acc) + ", GE " +
             text::format_double(ge) + (ge_exact ? " (= negative-margin fraction)" : " (MISMATCH)"),
         s);
}

// ---------------------------------------------------------------- 6 and 8: end to end

PipelineConfig end_to_end_config() {
  PipelineConfig c;  // default profiles, 128 Hz, 300 s, 5 subjects, 4000/1200, 75 features, 10 runs
  c.classifier = ClassifierKind::Svm;
  c.svm_tune = true;
  c.pso.swarm_size = 10;
  c.pso.iterations = 8;
  c.pso.cv_folds = 3;
  c.pso.max_samples = 800;
  return c;
}

std::string full_run_report(const PipelineConfig& config, eval::RecognitionReport* out = nullptr) {
  const auto records = pipeline::preprocess(config, pipeline::synthesize(config));
  const auto pool = pipeline::feature_pool(config, records, config.feature_count);
  auto rep = pipeline::evaluate_repeated(config, ClassifierKind::Svm, pool);
  const auto csv = eval::report_csv(rep) + eval::runs_csv(rep);
  if (out) *out = std::move(rep);
  return csv;
}

std::string first_report;

void criterion_end_to_end() {
  const auto t0 = Clock::now();
  const auto config = end_to_end_config();
  eval::RecognitionReport rep;
  first_report = full_run_report(config, &rep);
  const double s = seconds_since(t0);
  double lowest_avg = 1.0;
  std::string rates;
  for (Emotion e : kAllEmotions) {
    const double r = rep.per_emotion[static_cast<std::size_t>(code(e))].average;
    lowest_avg = std::min(lowest_avg, r);
    rates += std::string(rates.empty() ? "" : " ") + std::string(name(e)) + " " + text::format_percent(r);
  }
  long tested = rep.runs.front().total();
  report(6, rep.overall_average >= 0.85 && lowest_avg >= 0.70 && rep.runs.size() == 10 && tested == 1200 && s < 600.0,
         "PSO-SVM end to end, 16+4 records, 4000/1200, 75 features, 10 runs",
         "overall " + text::format_percent(rep.overall_average) + "; " + rates, s);
}

void criterion_reproducible() {
  const auto t0 = Clock::now();
  const auto second = full_run_report(end_to_end_config());
  const double s = seconds_since(t0);
  report(8, !first_report.empty() && second == first_report, "same master seed gives byte-identical report CSVs",
         std::to_string(first_report.size()) + " bytes compared", s);
}

// ---------------------------------------------------------------- 7: sweeps

void criterion_sweeps() {
  const auto t0 = Clock::now();
  PipelineConfig config;
  config.runs = 2;
  config.classifier = ClassifierKind::Svm;
  config.svm_tune = false;
  config.svm.c = 100.0;
  config.svm.gamma = 0.01;
  const auto records = pipeline::preprocess(config, pipeline::synthesize(config));
  const auto pool = pipeline::feature_pool(config, records, config.feature_count);

  const auto features_a = eval::curve_csv(pipeline::sweep_features(config, records));
  const auto trees_a = pipeline::sweep_trees(config, pool);
  const auto k_a = pipeline::sweep_k(config, pool);
  const auto features_b = eval::curve_csv(pipeline::sweep_features(config, records));
  const auto trees_b = pipeline::sweep_trees(config, pool);
  const auto k_b = pipeline::sweep_k(config, pool);
  const auto cycle = pipeline::sweep_trees(config, pool, {10, 90});

  auto points = [](const std::string& csv) { return std::count(csv.begin(), csv.end(), '\n') - 1; };
  const long nf = points(features_a), nt = points(eval::curve_csv(trees_a)), nk = points(eval::curve_csv(k_a));
  const bool deterministic = features_a == features_b && eval::curve_csv(trees_a) == eval::curve_csv(trees_b) &&
                             eval::curve_csv(k_a) == eval::curve_csv(k_b);
  const double ge10 = *cycle.points[0].extra, ge90 = *cycle.points[1].extra;
  const double s = seconds_since(t0);
  report(7, nf == 13 && nt == 8 && nk == 10 && deterministic && ge90 <= ge10, "feature, tree and k sweeps",
         std::to_string(nf) + "/" + std::to_string(nt) + "/" + std::to_string(nk) + " points, deterministic: " +
             (deterministic ? "yes" : "no") + ", GE at 10 trees " + text::format_double(ge10) + ", at 90 trees " +
             text::format_double(ge90),
         s);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_dct,         criterion_fir,   criterion_svm,
                                                    criterion_pso,         criterion_forest_knn,
                                                    criterion_end_to_end,  criterion_sweeps, criterion_reproducible};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion raised: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
