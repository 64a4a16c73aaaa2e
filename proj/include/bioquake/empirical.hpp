#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bioquake/core.hpp"

namespace bioquake {

/// Genuine and impostor comparison scores. With `higher_is_genuine` a score
/// at or above the threshold is a match; otherwise at or below.
struct ScoreSet {
  Eigen::ArrayXd genuine;
  Eigen::ArrayXd impostor;
  bool higher_is_genuine = true;

  void validate() const;
};

/// Newline-delimited decimal scores; blank lines and '#' comments skipped.
Eigen::ArrayXd load_score_file(const std::string& path);
ScoreSet load_scores(const std::string& genuine_path, const std::string& impostor_path);
void write_score_file(const std::string& path, const Eigen::ArrayXd& scores);

struct SynthConfig {
  Count subjects = 50;
  Count samples_per_subject = 20;
  /// Overrides samples_per_subject when non-empty (one entry per subject).
  std::vector<Count> samples;
  double genuine_mean = 1.0;
  double genuine_std = 0.15;
  double impostor_mean = 0.0;
  double impostor_std = 0.15;
  /// Per-subject mean offset; 0 gives iid scores.
  double subject_effect_std = 0.0;
  std::uint64_t seed = 0;
  /// Per comparison type. Above it, `sample_pairs` draws that many pairs at
  /// random instead of enumerating.
  Count pair_cap = 5'000'000;
  bool sample_pairs = false;

  void validate() const;
  [[nodiscard]] std::vector<Count> sample_counts() const;
};

ScoreSet synthesize_scores(const SynthConfig& cfg);

struct ErrorRates {
  double fmr = 0.0;
  double fnmr = 0.0;
};

ErrorRates error_rates(const ScoreSet& scores, double threshold);

struct OperatingPoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;
  double eer = 0.0;  // (fmr + fnmr) / 2
};

/// Candidate thresholds are midpoints between adjacent distinct scores of the
/// union; the smallest |fmr - fnmr| wins, ties go to the lower threshold.
OperatingPoint eer_threshold(const ScoreSet& scores);

/// Threshold with the lowest FNMR among those with FMR <= target.
OperatingPoint threshold_at_fmr(const ScoreSet& scores, double target_fmr);

/// `points` thresholds evenly spaced between the impostor and genuine medians.
std::vector<double> threshold_grid(const ScoreSet& scores, int points);

enum class Metric { fmr, fnmr };
std::string_view to_string(Metric m);

struct SubsampleConfig {
  std::vector<double> fracs{0.1, 0.01, 0.001};
  Count repetitions = 10;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  /// Divide the empirical margin by sqrt(repetitions) (SEM reading).
  bool divide_by_sqrt_reps = false;

  void validate() const;
};

struct SubsampleResult {
  double frac = 0.0;
  Metric metric = Metric::fmr;
  double threshold = 0.0;
  Count subsample_size = 0;
  std::vector<double> values;  // one rate per repetition
  double mean_rate = 0.0;
  double empirical_margin = 0.0;
  double theoretical_margin = 0.0;
};

/// One result per (frac, metric), ordered by frac then FMR before FNMR.
std::vector<SubsampleResult> subsample_experiment(const ScoreSet& scores, double threshold,
                                                  const SubsampleConfig& cfg);

/// The same experiment over several thresholds. Subsamples are drawn once per
/// (frac, metric, repetition) and reused across thresholds, so each threshold's
/// block equals subsample_experiment at that threshold.
std::vector<SubsampleResult> sweep(const ScoreSet& scores, const std::vector<double>& thresholds,
                                   const SubsampleConfig& cfg);

template <class DerivedX, class DerivedY>
double pearson(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y) {
  if (x.size() != y.size()) throw DomainError("correlation needs equal-length inputs");
  if (x.size() < 3) throw DomainError("correlation needs at least 3 pairs");
  const Eigen::ArrayXd xc = x.derived().template cast<double>().array() - x.derived().template cast<double>().mean();
  const Eigen::ArrayXd yc = y.derived().template cast<double>().array() - y.derived().template cast<double>().mean();
  const double sxx = (xc * xc).sum();
  const double syy = (yc * yc).sum();
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DomainError("correlation undefined: zero variance");
  return std::clamp((xc * yc).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Pearson r over (empirical, theoretical) pairs.
double correlation(const std::vector<std::pair<double, double>>& pairs);

struct CoverageResult {
  Count comparisons = 0;
  double p_true = 0.0;
  double alpha = 0.05;
  Count trials = 0;
  Count covered = 0;
  double coverage = 0.0;
};

/// Draws n ~ Binomial(N, p_true) per trial and counts how often
/// [n/N - delta_abs, n/N + delta_abs] contains p_true.
CoverageResult coverage_experiment(Count comparisons, double p_true, double alpha, Count trials,
                                   std::uint64_t seed);

}  // namespace bioquake
