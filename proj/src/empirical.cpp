#include "bioquake/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "bioquake/random.hpp"
#include "bioquake/special.hpp"
#include "bioquake/table_io.hpp"

namespace bioquake {

namespace {

std::vector<double> sorted_copy(const Eigen::ArrayXd& a) {
  std::vector<double> v(a.data(), a.data() + a.size());
  std::sort(v.begin(), v.end());
  return v;
}

// Rates from sorted score lists by binary search.
class SortedScores {
 public:
  explicit SortedScores(const ScoreSet& s)
      : genuine_(sorted_copy(s.genuine)), impostor_(sorted_copy(s.impostor)), higher_(s.higher_is_genuine) {}

  ErrorRates at(double t) const {
    return {match_fraction(impostor_, t), 1.0 - match_fraction(genuine_, t)};
  }

  std::vector<double> candidates() const {
    std::vector<double> all;
    all.reserve(genuine_.size() + impostor_.size());
    std::merge(genuine_.begin(), genuine_.end(), impostor_.begin(), impostor_.end(), std::back_inserter(all));
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() == 1) return all;
    std::vector<double> mids(all.size() - 1);
    for (std::size_t i = 0; i + 1 < all.size(); ++i) mids[i] = all[i] + (all[i + 1] - all[i]) / 2.0;
    return mids;
  }

  const std::vector<double>& genuine() const { return genuine_; }
  const std::vector<double>& impostor() const { return impostor_; }

 private:
  double match_fraction(const std::vector<double>& v, double t) const {
    const auto n = static_cast<double>(v.size());
    if (higher_) return static_cast<double>(v.end() - std::lower_bound(v.begin(), v.end(), t)) / n;
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), t) - v.begin()) / n;
  }

  std::vector<double> genuine_;
  std::vector<double> impostor_;
  bool higher_;
};

double median(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

// Error count among `scores` (sorted ascending) at threshold t.
Count errors_at(const std::vector<double>& sorted, double t, Metric m, bool higher) {
  const auto n = static_cast<Count>(sorted.size());
  Count matches = 0;
  if (higher) {
    matches = n - (std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
  } else {
    matches = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
  }
  return m == Metric::fmr ? matches : n - matches;
}

}  // namespace

void ScoreSet::validate() const {
  if (genuine.size() == 0) throw DomainError("no genuine scores");
  if (impostor.size() == 0) throw DomainError("no impostor scores");
  if (!genuine.isFinite().all() || !impostor.isFinite().all()) throw DomainError("scores must be finite");
}

Eigen::ArrayXd load_score_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open score file '{}'", path), 0, path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string_view text(line.data() + first, last - first + 1);
    double v = 0.0;
    try {
      v = parse_real(text);
    } catch (const ParseError&) {
      throw ParseError(fmt::format("{}: line {}: '{}' is not a number", path, line_no, text), line_no, path);
    }
    if (!std::isfinite(v)) {
      throw ParseError(fmt::format("{}: line {}: score must be finite", path, line_no), line_no, path);
    }
    values.push_back(v);
  }
  if (values.empty()) throw ParseError(fmt::format("{}: no scores", path), 0, path);
  return Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

ScoreSet load_scores(const std::string& genuine_path, const std::string& impostor_path) {
  ScoreSet s{load_score_file(genuine_path), load_score_file(impostor_path), true};
  s.validate();
  return s;
}

void write_score_file(const std::string& path, const Eigen::ArrayXd& scores) {
  std::ofstream out(path);
  if (!out) throw DomainError(fmt::format("cannot write '{}'", path));
  std::string buf;
  for (const double v : scores) {
    buf += format_real(v);
    buf += '\n';
  }
  out << buf;
  if (!out) throw DomainError(fmt::format("write to '{}' failed", path));
}

void SynthConfig::validate() const {
  if (!(genuine_std > 0.0) || !(impostor_std > 0.0)) throw DomainError("score stds must be positive");
  if (!(genuine_mean > impostor_mean)) throw DomainError("genuine mean must exceed impostor mean");
  if (!(subject_effect_std >= 0.0)) throw DomainError("subject effect std must be non-negative");
  if (pair_cap < 1) throw DomainError("pair cap must be at least 1");
  const auto counts = sample_counts();
  if (counts.size() < 2) throw DomainError("need at least 2 subjects");
  for (const Count c : counts) {
    if (c < 1) throw DomainError("every subject needs at least one sample");
  }
}

std::vector<Count> SynthConfig::sample_counts() const {
  if (!samples.empty()) return samples;
  if (subjects < 0) return {};
  return std::vector<Count>(static_cast<std::size_t>(subjects), samples_per_subject);
}

ScoreSet synthesize_scores(const SynthConfig& cfg) {
  cfg.validate();
  const auto counts = cfg.sample_counts();
  const std::size_t k = counts.size();

  Count genuine_pairs = 0;
  Count total = 0;
  for (const Count c : counts) {
    genuine_pairs += c * (c - 1) / 2;
    total += c;
  }
  const Count impostor_pairs = total * (total - 1) / 2 - genuine_pairs;
  if (genuine_pairs == 0) throw DomainError("configuration yields 0 genuine pairs");
  if (!cfg.sample_pairs && (genuine_pairs > cfg.pair_cap || impostor_pairs > cfg.pair_cap)) {
    throw DomainError(fmt::format("{} genuine / {} impostor pairs exceed the pair cap {}; enable sampling",
                                  genuine_pairs, impostor_pairs, cfg.pair_cap));
  }

  Rng offsets_rng = Rng::stream(cfg.seed, 0);
  Eigen::ArrayXd offset = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(k));
  if (cfg.subject_effect_std > 0.0) {
    for (auto& o : offset) o = offsets_rng.normal(0.0, cfg.subject_effect_std);
  }

  ScoreSet out;
  out.higher_is_genuine = true;

  Rng grng = Rng::stream(cfg.seed, 1);
  if (genuine_pairs <= cfg.pair_cap) {
    out.genuine.resize(genuine_pairs);
    Eigen::Index i = 0;
    for (std::size_t s = 0; s < k; ++s) {
      const Count pairs = counts[s] * (counts[s] - 1) / 2;
      for (Count p = 0; p < pairs; ++p) out.genuine[i++] = grng.normal(cfg.genuine_mean + offset[s], cfg.genuine_std);
    }
  } else {
    // Subject chosen in proportion to its pair count.
    std::vector<Count> cumulative(k);
    Count acc = 0;
    for (std::size_t s = 0; s < k; ++s) cumulative[s] = acc += counts[s] * (counts[s] - 1) / 2;
    out.genuine.resize(cfg.pair_cap);
    for (auto& g : out.genuine) {
      const auto r = static_cast<Count>(grng.bounded(static_cast<std::uint64_t>(acc)));
      const auto s = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), r) -
                                              cumulative.begin());
      g = grng.normal(cfg.genuine_mean + offset[s], cfg.genuine_std);
    }
  }

  Rng irng = Rng::stream(cfg.seed, 2);
  const auto impostor_score = [&](std::size_t s, std::size_t t) {
    return irng.normal(cfg.impostor_mean + (offset[s] + offset[t]) / 2.0, cfg.impostor_std);
  };
  if (impostor_pairs <= cfg.pair_cap) {
    out.impostor.resize(impostor_pairs);
    Eigen::Index i = 0;
    for (std::size_t s = 0; s < k; ++s) {
      for (std::size_t t = s + 1; t < k; ++t) {
        const Count pairs = counts[s] * counts[t];
        for (Count p = 0; p < pairs; ++p) out.impostor[i++] = impostor_score(s, t);
      }
    }
  } else {
    std::vector<std::size_t> owner;
    owner.reserve(static_cast<std::size_t>(total));
    for (std::size_t s = 0; s < k; ++s) owner.insert(owner.end(), static_cast<std::size_t>(counts[s]), s);
    out.impostor.resize(cfg.pair_cap);
    for (auto& v : out.impostor) {
      std::size_t a = 0;
      std::size_t b = 0;
      do {
        a = owner[irng.bounded(owner.size())];
        b = owner[irng.bounded(owner.size())];
      } while (a == b);
      v = impostor_score(std::min(a, b), std::max(a, b));
    }
  }
  return out;
}

ErrorRates error_rates(const ScoreSet& scores, double threshold) {
  const auto g = static_cast<double>(scores.genuine.size());
  const auto i = static_cast<double>(scores.impostor.size());
  if (scores.higher_is_genuine) {
    return {static_cast<double>((scores.impostor >= threshold).count()) / i,
            static_cast<double>((scores.genuine < threshold).count()) / g};
  }
  return {static_cast<double>((scores.impostor <= threshold).count()) / i,
          static_cast<double>((scores.genuine > threshold).count()) / g};
}

OperatingPoint eer_threshold(const ScoreSet& scores) {
  scores.validate();
  const SortedScores sorted(scores);
  OperatingPoint best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const double t : sorted.candidates()) {
    const auto r = sorted.at(t);
    const double gap = std::fabs(r.fmr - r.fnmr);
    if (gap < best_gap) {
      best_gap = gap;
      best = {t, r.fmr, r.fnmr, (r.fmr + r.fnmr) / 2.0};
    }
  }
  return best;
}

OperatingPoint threshold_at_fmr(const ScoreSet& scores, double target_fmr) {
  scores.validate();
  if (!(target_fmr >= 0.0 && target_fmr <= 1.0)) {
    throw DomainError(fmt::format("target FMR must lie in [0, 1], got {}", target_fmr));
  }
  const SortedScores sorted(scores);
  auto candidates = sorted.candidates();
  // Beyond the extremes so FMR = 0 is always reachable.
  const double lo = std::min(sorted.genuine().front(), sorted.impostor().front());
  const double hi = std::max(sorted.genuine().back(), sorted.impostor().back());
  candidates.insert(candidates.begin(), lo - 1.0);
  candidates.push_back(hi + 1.0);

  std::optional<OperatingPoint> best;
  for (const double t : candidates) {
    const auto r = sorted.at(t);
    if (r.fmr > target_fmr) continue;
    if (!best || r.fnmr < best->fnmr) best = OperatingPoint{t, r.fmr, r.fnmr, (r.fmr + r.fnmr) / 2.0};
  }
  return *best;
}

std::vector<double> threshold_grid(const ScoreSet& scores, int points) {
  scores.validate();
  if (points < 2) throw DomainError("threshold grid needs at least 2 points");
  const double a = median(sorted_copy(scores.impostor));
  const double b = median(sorted_copy(scores.genuine));
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = a + (b - a) * i / (points - 1);
  return grid;
}

std::string_view to_string(Metric m) { return m == Metric::fmr ? "fmr" : "fnmr"; }

void SubsampleConfig::validate() const {
  if (fracs.empty()) throw DomainError("need at least one subsample fraction");
  for (const double f : fracs) {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError(fmt::format("fraction must lie in (0, 1], got {}", f));
  }
  if (repetitions < 2) throw DomainError("need at least 2 repetitions for a standard deviation");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
}

std::vector<SubsampleResult> sweep(const ScoreSet& scores, const std::vector<double>& thresholds,
                                   const SubsampleConfig& cfg) {
  scores.validate();
  cfg.validate();
  if (thresholds.empty()) throw DomainError("need at least one threshold");
  const double z = special::two_sided_z(cfg.alpha);
  const std::size_t nt = thresholds.size();
  const std::size_t nf = cfg.fracs.size();
  const auto reps = static_cast<std::size_t>(cfg.repetitions);

  // counts[(f * 2 + m) * reps + r][t]
  std::vector<std::vector<Count>> counts(nf * 2 * reps);
  std::vector<Count> sizes(nf * 2);
  for (std::size_t mi = 0; mi < 2; ++mi) {
    const Metric metric = mi == 0 ? Metric::fmr : Metric::fnmr;
    const Eigen::ArrayXd& pool = metric == Metric::fmr ? scores.impostor : scores.genuine;
    const auto n = static_cast<std::size_t>(pool.size());
    std::vector<std::uint32_t> scratch(n);
    std::iota(scratch.begin(), scratch.end(), 0u);
    std::vector<std::uint32_t> picked;
    std::vector<double> sub;
    for (std::size_t fi = 0; fi < nf; ++fi) {
      const auto k = static_cast<std::size_t>(std::llround(cfg.fracs[fi] * static_cast<double>(n)));
      if (k < 10) {
        throw DomainError(fmt::format("fraction {} leaves {} {} comparisons; at least 10 are needed",
                                      cfg.fracs[fi], k, metric == Metric::fmr ? "impostor" : "genuine"));
      }
      sizes[fi * 2 + mi] = static_cast<Count>(k);
      for (std::size_t r = 0; r < reps; ++r) {
        Rng rng = Rng::stream(cfg.seed, (static_cast<std::uint64_t>(fi) << 40) |
                                            (static_cast<std::uint64_t>(mi) << 32) | r);
        sample_without_replacement(scratch, k, rng, picked);
        sub.resize(k);
        for (std::size_t j = 0; j < k; ++j) sub[j] = pool[picked[j]];
        std::sort(sub.begin(), sub.end());
        auto& row = counts[(fi * 2 + mi) * reps + r];
        row.resize(nt);
        for (std::size_t t = 0; t < nt; ++t) row[t] = errors_at(sub, thresholds[t], metric, scores.higher_is_genuine);
      }
    }
  }

  std::vector<SubsampleResult> results;
  results.reserve(nt * nf * 2);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t fi = 0; fi < nf; ++fi) {
      for (std::size_t mi = 0; mi < 2; ++mi) {
        SubsampleResult res;
        res.frac = cfg.fracs[fi];
        res.metric = mi == 0 ? Metric::fmr : Metric::fnmr;
        res.threshold = thresholds[t];
        res.subsample_size = sizes[fi * 2 + mi];
        Eigen::ArrayXd v(static_cast<Eigen::Index>(reps));
        for (std::size_t r = 0; r < reps; ++r) {
          v[static_cast<Eigen::Index>(r)] =
              static_cast<double>(counts[(fi * 2 + mi) * reps + r][t]) / static_cast<double>(res.subsample_size);
        }
        res.values.assign(v.data(), v.data() + v.size());
        res.mean_rate = v.mean();
        const double sd = std::sqrt((v - res.mean_rate).square().sum() / static_cast<double>(reps - 1));
        res.empirical_margin = sd * z;
        if (cfg.divide_by_sqrt_reps) res.empirical_margin /= std::sqrt(static_cast<double>(reps));
        const double rate = std::clamp(res.mean_rate, 0.0, 1.0);
        res.theoretical_margin = bioquake(ErrorObservation::from_rate(res.subsample_size, rate, cfg.alpha)).delta_abs;
        results.push_back(std::move(res));
      }
    }
  }
  return results;
}

std::vector<SubsampleResult> subsample_experiment(const ScoreSet& scores, double threshold,
                                                  const SubsampleConfig& cfg) {
  return sweep(scores, {threshold}, cfg);
}

double correlation(const std::vector<std::pair<double, double>>& pairs) {
  Eigen::ArrayXd x(static_cast<Eigen::Index>(pairs.size()));
  Eigen::ArrayXd y(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = pairs[i].first;
    y[static_cast<Eigen::Index>(i)] = pairs[i].second;
  }
  return pearson(x, y);
}

CoverageResult coverage_experiment(Count comparisons, double p_true, double alpha, Count trials,
                                   std::uint64_t seed) {
  if (comparisons < 1) throw DomainError("comparison count must be at least 1");
  if (!(p_true > 0.0 && p_true < 1.0)) {
    throw DomainError(fmt::format("true rate must lie strictly inside (0, 1), got {}", p_true));
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  if (trials < 1) throw DomainError("need at least one trial");

  // Coverage depends only on the drawn count, so each count is evaluated once.
  std::unordered_map<Count, bool> covers;
  CoverageResult out{comparisons, p_true, alpha, trials, 0, 0.0};
  for (Count t = 0; t < trials; ++t) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(t));
    const Count n = rng.binomial(comparisons, p_true);
    auto it = covers.find(n);
    if (it == covers.end()) {
      const auto res = bioquake(ErrorObservation::from_counts(comparisons, n, alpha));
      const double p_hat = static_cast<double>(n) / static_cast<double>(comparisons);
      it = covers.emplace(n, p_hat - res.delta_abs <= p_true && p_true <= p_hat + res.delta_abs).first;
    }
    out.covered += it->second;
  }
  out.coverage = static_cast<double>(out.covered) / static_cast<double>(trials);
  return out;
}

}  // namespace bioquake
