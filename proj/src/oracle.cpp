#include "binseq/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "binseq/errors.hpp"
#include "binseq/spectral.hpp"

namespace binseq {

namespace {

constexpr double kTieTol = 1e-9;
// Prefix bits split the enumeration into fixed partitions, so the merge
// order (and the result) does not depend on the thread count.
constexpr int kPrefixBits = 6;

// True when score a beats score b, or ties and mask a is lexicographically
// smaller. Entry i is -1 iff bit i is set, and -1 < +1.
bool beats(double sa, std::uint64_t ma, double sb, std::uint64_t mb) {
  const bool tie = (std::isinf(sa) || std::isinf(sb))
                       ? sa == sb
                       : std::abs(sa - sb) <= kTieTol * std::max(1.0, std::abs(sb));
  if (!tie) return sa > sb;
  const std::uint64_t diff = ma ^ mb;
  if (diff == 0) return false;
  return (diff & (~diff + 1) & ma) != 0;
}

struct Slot {
  bool set = false;
  double score = 0.0;
  std::uint64_t mask = 0;

  void offer(double s, std::uint64_t m) {
    if (!set || beats(s, m, score, mask)) {
      set = true;
      score = s;
      mask = m;
    }
  }
  void merge(const Slot& o) {
    if (o.set) offer(o.score, o.mask);
  }
};

struct Tally {
  Slot power, rho, chi;
  std::int64_t feasible = 0;

  void merge(const Tally& o) {
    power.merge(o.power);
    rho.merge(o.rho);
    chi.merge(o.chi);
    feasible += o.feasible;
  }
};

// Band spectra of every sequence sharing a prefix, visited in Gray-code order.
class GrayWalker {
 public:
  explicit GrayWalker(const DesignProblem& p) : p_(p) {
    const int km = static_cast<int>(p.message.size());
    const int ki = static_cast<int>(p.interferer.size());
    bins_ = km + ki;
    km_ = km;
    rows_.assign(static_cast<std::size_t>(p.n) * bins_, {});
    const auto fill = [&](const BandSpec& band, int offset) {
      if (band.empty()) return;
      const PartialDftBasis b = build_partial_dft(p.n, band);
      for (int i = 0; i < p.n; ++i) {
        for (Eigen::Index k = 0; k < b.columns.cols(); ++k) {
          rows_[static_cast<std::size_t>(i) * bins_ + offset + k] = std::conj(b.columns(i, k));
        }
      }
    };
    fill(p.message, 0);
    fill(p.interferer, km);
  }

  // Visits every mask (prefix | low) with the low `low_bits` free bits above bit 0.
  template <class Visit>
  void walk(std::uint64_t prefix, int low_bits, Visit&& visit) const {
    std::vector<std::complex<double>> y(bins_, {0.0, 0.0});
    std::uint64_t mask = prefix;
    for (int i = 0; i < p_.n; ++i) {
      const double s = ((mask >> i) & 1U) ? -1.0 : 1.0;
      const std::complex<double>* row = &rows_[static_cast<std::size_t>(i) * bins_];
      for (int k = 0; k < bins_; ++k) y[k] += s * row[k];
    }
    visit(mask, y);
    const std::uint64_t count = std::uint64_t{1} << low_bits;
    for (std::uint64_t j = 1; j < count; ++j) {
      const int bit = std::countr_zero(j) + 1;
      mask ^= std::uint64_t{1} << bit;
      // Entry goes +1 -> -1 when the bit is now set.
      const double delta = ((mask >> bit) & 1U) ? -2.0 : 2.0;
      const std::complex<double>* row = &rows_[static_cast<std::size_t>(bit) * bins_];
      for (int k = 0; k < bins_; ++k) y[k] += delta * row[k];
      visit(mask, y);
    }
  }

  int message_bins() const { return km_; }
  int bins() const { return bins_; }

 private:
  const DesignProblem& p_;
  int bins_ = 0;
  int km_ = 0;
  std::vector<std::complex<double>> rows_;  // n x bins, conj(F(i, k))
};

void check_size(const DesignProblem& p, int n_limit) {
  validate_problem(p);
  if (p.n > n_limit || p.n > 63) {
    throw SizeLimitError("exhaustive search limited to n <= " + std::to_string(n_limit) +
                         ", got n = " + std::to_string(p.n));
  }
}

OracleBest materialize(const DesignProblem& p, const Slot& slot) {
  BinarySequence s = BinarySequence::from_mask(slot.mask, p.n);
  OracleBest best{s, evaluate_metrics(p, s)};
  return best;
}

OracleResult finish(const DesignProblem& p, const Tally& t) {
  if (t.feasible == 0) {
    throw NoFeasibleError("no binary sequence satisfies g(s) <= alpha = " + std::to_string(p.alpha));
  }
  OracleResult r;
  r.best_by_power = materialize(p, t.power);
  r.best_by_rho = materialize(p, t.rho);
  r.best_by_chi = materialize(p, t.chi);
  r.n_feasible = t.feasible;
  r.n_enumerated = std::int64_t{1} << (p.n - 1);
  return r;
}

}  // namespace

const OracleBest& OracleResult::best_for(ScoreKind kind) const {
  switch (kind) {
    case ScoreKind::MessagePower: return best_by_power;
    case ScoreKind::RejectionRatio: return best_by_rho;
    case ScoreKind::ReciprocalDynamicRange: return best_by_chi;
  }
  return best_by_power;
}

OracleResult exhaustive_search(const DesignProblem& p, int n_limit) {
  check_size(p, n_limit);
  const GrayWalker walker(p);
  const int free_bits = p.n - 1;
  const int prefix_bits = std::min(kPrefixBits, free_bits);
  const int low_bits = free_bits - prefix_bits;
  const int partitions = 1 << prefix_bits;
  const int km = walker.message_bins();
  const int bins = walker.bins();
  const bool no_interferer = p.interferer.empty();
  const double limit = p.alpha + kFeasibilitySlack;

  std::vector<Tally> tallies(static_cast<std::size_t>(partitions));
#pragma omp parallel for schedule(dynamic)
  for (int part = 0; part < partitions; ++part) {
    Tally& t = tallies[static_cast<std::size_t>(part)];
    const std::uint64_t prefix = static_cast<std::uint64_t>(part) << (low_bits + 1);
    walker.walk(prefix, low_bits, [&](std::uint64_t mask, const std::vector<std::complex<double>>& y) {
      double g = 0.0, max_i = 0.0;
      for (int k = km; k < bins; ++k) {
        const double q = std::norm(y[k]);
        g += q;
        max_i = std::max(max_i, q);
      }
      if (g > limit) return;
      double f = 0.0, min_m = kInfinity, max_m = 0.0;
      for (int k = 0; k < km; ++k) {
        const double q = std::norm(y[k]);
        f += q;
        min_m = std::min(min_m, q);
        max_m = std::max(max_m, q);
      }
      ++t.feasible;
      t.power.offer(f, mask);
      t.rho.offer(rejection_ratio_from(std::sqrt(min_m), std::sqrt(max_i), no_interferer), mask);
      t.chi.offer(dynamic_range_from(std::sqrt(min_m), std::sqrt(max_m)), mask);
    });
  }
  Tally total;
  for (const Tally& t : tallies) total.merge(t);
  return finish(p, total);
}

OracleResult exhaustive_search_serial(const DesignProblem& p, int n_limit) {
  check_size(p, n_limit);
  const BandEvaluator eval(p);
  Tally t;
  const std::uint64_t count = std::uint64_t{1} << (p.n - 1);
  for (std::uint64_t j = 0; j < count; ++j) {
    const std::uint64_t mask = j << 1;
    const MetricBundle m = eval.evaluate(BinarySequence::from_mask(mask, p.n));
    if (!m.feasible) continue;
    ++t.feasible;
    t.power.offer(m.message_power, mask);
    t.rho.offer(m.rejection_ratio, mask);
    t.chi.offer(m.reciprocal_dynamic_range, mask);
  }
  return finish(p, t);
}

double halved_constraint_optimum(const DesignProblem& p, int n_limit) {
  check_size(p, n_limit);
  const GrayWalker walker(p);
  const int km = walker.message_bins();
  const int bins = walker.bins();
  const double limit = 0.5 * p.alpha + kFeasibilitySlack;
  double best = -kInfinity;
  walker.walk(0, p.n - 1, [&](std::uint64_t, const std::vector<std::complex<double>>& y) {
    double g = 0.0;
    for (int k = km; k < bins; ++k) g += std::norm(y[k]);
    if (g > limit) return;
    double f = 0.0;
    for (int k = 0; k < km; ++k) f += std::norm(y[k]);
    best = std::max(best, f);
  });
  return best;
}

}  // namespace binseq
