#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace binseq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Spectral magnitudes at or below this value count as exact nulls.
inline constexpr double kMagnitudeZeroTol = 1e-9;

/// Absolute slack on the interferer-power feasibility test g(s) <= alpha.
inline constexpr double kFeasibilitySlack = 1e-9;

/// Sorted set of 0-based frequency bins.
class BandSpec {
 public:
  BandSpec() = default;
  /// Sorts the input. Throws IndexError on negative or repeated bins.
  explicit BandSpec(std::vector<int> indices);
  BandSpec(std::initializer_list<int> indices) : BandSpec(std::vector<int>(indices)) {}

  /// Contiguous run [first, first + width).
  static BandSpec contiguous(int first, int width);

  const std::vector<int>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(int bin) const;

  friend bool operator==(const BandSpec&, const BandSpec&) = default;

 private:
  std::vector<int> indices_;
};

struct DesignProblem {
  int n = 0;
  BandSpec message;
  BandSpec interferer;
  double alpha = 0.0;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
};

/// Checks band disjointness, bin range and a nonempty message band.
const DesignProblem& validate_problem(const DesignProblem& p);

/// Vector of +/-1 entries.
class BinarySequence {
 public:
  BinarySequence() = default;
  /// Throws std::invalid_argument if an entry is not +/-1.
  explicit BinarySequence(std::vector<std::int8_t> entries);
  BinarySequence(std::initializer_list<int> entries);

  static BinarySequence ones(int n) { return BinarySequence(std::vector<std::int8_t>(n, 1)); }
  /// sign(x) with sign(0) = +1.
  static BinarySequence sign_of(std::span<const double> values);
  /// Bit i set means entry i is -1.
  static BinarySequence from_mask(std::uint64_t mask, int n);

  std::span<const std::int8_t> entries() const noexcept { return entries_; }
  int size() const noexcept { return static_cast<int>(entries_.size()); }
  std::int8_t operator[](int i) const { return entries_[i]; }
  BinarySequence negated() const;
  Eigen::VectorXd as_vector() const;

  friend bool operator==(const BinarySequence&, const BinarySequence&) = default;
  /// Lexicographic with -1 < +1.
  friend bool operator<(const BinarySequence& a, const BinarySequence& b) {
    return a.entries_ < b.entries_;
  }

 private:
  std::vector<std::int8_t> entries_;
};

struct MetricBundle {
  double message_power = 0.0;
  double interferer_power = 0.0;
  double rejection_ratio = 0.0;
  double reciprocal_dynamic_range = 0.0;
  bool feasible = false;
};

enum class ScoreKind { MessagePower, RejectionRatio, ReciprocalDynamicRange };

std::string_view to_string(ScoreKind kind);
/// Accepts the enumerator name or the short forms "power", "rho", "chi".
ScoreKind parse_score_kind(std::string_view text);

/// The selection score of a metric bundle. +inf is a legal rejection ratio.
double score_of(const MetricBundle& m, ScoreKind kind);

/// rho from band magnitude extrema, with the null conventions applied.
double rejection_ratio_from(double min_message, double max_interferer, bool interferer_empty);
/// chi from message magnitude extrema; 0/0 is 0.
double dynamic_range_from(double min_message, double max_message);

/// Precomputed band bases for repeated metric evaluation on one problem.
/// Immutable after construction; safe to share between threads.
class BandEvaluator {
 public:
  explicit BandEvaluator(const DesignProblem& p);

  MetricBundle evaluate(const BinarySequence& s) const;
  MetricBundle evaluate(std::span<const std::int8_t> s) const;
  /// Metrics of a complex (e.g. unimodular) sequence.
  MetricBundle evaluate(const Eigen::VectorXcd& s) const;

  double message_power(const BinarySequence& s) const;
  double interferer_power(const BinarySequence& s) const;

  const DesignProblem& problem() const noexcept { return problem_; }

 private:
  MetricBundle from_spectra(const Eigen::VectorXcd& message, const Eigen::VectorXcd& interferer) const;
  void check_length(int len) const;

  DesignProblem problem_;
  Eigen::MatrixXcd message_adj_;     // F_M^H, |M| x n
  Eigen::MatrixXcd interferer_adj_;  // F_I^H, |I| x n
};

double message_power(const DesignProblem& p, const BinarySequence& s);
double interferer_power(const DesignProblem& p, const BinarySequence& s);
double rejection_ratio(const DesignProblem& p, const BinarySequence& s);
double reciprocal_dynamic_range(const DesignProblem& p, const BinarySequence& s);
MetricBundle evaluate_metrics(const DesignProblem& p, const BinarySequence& s);

}  // namespace binseq
