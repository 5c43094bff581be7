#include "binseq/problem.hpp"

#include <algorithm>
#include <stdexcept>

#include "binseq/errors.hpp"
#include "binseq/spectral.hpp"

namespace binseq {

BandSpec::BandSpec(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (!indices_.empty() && indices_.front() < 0) {
    throw IndexError("negative frequency bin " + std::to_string(indices_.front()));
  }
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw IndexError("repeated frequency bin in band");
  }
}

BandSpec BandSpec::contiguous(int first, int width) {
  std::vector<int> bins(std::max(width, 0));
  for (int k = 0; k < width; ++k) bins[k] = first + k;
  return BandSpec(std::move(bins));
}

bool BandSpec::contains(int bin) const {
  return std::binary_search(indices_.begin(), indices_.end(), bin);
}

const DesignProblem& validate_problem(const DesignProblem& p) {
  if (p.n <= 0) throw IndexError("sequence length must be positive");
  if (p.message.empty()) throw EmptyMessageError("message band is empty");
  for (const BandSpec* band : {&p.message, &p.interferer}) {
    if (!band->empty() && band->indices().back() >= p.n) {
      throw IndexError("frequency bin " + std::to_string(band->indices().back()) +
                       " out of range for n = " + std::to_string(p.n));
    }
  }
  for (int bin : p.interferer.indices()) {
    if (p.message.contains(bin)) {
      throw OverlapError("bin " + std::to_string(bin) + " is in both message and interferer bands");
    }
  }
  if (!(p.alpha >= 0.0)) throw ConfigError("alpha must be nonnegative");
  if (p.trials <= 0) throw ConfigError("trials must be positive");
  return p;
}

BinarySequence::BinarySequence(std::vector<std::int8_t> entries) : entries_(std::move(entries)) {
  for (auto e : entries_) {
    if (e != 1 && e != -1) throw std::invalid_argument("binary sequence entries must be +1 or -1");
  }
}

BinarySequence::BinarySequence(std::initializer_list<int> entries)
    : BinarySequence(std::vector<std::int8_t>(entries.begin(), entries.end())) {}

BinarySequence BinarySequence::sign_of(std::span<const double> values) {
  std::vector<std::int8_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] < 0.0 ? -1 : 1;
  return BinarySequence(std::move(out));
}

BinarySequence BinarySequence::from_mask(std::uint64_t mask, int n) {
  std::vector<std::int8_t> out(n);
  for (int i = 0; i < n; ++i) out[i] = ((mask >> i) & 1U) ? -1 : 1;
  return BinarySequence(std::move(out));
}

BinarySequence BinarySequence::negated() const {
  std::vector<std::int8_t> out(entries_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::int8_t>(-entries_[i]);
  return BinarySequence(std::move(out));
}

Eigen::VectorXd BinarySequence::as_vector() const {
  Eigen::VectorXd v(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) v[i] = entries_[i];
  return v;
}

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::MessagePower: return "MessagePower";
    case ScoreKind::RejectionRatio: return "RejectionRatio";
    case ScoreKind::ReciprocalDynamicRange: return "ReciprocalDynamicRange";
  }
  return "?";
}

ScoreKind parse_score_kind(std::string_view text) {
  if (text == "MessagePower" || text == "power") return ScoreKind::MessagePower;
  if (text == "RejectionRatio" || text == "rho") return ScoreKind::RejectionRatio;
  if (text == "ReciprocalDynamicRange" || text == "chi") return ScoreKind::ReciprocalDynamicRange;
  throw ConfigError("unknown score kind '" + std::string(text) + "'");
}

double score_of(const MetricBundle& m, ScoreKind kind) {
  switch (kind) {
    case ScoreKind::MessagePower: return m.message_power;
    case ScoreKind::RejectionRatio: return m.rejection_ratio;
    case ScoreKind::ReciprocalDynamicRange: return m.reciprocal_dynamic_range;
  }
  return 0.0;
}

double rejection_ratio_from(double min_message, double max_interferer, bool interferer_empty) {
  if (interferer_empty) return kInfinity;
  if (max_interferer <= kMagnitudeZeroTol) {
    // A sequence that also nulls the message band has nothing to reject with.
    return min_message <= kMagnitudeZeroTol ? 0.0 : kInfinity;
  }
  return min_message / max_interferer;
}

double dynamic_range_from(double min_message, double max_message) {
  if (max_message <= kMagnitudeZeroTol) return 0.0;
  return std::clamp(min_message / max_message, 0.0, 1.0);
}

namespace {

Eigen::MatrixXcd adjoint_basis(int n, const BandSpec& band) {
  if (band.empty()) return Eigen::MatrixXcd(0, n);
  return build_partial_dft(n, band).columns.adjoint();
}

}  // namespace

BandEvaluator::BandEvaluator(const DesignProblem& p)
    : problem_(p),
      message_adj_(adjoint_basis(p.n, p.message)),
      interferer_adj_(adjoint_basis(p.n, p.interferer)) {}

void BandEvaluator::check_length(int len) const {
  if (len != problem_.n) {
    throw LengthMismatchError("sequence length " + std::to_string(len) + " does not match n = " +
                              std::to_string(problem_.n));
  }
}

MetricBundle BandEvaluator::from_spectra(const Eigen::VectorXcd& message,
                                         const Eigen::VectorXcd& interferer) const {
  MetricBundle m;
  double min_m = kInfinity, max_m = 0.0, max_i = 0.0;
  for (Eigen::Index k = 0; k < message.size(); ++k) {
    const double mag = std::abs(message[k]);
    m.message_power += std::norm(message[k]);
    min_m = std::min(min_m, mag);
    max_m = std::max(max_m, mag);
  }
  for (Eigen::Index k = 0; k < interferer.size(); ++k) {
    m.interferer_power += std::norm(interferer[k]);
    max_i = std::max(max_i, std::abs(interferer[k]));
  }
  if (message.size() == 0) min_m = 0.0;
  m.rejection_ratio = rejection_ratio_from(min_m, max_i, interferer.size() == 0);
  m.reciprocal_dynamic_range = dynamic_range_from(min_m, max_m);
  m.feasible = m.interferer_power <= problem_.alpha + kFeasibilitySlack;
  return m;
}

MetricBundle BandEvaluator::evaluate(std::span<const std::int8_t> s) const {
  check_length(static_cast<int>(s.size()));
  Eigen::VectorXd x(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) x[i] = s[i];
  return from_spectra(message_adj_ * x.cast<std::complex<double>>(),
                      interferer_adj_ * x.cast<std::complex<double>>());
}

MetricBundle BandEvaluator::evaluate(const BinarySequence& s) const { return evaluate(s.entries()); }

MetricBundle BandEvaluator::evaluate(const Eigen::VectorXcd& s) const {
  check_length(static_cast<int>(s.size()));
  return from_spectra(message_adj_ * s, interferer_adj_ * s);
}

double BandEvaluator::message_power(const BinarySequence& s) const {
  return evaluate(s).message_power;
}

double BandEvaluator::interferer_power(const BinarySequence& s) const {
  return evaluate(s).interferer_power;
}

double message_power(const DesignProblem& p, const BinarySequence& s) {
  return BandEvaluator(p).evaluate(s).message_power;
}

double interferer_power(const DesignProblem& p, const BinarySequence& s) {
  return BandEvaluator(p).evaluate(s).interferer_power;
}

double rejection_ratio(const DesignProblem& p, const BinarySequence& s) {
  return BandEvaluator(p).evaluate(s).rejection_ratio;
}

double reciprocal_dynamic_range(const DesignProblem& p, const BinarySequence& s) {
  return BandEvaluator(p).evaluate(s).reciprocal_dynamic_range;
}

MetricBundle evaluate_metrics(const DesignProblem& p, const BinarySequence& s) {
  return BandEvaluator(p).evaluate(s);
}

}  // namespace binseq
