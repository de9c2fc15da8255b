#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace peakseg {

/// Data index as used by the cost functions: 1-based row number, or
/// kNoIndex when there is no previous segment.
using DataIndex = std::int64_t;
inline constexpr DataIndex kNoIndex = -1;

/// Sentinel stored in Piece::prev_mean meaning "the previous segment has
/// the same mean as the current one" (an active inequality constraint).
inline constexpr double kEqualityMean = std::numeric_limits<double>::infinity();

/// One piece alpha*mu + beta*log(mu) + gamma on [min_mean, max_mean],
/// together with the back-pointers used to decode the optimal model.
struct Piece {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double min_mean = 0.0;
  double max_mean = 0.0;
  DataIndex prev_end = kNoIndex;
  double prev_mean = kEqualityMean;

  /// Value at mu, with the limit convention at mu == 0.
  [[nodiscard]] double value(double mu) const;
  [[nodiscard]] double derivative(double mu) const;
  [[nodiscard]] bool is_equality() const { return prev_mean == kEqualityMean; }
  [[nodiscard]] bool same_pointers(const Piece& other) const {
    return prev_end == other.prev_end &&
           (prev_mean == other.prev_mean ||
            (is_equality() && other.is_equality()));
  }
  friend bool operator==(const Piece&, const Piece&) = default;
};

struct ArgMinResult {
  double mean = 0.0;
  double cost = 0.0;
  DataIndex prev_end = kNoIndex;
  double prev_mean = kEqualityMean;
};

struct BackPointer {
  DataIndex prev_end = kNoIndex;
  double prev_mean = kEqualityMean;
};

/// An optimal cost function: a contiguous, ordered, non-empty list of
/// pieces covering [domain_min, domain_max].
class PiecewiseCost {
 public:
  PiecewiseCost() = default;

  /// Validates the contiguity invariants; throws DomainError on violation.
  explicit PiecewiseCost(std::vector<Piece> pieces);

  [[nodiscard]] std::span<const Piece> pieces() const { return pieces_; }
  [[nodiscard]] std::size_t size() const { return pieces_.size(); }
  [[nodiscard]] bool empty() const { return pieces_.empty(); }
  [[nodiscard]] double domain_min() const { return pieces_.front().min_mean; }
  [[nodiscard]] double domain_max() const { return pieces_.back().max_mean; }

  friend bool operator==(const PiecewiseCost&, const PiecewiseCost&) = default;

 private:
  friend class PieceBuilder;
  std::vector<Piece> pieces_;
};

/// Single data term w*(mu - z*log(mu)) on [domain_min, domain_max].
PiecewiseCost one_piece(double count, double weight, double domain_min,
                        double domain_max);

double evaluate(const PiecewiseCost& f, double mu);

/// Pointwise sum; back-pointers come from f.
PiecewiseCost add(const PiecewiseCost& f, const PiecewiseCost& g);

/// Pointwise minimum. Exact ties go to g.
PiecewiseCost min_of_two(const PiecewiseCost& f, const PiecewiseCost& g);

/// Running minimum from the left, min_{x <= mu} f(x).
PiecewiseCost min_less(DataIndex prev_end, const PiecewiseCost& f);

/// Running minimum from the right, min_{x >= mu} f(x).
PiecewiseCost min_more(DataIndex prev_end, const PiecewiseCost& f);

PiecewiseCost add_constant(const PiecewiseCost& f, double c);

ArgMinResult arg_min(const PiecewiseCost& f);

BackPointer find_mean(const PiecewiseCost& f, double mu);

/// Merges adjacent pieces with equal coefficients (abs tol 1e-12) and
/// identical back-pointers.
PiecewiseCost simplify(const PiecewiseCost& f);

/// Crossing points of two pieces' difference on the open interval (lo, hi),
/// ascending. Exposed for testing the root finder.
std::vector<double> crossing_points(const Piece& p, const Piece& q, double lo,
                                    double hi);

}  // namespace peakseg
