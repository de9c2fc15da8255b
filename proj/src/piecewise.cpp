#include "peakseg/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "peakseg/errors.hpp"

namespace peakseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMergeTolerance = 1e-12;
constexpr double kLookupTolerance = 1e-10;
constexpr double kRootRelTolerance = 1e-12;
constexpr int kMaxRootIterations = 200;

// a*mu + b*log(mu) + c with the mu -> 0 limit convention.
double affine_log_value(double a, double b, double c, double mu) {
  if (mu == 0.0) {
    if (b == 0.0) return c;
    return b < 0.0 ? kInf : -kInf;
  }
  if (b == 0.0) return a * mu + c;
  return a * mu + b * std::log(mu) + c;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Root of h(mu) = a*mu + b*log(mu) + c on [lo, hi], where h is monotone on
// the interval and h(lo), h(hi) have strictly opposite signs.
double solve_monotone_root(double a, double b, double c, double lo, double hi) {
  if (b == 0.0) return std::clamp(-c / a, lo, hi);
  if (a == 0.0) return std::clamp(std::exp(-c / b), lo, hi);

  const auto h = [&](double mu) { return affine_log_value(a, b, c, mu); };
  const int sign_lo = sign_of(h(lo));
  if (lo == 0.0) {
    // Walk towards zero until the sign matches the limit at zero.
    double x = hi;
    while (x > 0.0 && sign_of(h(x)) != sign_lo) {
      hi = x;
      x *= 0.5;
    }
    if (x == 0.0) return 0.0;
    lo = x;
  }

  double x = 0.5 * (lo + hi);
  for (int step = 0; step < kMaxRootIterations; ++step) {
    const double hx = h(x);
    if (hx == 0.0) return x;
    if (sign_of(hx) == sign_lo) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= kRootRelTolerance * hi) break;
    double next = x - hx / (a + b / x);
    if (!(next > lo && next < hi)) {
      next = (hi > 2.0 * lo && lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    if (std::abs(next - x) <= 0.25 * kRootRelTolerance * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

// Coefficient difference of two pieces.
struct Difference {
  double a, b, c;
  [[nodiscard]] double value(double mu) const {
    return affine_log_value(a, b, c, mu);
  }
  [[nodiscard]] bool is_zero() const { return a == 0.0 && b == 0.0 && c == 0.0; }
};

// Sign of d at mu, treating values within rounding noise of zero as zero.
int tolerant_sign(const Difference& d, const Piece& p, const Piece& q, double mu) {
  const double v = d.value(mu);
  if (std::isinf(v)) return sign_of(v);
  const double pv = p.value(mu);
  const double qv = q.value(mu);
  const double scale =
      1.0 + (std::isfinite(pv) ? std::abs(pv) : 0.0) + (std::isfinite(qv) ? std::abs(qv) : 0.0);
  if (std::abs(v) <= 1e-13 * scale) return 0;
  return sign_of(v);
}

void check_same_domain(const PiecewiseCost& f, const PiecewiseCost& g) {
  if (f.empty() || g.empty()) throw DomainError("empty piecewise function");
  if (f.domain_min() != g.domain_min() || f.domain_max() != g.domain_max()) {
    throw DomainError("piecewise functions have mismatched domains");
  }
}

}  // namespace

double Piece::value(double mu) const { return affine_log_value(alpha, beta, gamma, mu); }

double Piece::derivative(double mu) const { return alpha + beta / mu; }

// Appends pieces left to right, dropping zero-width pieces and extending
// the previous piece when coefficients and back-pointers are identical.
class PieceBuilder {
 public:
  void push(const Piece& src, double lo, double hi) {
    if (!(hi > lo)) {
      if (hi == lo && pending_ == nullptr) {
        pending_piece_ = src;
        pending_piece_.min_mean = lo;
        pending_piece_.max_mean = hi;
        pending_ = &pending_piece_;
      }
      return;
    }
    if (!out_.empty()) {
      Piece& last = out_.back();
      if (last.alpha == src.alpha && last.beta == src.beta && last.gamma == src.gamma &&
          last.same_pointers(src)) {
        last.max_mean = hi;
        return;
      }
      lo = last.max_mean;
    }
    Piece p = src;
    p.min_mean = lo;
    p.max_mean = hi;
    out_.push_back(p);
  }

  PiecewiseCost finish() {
    if (out_.empty() && pending_ != nullptr) out_.push_back(*pending_);
    PiecewiseCost f;
    f.pieces_ = std::move(out_);
    return f;
  }

  static PiecewiseCost wrap(std::vector<Piece> pieces) {
    PiecewiseCost f;
    f.pieces_ = std::move(pieces);
    return f;
  }

 private:
  std::vector<Piece> out_;
  Piece pending_piece_;
  const Piece* pending_ = nullptr;
};

PiecewiseCost::PiecewiseCost(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("piecewise function must have at least one piece");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const Piece& p = pieces_[k];
    if (!(p.min_mean <= p.max_mean)) {
      throw DomainError("piece " + std::to_string(k) + " has min_mean > max_mean");
    }
    if (k + 1 < pieces_.size() && p.max_mean != pieces_[k + 1].min_mean) {
      throw DomainError("pieces " + std::to_string(k) + " and " + std::to_string(k + 1) +
                        " are not contiguous");
    }
  }
}

PiecewiseCost one_piece(double count, double weight, double domain_min, double domain_max) {
  if (!(domain_min <= domain_max)) throw DomainError("one_piece: domain_min > domain_max");
  Piece p;
  p.alpha = weight;
  p.beta = count == 0.0 ? 0.0 : -weight * count;
  p.gamma = 0.0;
  p.min_mean = domain_min;
  p.max_mean = domain_max;
  return PieceBuilder::wrap({p});
}

double evaluate(const PiecewiseCost& f, double mu) {
  if (f.empty() || mu < f.domain_min() || mu > f.domain_max()) {
    throw DomainError("evaluate: mean outside function domain");
  }
  for (const Piece& p : f.pieces()) {
    if (mu <= p.max_mean) return p.value(mu);
  }
  return f.pieces().back().value(mu);
}

PiecewiseCost add(const PiecewiseCost& f, const PiecewiseCost& g) {
  check_same_domain(f, g);
  std::vector<Piece> out;
  if (g.size() == 1) {
    const Piece& q = g.pieces().front();
    out.assign(f.pieces().begin(), f.pieces().end());
    for (Piece& p : out) {
      p.alpha += q.alpha;
      p.beta += q.beta;
      p.gamma += q.gamma;
    }
    return PieceBuilder::wrap(std::move(out));
  }
  const auto fp = f.pieces();
  const auto gp = g.pieces();
  std::size_t i = 0, j = 0;
  double lo = f.domain_min();
  out.reserve(fp.size() + gp.size());
  while (i < fp.size() && j < gp.size()) {
    const double hi = std::min(fp[i].max_mean, gp[j].max_mean);
    Piece p = fp[i];
    p.alpha += gp[j].alpha;
    p.beta += gp[j].beta;
    p.gamma += gp[j].gamma;
    p.min_mean = lo;
    p.max_mean = hi;
    if (hi > lo || (out.empty() && i + 1 == fp.size() && j + 1 == gp.size())) out.push_back(p);
    lo = hi;
    const bool advance_f = fp[i].max_mean == hi;
    const bool advance_g = gp[j].max_mean == hi;
    if (advance_f) ++i;
    if (advance_g) ++j;
  }
  return PieceBuilder::wrap(std::move(out));
}

std::vector<double> crossing_points(const Piece& p, const Piece& q, double lo, double hi) {
  std::vector<double> roots;
  const Difference d{p.alpha - q.alpha, p.beta - q.beta, p.gamma - q.gamma};
  if (d.is_zero() || !(hi > lo)) return roots;

  double bounds[3] = {lo, hi, hi};
  int n_bounds = 2;
  if (d.a != 0.0 && d.b != 0.0) {
    const double stationary = -d.b / d.a;
    if (stationary > lo && stationary < hi) {
      bounds[1] = stationary;
      bounds[2] = hi;
      n_bounds = 3;
    }
  }
  for (int k = 0; k + 1 < n_bounds; ++k) {
    const double u = bounds[k];
    const double v = bounds[k + 1];
    const int su = tolerant_sign(d, p, q, u);
    const int sv = tolerant_sign(d, p, q, v);
    if (su * sv >= 0) continue;
    const double r = solve_monotone_root(d.a, d.b, d.c, u, v);
    if (r > lo && r < hi && (roots.empty() || r > roots.back())) roots.push_back(r);
  }
  return roots;
}

PiecewiseCost min_of_two(const PiecewiseCost& f, const PiecewiseCost& g) {
  check_same_domain(f, g);
  const auto fp = f.pieces();
  const auto gp = g.pieces();
  PieceBuilder out;
  std::size_t i = 0, j = 0;
  double lo = f.domain_min();
  while (i < fp.size() && j < gp.size()) {
    const Piece& p = fp[i];
    const Piece& q = gp[j];
    const double hi = std::min(p.max_mean, q.max_mean);
    const Difference d{p.alpha - q.alpha, p.beta - q.beta, p.gamma - q.gamma};
    if (d.is_zero() || !(hi > lo)) {
      out.push(q, lo, hi);
    } else {
      const std::vector<double> roots = crossing_points(p, q, lo, hi);
      double u = lo;
      for (std::size_t k = 0; k <= roots.size(); ++k) {
        const double v = k < roots.size() ? roots[k] : hi;
        const double mid = 0.5 * (u + v);
        out.push(d.value(mid) < 0.0 ? p : q, u, v);
        u = v;
      }
    }
    lo = hi;
    const bool advance_f = p.max_mean == hi;
    const bool advance_g = q.max_mean == hi;
    if (advance_f) ++i;
    if (advance_g) ++j;
  }
  return out.finish();
}

namespace {

// Sub-interval of a piece on which it is monotone.
struct MonotoneSpan {
  const Piece* piece;
  double lo, hi;
};

std::vector<MonotoneSpan> monotone_spans(const PiecewiseCost& f) {
  std::vector<MonotoneSpan> spans;
  spans.reserve(f.size() * 2);
  for (const Piece& p : f.pieces()) {
    if (p.alpha != 0.0 && p.beta != 0.0) {
      const double stationary = -p.beta / p.alpha;
      if (stationary > p.min_mean && stationary < p.max_mean) {
        spans.push_back({&p, p.min_mean, stationary});
        spans.push_back({&p, stationary, p.max_mean});
        continue;
      }
    }
    spans.push_back({&p, p.min_mean, p.max_mean});
  }
  return spans;
}

// Running minimum in the direction of increasing mu (Forward) or
// decreasing mu (!Forward). Output intervals are collected in traversal
// order as (piece, lo, hi).
template <bool Forward>
PiecewiseCost running_min(DataIndex prev_end, const PiecewiseCost& f) {
  if (f.empty()) throw DomainError("running minimum of empty function");
  std::vector<MonotoneSpan> spans = monotone_spans(f);
  if (!Forward) std::reverse(spans.begin(), spans.end());

  struct Interval {
    Piece piece;
    double lo, hi;
  };
  std::vector<Interval> emitted;
  emitted.reserve(spans.size() + 2);

  const auto copy_piece = [&](const Piece& src, double lo, double hi) {
    Piece p = src;
    p.prev_end = prev_end;
    p.prev_mean = kEqualityMean;
    emitted.push_back({p, lo, hi});
  };
  const auto constant_piece = [&](double level, double at, double lo, double hi) {
    Piece p;
    p.gamma = level;
    p.prev_end = prev_end;
    p.prev_mean = at;
    emitted.push_back({p, lo, hi});
  };

  bool tracking = true;
  bool first = true;
  double level = kInf;
  double level_at = 0.0;
  for (const MonotoneSpan& s : spans) {
    const Piece& p = *s.piece;
    const double start = Forward ? s.lo : s.hi;
    const double end = Forward ? s.hi : s.lo;
    const double v_start = p.value(start);
    const double v_end = p.value(end);
    const bool non_increasing = v_end <= v_start;
    if (first) {
      level = v_start;
      level_at = start;
      first = false;
    }
    if (tracking) {
      if (non_increasing) {
        copy_piece(p, s.lo, s.hi);
        level = v_end;
        level_at = end;
      } else {
        if (v_start < level) {
          level = v_start;
          level_at = start;
        }
        tracking = false;
        constant_piece(level, level_at, s.lo, s.hi);
      }
      continue;
    }
    if (non_increasing && v_end < level) {
      if (v_start <= level) {
        copy_piece(p, s.lo, s.hi);
      } else {
        const double r = solve_monotone_root(p.alpha, p.beta, p.gamma - level, s.lo, s.hi);
        if (Forward) {
          constant_piece(level, level_at, s.lo, r);
          copy_piece(p, r, s.hi);
        } else {
          constant_piece(level, level_at, r, s.hi);
          copy_piece(p, s.lo, r);
        }
      }
      tracking = true;
      level = v_end;
      level_at = end;
    } else {
      if (!non_increasing && v_start < level) {
        level = v_start;
        level_at = start;
      }
      constant_piece(level, level_at, s.lo, s.hi);
    }
  }

  if (!Forward) std::reverse(emitted.begin(), emitted.end());
  PieceBuilder out;
  for (const Interval& iv : emitted) out.push(iv.piece, iv.lo, iv.hi);
  return out.finish();
}

}  // namespace

PiecewiseCost min_less(DataIndex prev_end, const PiecewiseCost& f) {
  return running_min<true>(prev_end, f);
}

PiecewiseCost min_more(DataIndex prev_end, const PiecewiseCost& f) {
  return running_min<false>(prev_end, f);
}

PiecewiseCost add_constant(const PiecewiseCost& f, double c) {
  std::vector<Piece> out(f.pieces().begin(), f.pieces().end());
  for (Piece& p : out) p.gamma += c;
  return PieceBuilder::wrap(std::move(out));
}

ArgMinResult arg_min(const PiecewiseCost& f) {
  if (f.empty()) throw DomainError("arg_min of empty function");
  ArgMinResult best;
  best.cost = kInf;
  bool found = false;
  for (const Piece& p : f.pieces()) {
    double mu = p.min_mean;
    double cost;
    if (p.alpha > 0.0 && p.beta < 0.0) {
      mu = std::clamp(-p.beta / p.alpha, p.min_mean, p.max_mean);
      cost = p.value(mu);
    } else if (p.alpha >= 0.0 && p.beta >= 0.0) {
      cost = p.value(mu);
    } else {
      const double left = p.value(p.min_mean);
      const double right = p.value(p.max_mean);
      if (right < left) {
        mu = p.max_mean;
        cost = right;
      } else {
        cost = left;
      }
    }
    if (!found || cost < best.cost) {
      best = {mu, cost, p.prev_end, p.prev_mean};
      found = true;
    }
  }
  return best;
}

BackPointer find_mean(const PiecewiseCost& f, double mu) {
  if (f.empty() || mu < f.domain_min() - kLookupTolerance ||
      mu > f.domain_max() + kLookupTolerance) {
    throw DomainError("find_mean: mean outside function domain");
  }
  for (const Piece& p : f.pieces()) {
    if (p.min_mean - kLookupTolerance <= mu && mu <= p.max_mean + kLookupTolerance) {
      return {p.prev_end, p.prev_mean};
    }
  }
  const Piece& last = f.pieces().back();
  return {last.prev_end, last.prev_mean};
}

PiecewiseCost simplify(const PiecewiseCost& f) {
  std::vector<Piece> out;
  out.reserve(f.size());
  for (const Piece& p : f.pieces()) {
    if (!out.empty()) {
      Piece& last = out.back();
      if (std::abs(last.alpha - p.alpha) <= kMergeTolerance &&
          std::abs(last.beta - p.beta) <= kMergeTolerance &&
          std::abs(last.gamma - p.gamma) <= kMergeTolerance && last.same_pointers(p)) {
        last.max_mean = p.max_mean;
        continue;
      }
    }
    out.push_back(p);
  }
  return PieceBuilder::wrap(std::move(out));
}

}  // namespace peakseg
