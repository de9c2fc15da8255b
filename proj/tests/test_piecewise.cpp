#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "peakseg/errors.hpp"
#include "peakseg/piecewise.hpp"
#include "test_support.hpp"

using namespace peakseg;
using peakseg::testing::close;
using peakseg::testing::grid;
using peakseg::testing::piece_on;
using peakseg::testing::random_cost;

namespace {

const double kMin22 = 2.0 - 2.0 * std::log(2.0);

void check_contiguous(const PiecewiseCost& f, double lo, double hi) {
  REQUIRE_FALSE(f.empty());
  CHECK(f.domain_min() == lo);
  CHECK(f.domain_max() == hi);
  const auto ps = f.pieces();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    CHECK(ps[k].min_mean <= ps[k].max_mean);
    if (k + 1 < ps.size()) CHECK(ps[k].max_mean == ps[k + 1].min_mean);
  }
}

}  // namespace

TEST_CASE("one_piece coefficients") {
  const PiecewiseCost a = one_piece(2, 1, 0.5, 4);
  REQUIRE(a.size() == 1);
  CHECK(a.pieces()[0].alpha == 1);
  CHECK(a.pieces()[0].beta == -2);
  CHECK(a.pieces()[0].gamma == 0);
  CHECK(a.domain_min() == 0.5);
  CHECK(a.domain_max() == 4);
  CHECK(a.pieces()[0].prev_end == kNoIndex);
  CHECK(a.pieces()[0].is_equality());

  const PiecewiseCost b = one_piece(0, 3, 0, 5);
  CHECK(b.pieces()[0].alpha == 3);
  CHECK(b.pieces()[0].beta == 0);

  const PiecewiseCost c = one_piece(4, 2, 0, 4);
  CHECK(c.pieces()[0].alpha == 2);
  CHECK(c.pieces()[0].beta == -8);

  CHECK_THROWS_AS(one_piece(1, 1, 3, 2), DomainError);
}

TEST_CASE("evaluate") {
  const PiecewiseCost f = piece_on(1, -2, 0, 0.5, 4);
  CHECK(evaluate(f, 1) == doctest::Approx(1));
  CHECK(evaluate(f, 2) == doctest::Approx(0.613706).epsilon(1e-6));
  CHECK(evaluate(piece_on(3, 0, 0, 0, 5), 0) == 0);
  CHECK(std::isinf(evaluate(piece_on(1, -1, 0, 0, 5), 0)));
  CHECK_THROWS_AS(evaluate(f, 0.25), DomainError);
  CHECK_THROWS_AS(evaluate(f, 4.5), DomainError);

  // shared boundary uses the left piece
  const PiecewiseCost step = min_of_two(piece_on(1, 0, 0, 0.5, 4), piece_on(0, 0, 2, 0.5, 4));
  REQUIRE(step.size() == 2);
  CHECK(evaluate(step, 2) == doctest::Approx(2));
}

TEST_CASE("add") {
  const PiecewiseCost s = add(one_piece(2, 1, 0.5, 4), one_piece(3, 1, 0.5, 4));
  REQUIRE(s.size() == 1);
  CHECK(s.pieces()[0].alpha == 2);
  CHECK(s.pieces()[0].beta == -5);
  CHECK(s.pieces()[0].gamma == 0);

  SUBCASE("breakpoints of f are kept") {
    const PiecewiseCost f = min_of_two(piece_on(1, 0, 0, 0.5, 4), piece_on(0, 0, 2, 0.5, 4));
    const PiecewiseCost h = add(f, one_piece(1, 1, 0.5, 4));
    REQUIRE(h.size() == f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
      CHECK(h.pieces()[k].min_mean == f.pieces()[k].min_mean);
      CHECK(h.pieces()[k].max_mean == f.pieces()[k].max_mean);
    }
  }

  SUBCASE("back-pointers come from the first operand") {
    const PiecewiseCost f = min_less(7, one_piece(2, 1, 0.5, 4));
    const PiecewiseCost h = add(f, one_piece(3, 1, 0.5, 4));
    for (const Piece& p : h.pieces()) CHECK(p.prev_end == 7);
  }

  SUBCASE("grid oracle") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
      const PiecewiseCost f = random_cost(rng);
      const PiecewiseCost g = random_cost(rng);
      const PiecewiseCost h = add(f, g);
      check_contiguous(h, 0.5, 8.0);
      for (double mu : grid(0.5, 8.0, 100)) {
        CHECK(close(evaluate(h, mu), evaluate(f, mu) + evaluate(g, mu), 1e-12 * (1 + std::abs(evaluate(h, mu)))));
      }
    }
  }

  CHECK_THROWS_AS(add(one_piece(1, 1, 0.5, 4), one_piece(1, 1, 0.5, 5)), DomainError);
}

TEST_CASE("min_of_two") {
  const PiecewiseCost one = piece_on(0, 0, 1, 0.5, 4);
  const PiecewiseCost two = piece_on(0, 0, 2, 0.5, 4);
  const PiecewiseCost m = min_of_two(one, two);
  REQUIRE(m.size() == 1);
  CHECK(m.pieces()[0].gamma == 1);

  const PiecewiseCost lin = min_of_two(piece_on(1, 0, 0, 0.5, 4), two);
  REQUIRE(lin.size() == 2);
  CHECK(lin.pieces()[0].alpha == 1);
  CHECK(lin.pieces()[0].min_mean == 0.5);
  CHECK(lin.pieces()[0].max_mean == doctest::Approx(2));
  CHECK(lin.pieces()[1].gamma == 2);
  CHECK(lin.pieces()[1].max_mean == 4);

  SUBCASE("active operand supplies back-pointers") {
    const PiecewiseCost f = min_more(3, piece_on(1, 0, 0, 0.5, 4));
    const PiecewiseCost g = min_less(9, piece_on(0, 0, 2, 0.5, 4));
    const PiecewiseCost h = min_of_two(f, g);
    CHECK(find_mean(h, 1.0).prev_end == 3);
    CHECK(find_mean(h, 3.0).prev_end == 9);
  }

  SUBCASE("exact ties go to the second operand") {
    const PiecewiseCost f = min_less(3, piece_on(0, 0, 1, 0.5, 4));
    const PiecewiseCost g = min_less(5, piece_on(0, 0, 1, 0.5, 4));
    const PiecewiseCost h = min_of_two(f, g);
    REQUIRE(h.size() == 1);
    CHECK(h.pieces()[0].prev_end == 5);
  }

  SUBCASE("grid oracle and crossing roots") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 100; ++rep) {
      const PiecewiseCost f = random_cost(rng);
      const PiecewiseCost g = random_cost(rng);
      const PiecewiseCost h = min_of_two(f, g);
      check_contiguous(h, 0.5, 8.0);
      for (double mu : grid(0.5, 8.0, 200)) {
        const double want = std::min(evaluate(f, mu), evaluate(g, mu));
        CHECK(close(evaluate(h, mu), want, 1e-9 * (1 + std::abs(want))));
      }
      for (const Piece& p : f.pieces()) {
        for (const Piece& q : g.pieces()) {
          const double lo = std::max(p.min_mean, q.min_mean);
          const double hi = std::min(p.max_mean, q.max_mean);
          if (!(lo < hi)) continue;
          const auto roots = crossing_points(p, q, lo, hi);
          CHECK(roots.size() <= 2);
          for (double r : roots) {
            CHECK(r > lo);
            CHECK(r < hi);
            CHECK(std::abs(p.value(r) - q.value(r)) <= 1e-8 * (1 + std::abs(p.value(r))));
          }
        }
      }
    }
  }
}

TEST_CASE("crossing roots in the closed-form cases") {
  Piece p;
  p.alpha = 1;
  Piece q;
  q.gamma = 2;
  auto r = crossing_points(p, q, 0.5, 4);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(2));

  // equal alpha: beta difference only, root at exp(-dgamma/dbeta)
  Piece a;
  a.alpha = 1;
  a.beta = -1;
  Piece b;
  b.alpha = 1;
  b.gamma = -1;
  r = crossing_points(a, b, 0.5, 4);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == doctest::Approx(std::exp(1.0)));

  // two roots of x - 3 log x + c
  Piece c;
  c.alpha = 1;
  c.beta = -3;
  Piece d;
  d.gamma = c.value(3.0) + 0.5;
  r = crossing_points(c, d, 0.01, 50);
  REQUIRE(r.size() == 2);
  CHECK(r[0] < 3);
  CHECK(r[1] > 3);
}

TEST_CASE("min_less") {
  const PiecewiseCost g = min_less(7, piece_on(1, -2, 0, 0.5, 4));
  REQUIRE(g.size() == 2);
  const Piece& left = g.pieces()[0];
  const Piece& right = g.pieces()[1];
  CHECK(left.alpha == 1);
  CHECK(left.beta == -2);
  CHECK(left.min_mean == 0.5);
  CHECK(left.max_mean == doctest::Approx(2));
  CHECK(left.is_equality());
  CHECK(left.prev_end == 7);
  CHECK(right.alpha == 0);
  CHECK(right.beta == 0);
  CHECK(right.gamma == doctest::Approx(kMin22).epsilon(1e-12));
  CHECK(right.prev_mean == doctest::Approx(2));
  CHECK(right.prev_end == 7);

  SUBCASE("non-increasing input only gets new pointers") {
    const PiecewiseCost f = piece_on(1, -10, 0, 0.5, 4);  // minimum at 10
    const PiecewiseCost h = min_less(4, f);
    REQUIRE(h.size() == 1);
    CHECK(h.pieces()[0].alpha == 1);
    CHECK(h.pieces()[0].beta == -10);
    CHECK(h.pieces()[0].prev_end == 4);
    CHECK(h.pieces()[0].is_equality());
  }

  SUBCASE("grid oracle and monotonicity") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 100; ++rep) {
      const PiecewiseCost f = random_cost(rng);
      const PiecewiseCost h = min_less(2, f);
      check_contiguous(h, 0.5, 8.0);
      const auto xs = grid(0.5, 8.0, 500);
      double running = evaluate(f, xs[0]);
      double prev = evaluate(h, xs[0]);
      for (double x : xs) {
        running = std::min(running, evaluate(f, x));
        const double got = evaluate(h, x);
        CHECK(got <= running + 1e-6);
        CHECK(got <= prev + 1e-10);
        prev = got;
      }
      for (const Piece& p : h.pieces()) CHECK(p.prev_end == 2);
    }
  }
}

TEST_CASE("min_less against a fine grid minimum") {
  // Grid includes each piece start and clipped stationary point, so the
  // grid running minimum is exact.
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 100; ++rep) {
    const PiecewiseCost f = random_cost(rng);
    const PiecewiseCost h = min_less(1, f);
    std::vector<double> xs = grid(0.5, 8.0, 500);
    for (const Piece& p : f.pieces()) {
      xs.push_back(p.min_mean);
      if (p.alpha > 0) xs.push_back(std::clamp(-p.beta / p.alpha, p.min_mean, p.max_mean));
    }
    std::sort(xs.begin(), xs.end());
    double running = std::numeric_limits<double>::infinity();
    for (double x : xs) {
      running = std::min(running, evaluate(f, x));
      CHECK(close(evaluate(h, x), running, 1e-6));
    }
  }
}

TEST_CASE("min_more") {
  const PiecewiseCost g = min_more(3, piece_on(1, -2, 0, 0.5, 4));
  REQUIRE(g.size() == 2);
  const Piece& left = g.pieces()[0];
  const Piece& right = g.pieces()[1];
  CHECK(left.alpha == 0);
  CHECK(left.gamma == doctest::Approx(kMin22).epsilon(1e-12));
  CHECK(left.prev_mean == doctest::Approx(2));
  CHECK(left.max_mean == doctest::Approx(2));
  CHECK(right.alpha == 1);
  CHECK(right.beta == -2);
  CHECK(right.is_equality());
  CHECK(left.prev_end == 3);
  CHECK(right.prev_end == 3);

  SUBCASE("non-decreasing input only gets new pointers") {
    const PiecewiseCost h = min_more(6, piece_on(1, 0, 0, 0.5, 4));
    REQUIRE(h.size() == 1);
    CHECK(h.pieces()[0].prev_end == 6);
    CHECK(h.pieces()[0].is_equality());
  }

  SUBCASE("grid oracle and monotonicity") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 100; ++rep) {
      const PiecewiseCost f = random_cost(rng);
      const PiecewiseCost h = min_more(2, f);
      check_contiguous(h, 0.5, 8.0);
      std::vector<double> xs = grid(0.5, 8.0, 500);
      for (const Piece& p : f.pieces()) {
        xs.push_back(p.min_mean);
        if (p.alpha > 0) xs.push_back(std::clamp(-p.beta / p.alpha, p.min_mean, p.max_mean));
      }
      std::sort(xs.begin(), xs.end());
      double running = std::numeric_limits<double>::infinity();
      for (auto it = xs.rbegin(); it != xs.rend(); ++it) {
        running = std::min(running, evaluate(f, *it));
        CHECK(close(evaluate(h, *it), running, 1e-6));
      }
      const auto g2 = grid(0.5, 8.0, 500);
      for (std::size_t k = 1; k < g2.size(); ++k) {
        CHECK(evaluate(h, g2[k]) >= evaluate(h, g2[k - 1]) - 1e-10);
      }
    }
  }
}

TEST_CASE("min_less and min_more with a zero lower bound") {
  const PiecewiseCost f = add(one_piece(0, 1, 0, 5), one_piece(3, 2, 0, 5));  // min at 2
  const PiecewiseCost l = min_less(1, f);
  const PiecewiseCost r = min_more(1, f);
  CHECK(std::isinf(evaluate(l, 0)));
  CHECK(evaluate(r, 0) == doctest::Approx(evaluate(f, 2)));
  CHECK(evaluate(l, 5) == doctest::Approx(evaluate(f, 2)));
}

TEST_CASE("add_constant") {
  const PiecewiseCost c = add_constant(piece_on(0, 0, 1, 0, 3), 10);
  CHECK(c.pieces()[0].gamma == 11);
  std::mt19937_64 rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    const PiecewiseCost f = min_less(5, random_cost(rng));
    CHECK(add_constant(f, 0) == f);
    const PiecewiseCost g = add_constant(f, 2.5);
    for (std::size_t k = 0; k < f.size(); ++k) {
      CHECK(g.pieces()[k].prev_end == f.pieces()[k].prev_end);
    }
    for (double mu : grid(0.5, 8.0, 50)) {
      CHECK(evaluate(g, mu) == doctest::Approx(evaluate(f, mu) + 2.5).epsilon(1e-14));
    }
  }
}

TEST_CASE("arg_min") {
  const ArgMinResult a = arg_min(piece_on(1, -2, 0, 0.5, 4));
  CHECK(a.mean == doctest::Approx(2));
  CHECK(a.cost == doctest::Approx(kMin22).epsilon(1e-12));

  const ArgMinResult b = arg_min(piece_on(0, 0, 5, 0, 3));
  CHECK(b.mean == 0);
  CHECK(b.cost == 5);

  // minimizer clipped to the domain
  CHECK(arg_min(piece_on(1, -10, 0, 0.5, 4)).mean == 4);

  std::mt19937_64 rng(47);
  for (int rep = 0; rep < 100; ++rep) {
    const PiecewiseCost f = random_cost(rng);
    const ArgMinResult r = arg_min(f);
    // coarse 1000-point grid, then a second 1000-point grid around its best cell
    const auto coarse = grid(0.5, 8.0, 1000);
    std::size_t at = 0;
    for (std::size_t k = 1; k < coarse.size(); ++k) {
      if (evaluate(f, coarse[k]) < evaluate(f, coarse[at])) at = k;
    }
    const double best_coarse = evaluate(f, coarse[at]);
    double best = best_coarse;
    const double lo = coarse[at == 0 ? 0 : at - 1];
    const double hi = coarse[std::min(at + 1, coarse.size() - 1)];
    for (double mu : grid(lo, hi, 1000)) best = std::min(best, evaluate(f, mu));
    CHECK(r.cost <= best_coarse + 1e-12);
    CHECK(std::abs(r.cost - best) <= 1e-6);
    CHECK(r.mean >= 0.5);
    CHECK(r.mean <= 8.0);
    CHECK(evaluate(f, r.mean) == doctest::Approx(r.cost).epsilon(1e-12));
    const BackPointer bp = find_mean(f, r.mean);
    CHECK(bp.prev_end == r.prev_end);
  }
}

TEST_CASE("find_mean") {
  std::vector<Piece> ps(2);
  ps[0] = {0, 0, 1, 0.5, 2, 7, 1.5};
  ps[1] = {1, 0, -1, 2, 4, 9, kEqualityMean};
  const PiecewiseCost f(ps);
  const BackPointer a = find_mean(f, 1.0);
  CHECK(a.prev_end == 7);
  CHECK(a.prev_mean == 1.5);
  CHECK(find_mean(f, 2.0).prev_end == 7);
  CHECK(find_mean(f, 2.0 + 1e-11).prev_end == 7);  // within boundary tolerance
  CHECK(find_mean(f, 3.0).prev_end == 9);
  CHECK(find_mean(f, 3.0).prev_mean == kEqualityMean);
  CHECK_THROWS_AS(find_mean(f, 5.0), DomainError);

  const ArgMinResult m = arg_min(min_less(4, piece_on(1, -2, 0, 0.5, 4)));
  const BackPointer bp = find_mean(min_less(4, piece_on(1, -2, 0, 0.5, 4)), m.mean);
  CHECK(bp.prev_end == m.prev_end);
  CHECK((bp.prev_mean == m.prev_mean || (std::isinf(bp.prev_mean) && std::isinf(m.prev_mean))));
}

TEST_CASE("simplify") {
  std::vector<Piece> ps(2);
  ps[0] = {0, 0, 1, 0, 1, 3, 1.0};
  ps[1] = {0, 0, 1, 1, 2, 3, 1.0};
  const PiecewiseCost merged = simplify(PiecewiseCost(ps));
  REQUIRE(merged.size() == 1);
  CHECK(merged.domain_min() == 0);
  CHECK(merged.domain_max() == 2);

  ps[1].prev_end = 4;
  CHECK(simplify(PiecewiseCost(ps)).size() == 2);

  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 50; ++rep) {
    const PiecewiseCost f = min_of_two(min_less(1, random_cost(rng)), random_cost(rng));
    const PiecewiseCost s = simplify(f);
    CHECK(s.size() <= f.size());
    check_contiguous(s, 0.5, 8.0);
    for (double mu : grid(0.5, 8.0, 200)) {
      CHECK(close(evaluate(s, mu), evaluate(f, mu), 1e-10));
    }
  }
}

TEST_CASE("invalid piece lists are rejected") {
  std::vector<Piece> ps(2);
  ps[0] = {0, 0, 1, 0, 1, kNoIndex, kEqualityMean};
  ps[1] = {0, 0, 1, 1.5, 2, kNoIndex, kEqualityMean};
  CHECK_THROWS_AS(PiecewiseCost{ps}, DomainError);
  CHECK_THROWS_AS(PiecewiseCost(std::vector<Piece>{}), DomainError);
}
