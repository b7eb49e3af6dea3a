#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ccm/equilibria.hpp"
#include "ccm/errors.hpp"
#include "ccm/model.hpp"
#include "ccm/sampling.hpp"
#include "oracles.hpp"

using namespace ccm;

namespace {

double max_abs_diff(const Vec3& x, const Vec3& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < 3; ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace

TEST_CASE("parameter validation") {
  ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.0);
  CHECK_NOTHROW(p.validate());
  CHECK(p.l == doctest::Approx(0.45));
  CHECK(p.L == doctest::Approx(1.0 / 3.0));

  ModelParams bad = p;
  bad.L = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.D2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.a = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.alpha = std::nan("");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("string round trips") {
  for (System s : {System::CCM, System::InvaderG, System::ResidentH, System::ResidentH0}) {
    CHECK(parse_system(to_string(s)) == s);
  }
  for (Scenario s : {Scenario::Invader, Scenario::Resident}) {
    CHECK(parse_scenario(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_system("cmm"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("both"), ConfigError);
}

TEST_CASE("reaction examples") {
  const ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.0);
  const Vec3 e4{0.0, 1.0, p.L};
  CHECK(max_abs_diff(reaction(System::CCM, e4, p), {0, 0, 0}) == 0.0);

  const Vec3 f = reaction(System::CCM, Vec3{0.5, 0.5, 0.5}, p);
  CHECK(f[0] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(f[2] == doctest::Approx(0.5 * (1.0 - 0.5 / (1.0 / 3.0 + 9.0 / 40.0))).epsilon(1e-14));
  CHECK(f[2] == doctest::Approx(0.052239).epsilon(1e-5));

  for (double m : {0.0, 0.5, 3.0}) {
    const ModelParams q = ModelParams::baseline(0.7, 1.4, m);
    CHECK(max_abs_diff(reaction(System::InvaderG, Vec3{1.0, 1.0, q.l}, q), {0, 0, 0}) < 1e-15);
  }

  const StateVec s{0.5, 0.5, 0.5};
  CHECK(max_abs_diff(reaction(s, p), f) == 0.0);
}

TEST_CASE("reaction rejects singular denominators") {
  ModelParams p = ModelParams::baseline(1.0, 1.0, 1.0);
  CHECK_THROWS_AS(reaction(System::CCM, Vec3{0.5, 0.5, -1.0}, p), DomainError);
  CHECK_THROWS_AS(jacobian(System::CCM, Vec3{0.5, 0.5, -1.0}, p), DomainError);
  // L + l p1 = 0
  CHECK_THROWS_AS(reaction(System::CCM, Vec3{-p.L / p.l, 0.2, 0.1}, p), DomainError);
  // resident: L + l - l q2 = 0
  CHECK_THROWS_AS(reaction(System::ResidentH, Vec3{0.1, (p.L + p.l) / p.l, 0.0}, p), DomainError);
  // within 1e-12 of zero counts as singular
  CHECK_THROWS_AS(reaction(System::CCM, Vec3{0.5, 0.5, -1.0 + 1e-14}, p), DomainError);
}

TEST_CASE("jacobian examples") {
  ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.5);
  p.alpha = 1.3;
  p.beta = 0.7;
  p.gamma = 2.1;
  const Mat3 J0 = jacobian(System::CCM, Vec3{0, 0, 0}, p);
  const Mat3 diag{{{p.alpha, 0, 0}, {0, p.beta, 0}, {0, 0, p.gamma}}};
  for (std::size_t i = 0; i < 3; ++i) CHECK(max_abs_diff(J0[i], diag[i]) < 1e-15);

  const double K = 1.0 + p.m * p.L;
  const Mat3 Jg = jacobian(System::InvaderG, Vec3{0, 0, 0}, p);
  const Mat3 eq14{{{p.alpha * (1.0 - p.a / K), 0, 0},
                   {p.beta * p.b, -p.beta, 0},
                   {p.gamma * p.l, 0, -p.gamma}}};
  for (std::size_t i = 0; i < 3; ++i) CHECK(max_abs_diff(Jg[i], eq14[i]) < 1e-15);
}

TEST_CASE("jacobian agrees with central differences") {
  CHECK(oracle::jacobian_fd_worst(2024, 100) <= 1e-6);
}

TEST_CASE("transform examples and inverses") {
  const ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.5);
  const Vec3 e4{0.0, 1.0, p.L};
  CHECK(max_abs_diff(to_transformed(Scenario::Invader, e4, p), {0, 0, 0}) == 0.0);
  CHECK(max_abs_diff(to_transformed(Scenario::Resident, e4, p), {1.0, 1.0, p.l}) < 1e-16);
  const Vec3 e6{1.0, 0.0, p.L + p.l};
  CHECK(max_abs_diff(to_transformed(Scenario::Resident, e6, p), {0, 0, 0}) == 0.0);

  const TransformedState t = to_transformed(Scenario::Resident, StateVec{0.2, 0.3, 0.4}, p);
  CHECK(t.tag == Scenario::Resident);
  CHECK(t.q1 == doctest::Approx(0.3));
  CHECK(t.q2 == doctest::Approx(0.8));
  CHECK(t.v == doctest::Approx(p.L + p.l - 0.4));

  Rng rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 x{u(rng), u(rng), u(rng)};
    for (Scenario s : {Scenario::Invader, Scenario::Resident}) {
      CHECK(max_abs_diff(to_original(s, to_transformed(s, x, p), p), x) <= 1e-15);
      CHECK(max_abs_diff(to_transformed(s, to_original(s, x, p), p), x) <= 1e-15);
    }
  }
  CHECK(max_abs_diff(convert(Coordinates::Invader, Coordinates::Resident,
                             to_transformed(Scenario::Invader, e4, p), p),
                     {1.0, 1.0, p.l}) < 1e-15);
}

TEST_CASE("chain-rule consistency of the cooperative forms") {
  Rng rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.2);
  for (int k = 0; k < 500; ++k) {
    const ModelParams p = random_params(rng);
    const Vec3 x{u(rng), u(rng), u(rng)};
    const Vec3 f = reaction(System::CCM, x, p);
    const Vec3 g = reaction(System::InvaderG, to_transformed(Scenario::Invader, x, p), p);
    const Vec3 h = reaction(System::ResidentH, to_transformed(Scenario::Resident, x, p), p);
    const double sc = 1.0 + std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
    CHECK(max_abs_diff(g, {f[0], -f[1], f[2]}) <= 1e-12 * sc);
    CHECK(max_abs_diff(h, {f[1], -f[0], -f[2]}) <= 1e-12 * sc);

    const TransformedState q = to_transformed(Scenario::Invader, StateVec{x[0], x[1], x[2]}, p);
    CHECK(max_abs_diff(reaction(System::InvaderG, q, p), g) == 0.0);
  }
}

TEST_CASE("h0 is h with m = 0 and dominates h on the cooperativity box") {
  ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.5);
  ModelParams p0 = p;
  p0.m = 0.0;
  const Vec3 q{0.3, 0.4, 0.1};
  CHECK(max_abs_diff(reaction(System::ResidentH0, q, p), reaction(System::ResidentH, q, p0)) ==
        0.0);

  for (double m : {0.5, 2.0, 10.0}) {
    p.m = m;
    const int n = 20;
    double worst = -1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const Vec3 x{i / (n - 1.0), j / (n - 1.0), p.l * k / (n - 1.0)};
          const Vec3 h = reaction(System::ResidentH, x, p);
          const Vec3 h0 = reaction(System::ResidentH0, x, p);
          for (std::size_t c = 0; c < 3; ++c) worst = std::max(worst, h[c] - h0[c]);
        }
      }
    }
    CHECK(worst <= 1e-15);
  }
}

TEST_CASE("transformed equilibria are zeros of their systems") {
  Rng rng(3);
  for (int k = 0; k < 300; ++k) {
    const ModelParams p = random_params(rng);
    for (Scenario s : {Scenario::Invader, Scenario::Resident}) {
      const System sys = s == Scenario::Invader ? System::InvaderG : System::ResidentH;
      for (const TransformedEquilibrium& e : transformed_equilibria(p, s)) {
        if (!e.defined || !e.admissible) continue;
        const Vec3 r = reaction(sys, e.coords, p);
        CHECK(std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])}) <= 1e-10);
      }
    }
  }
}

TEST_CASE("cooperativity report examples") {
  ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.5);
  const auto g = cooperativity_report(System::InvaderG, p, {1.0, 1.0, p.l}, 500);
  CHECK(g.min_off_diagonal >= -1e-12);
  CHECK(g.samples == 500);

  const auto h = cooperativity_report(System::ResidentH, p, {1.0, 1.0, p.l}, 500);
  CHECK(h.min_off_diagonal >= -1e-12);
  const auto h0 = cooperativity_report(System::ResidentH0, p, {1.0, 1.0, p.l}, 500);
  CHECK(h0.min_off_diagonal >= -1e-12);

  const auto f = cooperativity_report(System::CCM, p, {1.0, 1.0, 1.0}, 500);
  CHECK(f.min_off_diagonal < 0.0);
  CHECK(f.row != f.col);
  const Mat3 J = jacobian(System::CCM, f.witness, p);
  CHECK(J[f.row][f.col] == f.min_off_diagonal);

  CHECK_THROWS(cooperativity_report(System::InvaderG, p, {1.0, 1.0, p.l}, 0));
}
