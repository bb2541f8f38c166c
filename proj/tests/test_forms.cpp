#include "helpers.hpp"

#include <doctest.h>

using namespace shiftlab;
using namespace testing_helpers;

TEST_CASE("monomial order within a degree") {
  auto m = monomials(2, 2);
  REQUIRE(m.size() == 3);
  CHECK(m[0] == ev({2, 0}));
  CHECK(m[1] == ev({1, 1}));
  CHECK(m[2] == ev({0, 2}));
  CHECK(ev({1, 0}) < ev({2, 0}));
  auto m3 = monomials(3, 2);
  for (std::size_t i = 1; i < m3.size(); ++i) CHECK(m3[i - 1] < m3[i]);
}

TEST_CASE("eval_form examples") {
  CHECK(eval_form(make_form(1, 2, {{1, {2}}}), {Rational(3)}) == 9);
  CHECK(eval_form(make_form(2, 2, {{1, {1, 1}}}), {Rational(2), Rational(5)}) == 10);
  std::vector<Rational> ones(5, Rational(1));
  CHECK(eval_form(signature_quadratic(), ones) == -1);
  CHECK_THROWS_AS(eval_form(signature_quadratic(), {Rational(1)}), DimensionMismatch);
}

TEST_CASE("form invariants reject bad input") {
  CHECK_THROWS_AS(make_form(2, 2, {{1, {1, 0}}}), InvalidArgument);
  CHECK_THROWS_AS(make_form(2, 1, {{1, {1, 0}}}), InvalidArgument);
  Form f = make_form(2, 2, {{1, {2, 0}}, {-1, {2, 0}}, {3, {0, 2}}});
  CHECK(f.terms().size() == 1);
}

TEST_CASE("gradient examples") {
  auto g = gradient(make_form(1, 2, {{1, {2}}}));
  REQUIRE(g.size() == 1);
  CHECK(g[0] == Polynomial(1, {{ev({1}), Rational(2)}}));
  auto g2 = gradient(make_form(2, 2, {{1, {1, 1}}}));
  CHECK(g2[0] == Polynomial(2, {{ev({0, 1}), Rational(1)}}));
  CHECK(g2[1] == Polynomial(2, {{ev({1, 0}), Rational(1)}}));
  auto g3 = gradient(make_form(1, 3, {{1, {3}}}));
  CHECK(g3[0] == Polynomial(1, {{ev({2}), Rational(3)}}));
}

TEST_CASE("rescale_to_dfactorial examples") {
  auto r1 = rescale_to_dfactorial(FormSystem({make_form(1, 2, {{1, {2}}})}, 0));
  CHECK(r1.multipliers[0] == 2);
  CHECK(r1.system.form(0) == make_form(1, 2, {{2, {2}}}));
  CHECK(r1.system.rescaled());
  auto r2 = rescale_to_dfactorial(FormSystem({make_form(1, 2, {{2, {2}}})}, 0));
  CHECK(r2.multipliers[0] == 1);
  auto r3 = rescale_to_dfactorial(FormSystem({make_form(2, 3, {{1, {3, 0}}, {1, {0, 3}}})}, 0));
  CHECK(r3.multipliers[0] == 6);
  CHECK(r3.system.form(0) == make_form(2, 3, {{6, {3, 0}}, {6, {0, 3}}}));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto r = rescale_to_dfactorial(FormSystem({random_form(3, 3, rng, 20)}, 0));
    for (const auto& [e, c] : r.system.form(0).terms()) CHECK(c % 6 == 0);
  }
}

TEST_CASE("taylor_shift examples") {
  auto e1 = taylor_shift(FormSystem({make_form(1, 2, {{1, {2}}})}, 0));
  CHECK(e1.coeff(0, ev({1})) == 2);
  CHECK(e1.coeff(0, ev({2})) == 1);
  CHECK(e1.value_at_ones(0) == 1);
  auto e2 = taylor_shift(FormSystem({make_form(2, 2, {{1, {1, 1}}})}, 0));
  CHECK(e2.coeff(0, ev({1, 0})) == 1);
  CHECK(e2.coeff(0, ev({0, 1})) == 1);
  CHECK(e2.coeff(0, ev({1, 1})) == 1);
  CHECK(e2.coeff(0, ev({2, 0})) == 0);
  CHECK(e2.mu_power(ev({1, 0})) == 1);
}

TEST_CASE("Taylor reconstruction matches direct evaluation exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const unsigned d = 2 + trial % 3;
    Form f = random_form(n, d, rng);
    auto exp = taylor_shift(FormSystem({f}, 0));
    const Rational mu = trial == 0 ? Rational(1, 3) : random_rational(rng);
    std::vector<Rational> x(n), shifted(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = random_rational(rng);
      shifted[i] = x[i] + mu;
    }
    CHECK(taylor_reconstruct(exp, 0, mu, x) == eval_form(f, shifted));
  }
}

TEST_CASE("slice examples and invariants") {
  auto exp = taylor_shift(FormSystem({signature_quadratic()}, 0));
  Polynomial s1 = slice(exp, 0, 1);
  Polynomial expected(5);
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<std::uint32_t> e(5, 0);
    e[i] = 1;
    expected.add_term(ev(e), Rational(i < 2 ? 2 : -2));
  }
  CHECK(s1 == expected);
  CHECK(s1 == directional_derivative_ones(signature_quadratic()));

  Form x1x2 = make_form(2, 2, {{1, {1, 1}}});
  CHECK(slice(taylor_shift(FormSystem({x1x2}, 0)), 0, 2) == Polynomial::from_form(x1x2));

  auto cube = taylor_shift(FormSystem({make_form(1, 3, {{1, {3}}})}, 0));
  CHECK(slice(cube, 0, 2) == Polynomial(1, {{ev({2}), Rational(3)}}));

  CHECK_THROWS_AS(slice(exp, 1, 1), InvalidArgument);
  CHECK_THROWS_AS(slice(exp, 0, 3), InvalidArgument);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 15; ++trial) {
    Form f = random_form(3, 2 + trial % 3, rng);
    auto e = taylor_shift(FormSystem({f}, 0));
    CHECK(slice(e, 0, f.d()) == Polynomial::from_form(f));
    CHECK(slice(e, 0, f.d() - 1) == directional_derivative_ones(f));
  }
}

TEST_CASE("slice_matrix examples") {
  auto e1 = taylor_shift(FormSystem({make_form(2, 2, {{1, {2, 0}}, {1, {0, 2}}})}, 0));
  IntMatrix c = slice_matrix(e1, 2);
  REQUIRE(c.rows() == 3);
  REQUIRE(c.cols() == 1);
  CHECK(c(0, 0) == 1);
  CHECK(c(1, 0) == 0);
  CHECK(c(2, 0) == 1);
  IntMatrix c1 = slice_matrix(taylor_shift(FormSystem({make_form(2, 2, {{1, {1, 1}}})}, 0)), 1);
  CHECK(c1(0, 0) == 1);
  CHECK(c1(1, 0) == 1);
  auto e2 = taylor_shift(FormSystem({make_form(2, 2, {{1, {2, 0}}}), make_form(2, 2, {{1, {0, 2}}})}, 0));
  CHECK(rank(slice_matrix(e2, 2)) == 2);
}

TEST_CASE("independent_degrees examples") {
  CHECK(independent_degrees(taylor_shift(FormSystem({signature_quadratic()}, 0))) == std::set<unsigned>{1, 2});
  // (x1 - x2)^3 + (x3 - x4)^3 has a vanishing degree-2 slice.
  Form::Terms t;
  for (std::size_t off : {0u, 2u}) {
    for (unsigned a = 0; a <= 3; ++a) {
      std::vector<std::uint32_t> e(4, 0);
      e[off] = a;
      e[off + 1] = 3 - a;
      t[ExponentVector(e)] += binomial(3, a) * ((3 - a) % 2 ? -1 : 1);
    }
  }
  auto s = independent_degrees(taylor_shift(FormSystem({Form(4, 3, t)}, 0)));
  CHECK(s.count(2) == 0);
  CHECK(s.count(3) == 1);
  CHECK(slice(taylor_shift(FormSystem({Form(4, 3, t)}, 0)), 0, 2).is_zero());

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Form f = random_form(3, 3, rng);
    Form g = random_form(3, 3, rng);
    auto base = independent_degrees(taylor_shift(FormSystem({f, g}, 0)));
    CHECK(base.count(3) == (rank(slice_matrix(taylor_shift(FormSystem({f, g}, 0)), 3)) == 2));
    auto scaled = independent_degrees(taylor_shift(FormSystem({f.scaled(-7), g.scaled(-7)}, 0)));
    CHECK(base == scaled);
  }
}

TEST_CASE("check_hypotheses examples") {
  auto rep = check_hypotheses(FormSystem({signature_quadratic()}, 0));
  CHECK(rep.numvars_ok);
  CHECK(rep.numvars_threshold == 4);
  CHECK(rep.gradient_slice_ok);
  CHECK(rep.top_slice_ok);
  CHECK(rep.kappa == Rational(5, 2));
  CHECK(rep.kappa_exceeds_R_plus_1);
  CHECK(rep.sigma_probe.points == 200);
  CHECK(rep.sigma_probe.min_rank == 1);

  auto rep4 = check_hypotheses(FormSystem({signature_quadratic(4)}, 0));
  CHECK_FALSE(rep4.numvars_ok);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t R = 1 + rng() % 2;
    const unsigned d = 2 + rng() % 2;
    const std::size_t n = 1 + rng() % 40;
    const std::int64_t sigma = static_cast<std::int64_t>(rng() % (n + 1));
    std::vector<Form> forms;
    for (std::size_t k = 0; k < R; ++k) {
      std::vector<std::uint32_t> e(n, 0);
      e[k % n] = d;
      forms.push_back(Form(n, d, {{ExponentVector(e), BigInt(1 + k)}}));
    }
    ProbeOptions probe;
    probe.points = 0;
    auto r = check_hypotheses(FormSystem(forms, sigma), probe);
    const long long threshold = sigma + static_cast<long long>(R * (R + 1) * (d - 1)) * (1LL << (d - 1));
    CHECK(r.numvars_ok == (static_cast<long long>(n) > threshold));
  }
}

TEST_CASE("form document round trip and errors") {
  FormSystem sys({signature_quadratic()}, 0);
  FormSystem back = parse_form_document(form_document(sys));
  CHECK(back.form(0) == sys.form(0));
  CHECK(back.sigma() == 0);
  CHECK_THROWS_AS(parse_form_document("{\"n\": 2}"), ParseError);
  CHECK_THROWS_AS(parse_form_document("not json"), ParseError);
  CHECK_THROWS_AS(parse_form_document(R"({"n":2,"d":2,"sigma":0,"forms":[[{"coeff":"x1","exps":[2,0]}]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_form_document(R"({"n":2,"d":2,"sigma":0,"forms":[[{"coeff":"1","exps":[2]}]]})"),
                  ParseError);
  FormSystem big = parse_form_document(
      R"({"n":1,"d":2,"sigma":0,"forms":[[{"coeff":"123456789012345678901234567890","exps":[2]}]]})");
  CHECK(big.form(0).terms().begin()->second == BigInt("123456789012345678901234567890"));
}
