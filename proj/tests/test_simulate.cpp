#include "pplr/chi2.hpp"
#include "pplr/error.hpp"
#include "pplr/simulate.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pplr;

TEST_CASE("true coefficients follow the local alternative") {
    SimDesign d;
    d.n = 400;
    d.p = 30;
    d.delta = 2.0;
    const Vector b = true_coefficients(d);
    REQUIRE(b.size() == 30);
    CHECK(b[0] == doctest::Approx(0.1));
    CHECK(b[1] == 3.0);
    CHECK(b[2] == 1.5);
    CHECK(b[3] == 2.0);
    CHECK(b[4] == 1.0);
    CHECK(b.tail(25).isZero());
}

TEST_CASE("design validation") {
    SimDesign d;
    d.p = 4;
    CHECK_THROWS_AS(d.validate(), ContractViolation);
    d = SimDesign{};
    d.n = 11;
    CHECK_THROWS_AS(d.validate(), ContractViolation);
    d = SimDesign{};
    d.alpha = 1.0;
    CHECK_THROWS_AS(d.validate(), ContractViolation);
    CHECK_NOTHROW(SimDesign{}.validate());
}

TEST_CASE("replicates are reproducible, distinct, and standardized") {
    SimDesign d;
    const Replicate a = generate(d, 3);
    const Replicate b = generate(d, 3);
    const Replicate c = generate(d, 4);
    CHECK(a.data.X == b.data.X);
    CHECK(a.data.y == b.data.y);
    CHECK(a.data.X != c.data.X);
    CHECK(generate(d, 3, 1).data.X != a.data.X);
    for (int j = 0; j < d.p; ++j) {
        CHECK(std::abs(a.data.X.col(j).mean()) < 1e-12);
        CHECK(a.data.X.col(j).squaredNorm() == doctest::Approx(d.n));
    }
    CHECK(std::abs(a.data.y.mean()) < 1e-12);

    d.example = Example::LogisticEx2;
    const Replicate l = generate(d, 0);
    CHECK(l.data.family == Family::BernoulliLogit);
    CHECK((l.data.y.array() * (1.0 - l.data.y.array())).isZero());
}

TEST_CASE("substreams depend on every key component") {
    auto draw = [](std::mt19937_64 g) { return g(); };
    const auto base = draw(substream(1, 2, 3, 4));
    CHECK(draw(substream(1, 2, 3, 4)) == base);
    CHECK(draw(substream(9, 2, 3, 4)) != base);
    CHECK(draw(substream(1, 9, 3, 4)) != base);
    CHECK(draw(substream(1, 2, 9, 4)) != base);
    CHECK(draw(substream(1, 2, 3, 9)) != base);
}

TEST_CASE("estimation metrics") {
    Vector truth(5), est(5);
    truth << 0.0, 3.0, 0.0, 1.0, 0.0;
    est << 0.5, 2.0, 0.0, 0.0, 0.0;
    const Metrics m = metrics(est, truth);
    CHECK(m.l2 == doctest::Approx(std::sqrt(0.25 + 1.0 + 1.0)));
    CHECK(m.l1 == doctest::Approx(2.5));
    CHECK(m.correct_zeros == 2);
    CHECK(m.incorrect_zeros == 1);
    // every zero estimate is counted exactly once
    CHECK(m.correct_zeros + m.incorrect_zeros + (est.array() != 0.0).count() == 5);
}

TEST_CASE("QQ points use (i - 0.5) / m plotting positions") {
    const std::vector<double> s{3.0, 0.5, 1.0, 0.1};
    const auto qq = qq_data(s, 1);
    REQUIRE(qq.size() == 4);
    CHECK(qq[0].empirical == 0.1);
    CHECK(qq[3].empirical == 3.0);
    CHECK(qq[0].theoretical == doctest::Approx(chi2_quantile(0.125, 1)));
    CHECK(qq[3].theoretical == doctest::Approx(chi2_quantile(0.875, 1)));
    CHECK_THROWS_AS(qq_data({}, 1), ContractViolation);
}

TEST_CASE("KS distance against a direct empirical CDF sweep") {
    std::mt19937_64 rng(5);
    std::chi_squared_distribution<double> chi(1.0);
    std::vector<double> s(300);
    for (double& v : s) v = chi(rng);
    boost::math::chi_squared dist(1.0);
    std::vector<double> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    double ref = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = boost::math::cdf(dist, sorted[i]);
        const double below = static_cast<double>(i) / 300.0;
        const double at = static_cast<double>(i + 1) / 300.0;
        ref = std::max({ref, std::abs(at - F), std::abs(F - below)});
    }
    CHECK(ks_distance_chi2(s, 1) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(ks_distance_chi2(std::vector<double>(50, 0.0), 1) == doctest::Approx(1.0));
}

TEST_CASE("study output does not depend on the thread count") {
    SimDesign d;
    d.n_reps = 12;
    d.delta = 1.0;
    StudyOptions one, many;
    one.threads = 1;
    many.threads = 3;
    const SimReport a = run_study(d, {Method::PPL, Method::PL, Method::OL}, one);
    const SimReport b = run_study(d, {Method::PPL, Method::PL, Method::OL}, many);
    REQUIRE(a.methods.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(a.methods[k].statistics == b.methods[k].statistics);
        CHECK(a.methods[k].l2.mean == b.methods[k].l2.mean);
        CHECK(a.methods[k].rejections == b.methods[k].rejections);
    }
}

TEST_CASE("single replicate has no standard deviations") {
    SimDesign d;
    d.n_reps = 1;
    const SimReport r = run_study(d, {Method::PPL});
    REQUIRE(r.methods.size() == 1);
    CHECK(!r.methods[0].l2.sd);
    CHECK(r.methods[0].replicates == 1);
}

TEST_CASE("null study at (100, 11): PPLR size in a Monte-Carlo band, PLR conservative") {
    SimDesign d;
    d.n_reps = 200;
    const SimReport r = run_study(d, {Method::PPL, Method::PL, Method::OL});
    REQUIRE(r.methods.size() == 3);
    for (const MethodReport& m : r.methods) {
        CHECK(m.replicates == 200);
        CHECK(m.ic.mean == 0.0);
    }
    const MethodReport& ppl = r.methods[0];
    const MethodReport& pl = r.methods[1];
    CHECK(ppl.rejection_rate >= 0.02);
    CHECK(ppl.rejection_rate <= 0.09);
    CHECK(pl.rejection_rate < ppl.rejection_rate);
    // point mass at zero for the fully penalized statistic, none to speak of for PPLR
    const auto pl_zeros = std::count(pl.statistics.begin(), pl.statistics.end(), 0.0);
    const auto ppl_zeros = std::count(ppl.statistics.begin(), ppl.statistics.end(), 0.0);
    CHECK(pl_zeros >= 40);
    CHECK(ppl_zeros <= 5);
    CHECK(r.failures == 0);
}

TEST_CASE("logistic study completes") {
    SimDesign d;
    d.example = Example::LogisticEx2;
    d.n = 200;
    d.n_reps = 10;
    const SimReport r = run_study(d, {Method::PPL, Method::OL});
    CHECK(r.failures == 0);
    for (const MethodReport& m : r.methods) CHECK(m.statistics.size() == 10);
}

TEST_CASE("method names") {
    CHECK(method_from_string("pplr") == Method::PPL);
    CHECK(method_from_string("OL") == Method::OL);
    CHECK(std::string(test_name(Method::OL)) == "LR");
    CHECK_THROWS_AS(method_from_string("x"), ContractViolation);
}
