#include "kirchlog/energy.hpp"
#include "kirchlog/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kirchlog;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("zero field has zero energy") {
    const ModelParams m = kt::desk_params();
    Grid g(15, 1.0);
    const EnergyBreakdown e = eval_energy(Field::Zero(15), m, g);
    CHECK(e.J == 0.0);
    CHECK(e.I == 0.0);
    CHECK(e.gradP == 0.0);
    CHECK(e.logTerm == 0.0);
    CHECK(e.normQ1 == 0.0);
    for (double delta : {0.1, 1.0, 4.0}) CHECK(eval_I_delta(Field::Zero(15), delta, m, g) == 0.0);
}

TEST_CASE("desk sine matches the summation oracle") {
    const ModelParams m = kt::desk_params();
    Grid g(kt::kDeskN, 1.0);
    for (double amp : {0.1, 1.0, 5.0, 20.0}) {
        const Field u = kt::sine(kt::kDeskN, 1.0, amp);
        const EnergyBreakdown e = eval_energy(u, m, g);
        const kt::OracleEnergy o = kt::oracle_energy(kt::to_std(u), 1.0, 1, 1, 2, 5);
        CHECK(rel(e.J, o.J) <= 1e-12);
        CHECK(rel(e.I, o.I) <= 1e-12);
        CHECK(rel(e.gradP, o.G) <= 1e-12);
        CHECK(rel(e.logTerm, o.Lg) <= 1e-12);
        CHECK(rel(e.normQ1, o.Q) <= 1e-12);
    }
}

TEST_CASE("energy-Nehari identity on random fields") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        ModelParams m = kt::desk_params();
        std::uniform_real_distribution<double> U(0.1, 3.0);
        m.a = U(rng);
        m.b = U(rng);
        m.p = 2.0 + 0.5 * (trial % 3);
        m.q = 2 * m.p + 0.5;
        Grid g(12, 1.5);
        const Field u = kt::rough_field(12, rng, 2.0);
        const EnergyBreakdown e = eval_energy(u, m, g);
        CHECK(rel(energy_from_nehari_identity(e, m), e.J) <= 1e-12);
    }
}

TEST_CASE("I_delta: definition, affine in delta, validation") {
    std::mt19937_64 rng(17);
    const ModelParams m = kt::desk_params();
    Grid g(20, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Field u = kt::rough_field(20, rng, 1.5);
        CHECK(eval_I_delta(u, 1.0, m, g) == eval_energy(u, m, g).I);
        const double i05 = eval_I_delta(u, 0.5, m, g);
        const double i1 = eval_I_delta(u, 1.0, m, g);
        const double i2 = eval_I_delta(u, 2.0, m, g);
        CHECK(i05 < i1);
        CHECK(i1 < i2);
        CHECK(i2 - i1 == doctest::Approx(2.0 * (i1 - i05)).epsilon(1e-10));
        CHECK(rel(i2, kt::oracle_I_delta(kt::to_std(u), 1.0, 1, 1, 2, 5, 2.0)) <= 1e-12);
    }
    CHECK_THROWS_AS(eval_I_delta(Field::Ones(20), 0.0, m, g), ParameterError);
    CHECK_THROWS_AS(eval_I_delta(Field::Ones(20), -1.0, m, g), ParameterError);
}

TEST_CASE("fibering map: large near zero, strictly decreasing") {
    std::mt19937_64 rng(9);
    const ModelParams m = kt::desk_params();
    Grid g(31, 1.0);
    std::uniform_real_distribution<double> L(-6.0, 6.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Field u = kt::smooth_field(31, 1.0, rng, 0.05, 30.0);
        CHECK(fibering_g(1e-6, u, m, g) > 1e6);
        double l1 = std::exp(L(rng));
        double l2 = std::exp(L(rng));
        if (l1 > l2) std::swap(l1, l2);
        if (l1 == l2) continue;
        CHECK(fibering_g(l1, u, m, g) > fibering_g(l2, u, m, g));
    }
    CHECK_THROWS_AS(fibering_g(1.0, Field::Zero(31), m, g), DomainError);
}

TEST_CASE("derivative of J along a ray is lambda^q g(lambda)") {
    std::mt19937_64 rng(41);
    const ModelParams m = kt::desk_params();
    Grid g(31, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const Field u = kt::smooth_field(31, 1.0, rng, 0.5, 3.0);
        for (double lambda : {0.3, 1.0, 2.2}) {
            const double e = 1e-5 * lambda;
            const double jp = eval_energy(Field((lambda + e) * u), m, g).J;
            const double jm = eval_energy(Field((lambda - e) * u), m, g).J;
            const double fd = (jp - jm) / (2 * e);
            const double exact = std::pow(lambda, m.q) * fibering_g(lambda, u, m, g);
            CHECK(fd == doctest::Approx(exact).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("lambda star: Nehari points, ray reparametrisation") {
    std::mt19937_64 rng(77);
    const ModelParams m = kt::desk_params();
    Grid g(63, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Field u = kt::smooth_field(63, 1.0, rng, 0.1, 10.0);
        const double ls = find_lambda_star(u, m, g).lambdaStar;
        const Field w = nehari_project(u, m, g);
        CHECK(find_lambda_star(w, m, g).lambdaStar == doctest::Approx(1.0).epsilon(1e-9));
        for (double c : {0.1, 3.0, 10.0})
            CHECK(find_lambda_star(Field(c * u), m, g).lambdaStar * c ==
                  doctest::Approx(ls).epsilon(1e-9));
    }
    CHECK_THROWS_AS(find_lambda_star(Field::Zero(63), m, g), DomainError);
}

TEST_CASE("sine ray on the desk grid") {
    const ModelParams m = kt::desk_params();
    Grid g(kt::kDeskN, 1.0);
    const Field u = kt::sine(kt::kDeskN, 1.0, 1.0);
    const FiberingResult r = find_lambda_star(u, m, g);
    CHECK(r.bracket.first <= r.lambdaStar);
    CHECK(r.lambdaStar <= r.bracket.second);
    CHECK(r.lambdaStar == doctest::Approx(6.58).epsilon(1e-3));
    CHECK(std::abs(eval_energy(Field(r.lambdaStar * u), m, g).I) <=
          1e-8 * eval_energy(Field(r.lambdaStar * u), m, g).gradP);
}

TEST_CASE("energy gradient is the L2 gradient density of J") {
    std::mt19937_64 rng(5);
    ModelParams m = kt::desk_params();
    m.p = 3.0;
    m.q = 7.0;
    Grid g(11, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Field u = kt::rough_field(11, rng, 1.5);
        const Field v = kt::rough_field(11, rng, 1.0);
        const double e = 1e-6;
        const double fd =
            (eval_energy(Field(u + e * v), m, g).J - eval_energy(Field(u - e * v), m, g).J) / (2 * e);
        CHECK(inner(energy_gradient(u, m, g), v, g) == doctest::Approx(fd).epsilon(1e-6));
        const double fdI =
            (eval_I_delta(Field(u + e * v), 0.7, m, g) - eval_I_delta(Field(u - e * v), 0.7, m, g)) /
            (2 * e);
        CHECK(inner(nehari_gradient(u, 0.7, m, g), v, g) == doctest::Approx(fdI).epsilon(1e-6));
    }
}

TEST_CASE("every energy term is even in u") {
    std::mt19937_64 rng(8);
    const ModelParams m = kt::desk_params();
    Grid g(16, 1.0);
    const Field u = kt::rough_field(16, rng, 2.0);
    const EnergyBreakdown a = eval_energy(u, m, g);
    const EnergyBreakdown b = eval_energy(Field(-u), m, g);
    CHECK(a.J == b.J);
    CHECK(a.I == b.I);
    CHECK((stationary_residual(u, m, g) + stationary_residual(Field(-u), m, g)).cwiseAbs().maxCoeff() ==
          0.0);
}
