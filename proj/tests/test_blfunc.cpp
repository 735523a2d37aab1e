#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "relsamp/blfunc.hpp"
#include "relsamp/csv.hpp"
#include "relsamp/rng.hpp"

using namespace relsamp;

namespace {

std::shared_ptr<const TensorBasis> make_tb(double R, int d, std::size_t N, int order = 0) {
    auto b = std::make_shared<const ProlateBasis1D>(build_basis_1d(R, order > 0 ? order : min_quadrature_order(R)));
    return tensor_basis(b, d, N);
}

std::vector<double> unit(std::size_t M, std::size_t j) {
    std::vector<double> c(M, 0.0);
    c[j] = 1.0;
    return c;
}

double at(const BandlimitedFunction& f, double x) { return evaluate(f, std::vector<double>{x}); }

} // namespace

TEST_CASE("BandlimitedFunction norms on unit vectors") {
    const auto tb = make_tb(4.0, 1, 4);
    const std::size_t M = default_M(*tb);
    CHECK(M == 8);
    for (std::size_t j = 0; j < M; ++j) {
        const BandlimitedFunction f(tb, unit(M, j));
        CHECK(f.norm2_sq() == 1.0);
        CHECK(std::abs(f.concentration() - tb->lambda[j]) < 1e-15);
        CHECK(std::abs(f.delta() - (1.0 - tb->lambda[j])) < 1e-15);
    }
    const BandlimitedFunction top(tb, unit(M, 0));
    CHECK(std::abs(top.delta() - min_achievable_delta(*tb)) < 1e-15);
    const BandlimitedFunction zero(tb, std::vector<double>(M, 0.0));
    CHECK(zero.concentration() == 1.0);
    CHECK(zero.delta() == 0.0);
    CHECK_THROWS_AS(BandlimitedFunction(tb, std::vector<double>(3, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(BandlimitedFunction(tb, std::vector<double>(tb->size() + 1, 1.0)), std::invalid_argument);
}

TEST_CASE("synth_random meets the target and is deterministic") {
    for (double R : {2.0, 4.0}) {
        const auto tb = make_tb(R, 1, static_cast<std::size_t>(R));
        const double floor = min_achievable_delta(*tb);
        for (double target : {floor * 1.01, floor + 0.01, 0.05, 0.2}) {
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                const auto f = synth_random(tb, default_M(*tb), target, seed);
                CHECK(f.delta() <= target);
                CHECK(f.seed() == seed);
                CHECK(f.norm2_sq() > 0.0);
            }
        }
        const auto a = synth_random(tb, default_M(*tb), 0.05, 99);
        const auto b = synth_random(tb, default_M(*tb), 0.05, 99);
        CHECK(a.coeffs() == b.coeffs());
        const auto c = synth_random(tb, default_M(*tb), 0.05, 100);
        CHECK(a.coeffs() != c.coeffs());
    }
}

TEST_CASE("synth_random reports infeasible targets") {
    const auto tb = make_tb(2.0, 1, 2);
    const double floor = 1.0 - tb->lambda[0];
    try {
        synth_random(tb, 4, floor * 0.5, 1);
        FAIL("expected InfeasibleTarget");
    } catch (const InfeasibleTarget& e) {
        CHECK(e.minimum() == floor);
        CHECK(e.requested() == floor * 0.5);
    }
    CHECK_THROWS_AS(synth_random(tb, 1, 0.1, 1), std::invalid_argument);
}

TEST_CASE("synth_random tail is scaled, not removed, when room allows") {
    const auto tb = make_tb(4.0, 1, 4);
    const auto f = synth_random(tb, 8, 0.05, 5);
    double tail = 0.0;
    for (std::size_t j = 4; j < 8; ++j) tail += f.coeffs()[j] * f.coeffs()[j];
    CHECK(tail > 0.0);
    // Largest factor: the delta lands on the target unless the head alone is already there.
    CHECK(f.delta() == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("evaluate is bounded by the norm") {
    const auto tb = make_tb(2.0, 1, 2);
    const BandlimitedFunction zero(tb, std::vector<double>(4, 0.0));
    const BandlimitedFunction phi(tb, unit(4, 0));
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 1000; ++t) {
        const double x = u(gen);
        CHECK(at(zero, x) == 0.0);
        CHECK(std::abs(at(phi, x)) <= 1.0);
    }
    const auto tb2 = make_tb(2.0, 2, 4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = synth_random(tb2, default_M(*tb2), 0.2, seed);
        const double bound = std::sqrt(f.norm2_sq()) + 1e-6;
        for (int t = 0; t < 50; ++t) CHECK(std::abs(evaluate(f, std::vector<double>{u(gen), u(gen)})) <= bound);
    }
}

TEST_CASE("Shannon sum over the integers recovers the norm") {
    for (double R : {2.0, 4.0}) {
        const auto tb = make_tb(R, 1, static_cast<std::size_t>(R));
        const double target = min_achievable_delta(*tb) + 0.01;
        const int K = static_cast<int>(4 * R);
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto f = synth_random(tb, default_M(*tb), target, seed);
            double s = 0.0;
            for (int k = -K; k <= K; ++k) s += std::pow(at(f, k), 2);
            CHECK(std::abs(s - f.norm2_sq()) < 1e-2 * f.norm2_sq());
        }
    }
}

TEST_CASE("local energy matches a trapezoid integral over C_R") {
    for (double R : {2.0, 4.0}) {
        const auto tb = make_tb(R, 1, static_cast<std::size_t>(R));
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto f = synth_random(tb, default_M(*tb), 0.3, seed);
            const int n = 2000;
            const double h = R / n;
            double s = 0.5 * (std::pow(at(f, -R / 2), 2) + std::pow(at(f, R / 2), 2));
            for (int i = 1; i < n; ++i) s += std::pow(at(f, -R / 2 + i * h), 2);
            CHECK(std::abs(s * h - f.local_norm2_sq()) < 1e-3 * f.local_norm2_sq());
        }
    }
}

TEST_CASE("project_E and project_F split f orthogonally") {
    const auto tb = make_tb(4.0, 1, 4);
    std::vector<double> head(8, 0.0), tail(8, 0.0);
    head[1] = 2.0;
    tail[6] = -1.0;
    CHECK(project_F(BandlimitedFunction(tb, head)).norm2_sq() == 0.0);
    CHECK(project_E(BandlimitedFunction(tb, tail)).norm2_sq() == 0.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = synth_random(tb, 8, 0.2, seed);
        const auto e = project_E(f), g = project_F(f);
        double inner = 0.0;
        for (std::size_t j = 0; j < 8; ++j) {
            CHECK(e.coeffs()[j] + g.coeffs()[j] == f.coeffs()[j]);
            inner += e.coeffs()[j] * g.coeffs()[j];
        }
        CHECK(inner == 0.0);
        CHECK(std::abs(e.norm2_sq() + g.norm2_sq() - f.norm2_sq()) < 1e-12 * f.norm2_sq());
    }
}

TEST_CASE("qestim_check on head-only and random functions") {
    const auto tb = make_tb(4.0, 1, 4);
    std::vector<double> head(8, 0.0);
    head[0] = 1.0;
    head[3] = 0.1;
    const auto rh = qestim_check(BandlimitedFunction(tb, head));
    CHECK(rh.F_norm_sq == 0.0);
    CHECK(rh.all_ok());

    // With the first tail eigenvalue below 1/2, ||Ff||^2 <= 2 delta ||f||^2.
    REQUIRE(tb->lambda[4] <= 0.5);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto f = synth_random(tb, 8, 0.01, seed);
        const auto r = qestim_check(f);
        CHECK(project_F(f).norm2_sq() <= 0.02 * f.norm2_sq());
        CHECK(r.all_ok());
        CHECK_FALSE(r.vacuous);
        CHECK(r.alpha == tb->alpha);
    }
}

TEST_CASE("qestim_check holds for 500 random functions across settings") {
    const std::vector<std::shared_ptr<const TensorBasis>> bases{make_tb(2.0, 1, 2), make_tb(4.0, 1, 4),
                                                               make_tb(8.0, 1, 8), make_tb(2.0, 2, 4)};
    Rng rng(2024);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < 500; ++i) {
        const auto& tb = bases[i % bases.size()];
        const double floor = min_achievable_delta(*tb);
        const double hi = std::min(0.9 * (1.0 - tb->alpha), 0.5);
        const double target = floor + (hi - floor) * rng.uniform01();
        const auto f = synth_random(tb, default_M(*tb), target, i);
        const auto r = qestim_check(f);
        if (r.vacuous) continue;
        ++checked;
        CHECK(r.E_norm_ok);
        CHECK(r.E_local_ok);
        CHECK(r.F_norm_ok);
    }
    CHECK(checked == 500);
}

TEST_CASE("sinc_kernel values and cardinal series") {
    const std::vector<double> x{0.3, -1.2};
    CHECK(sinc_kernel(x, x) == 1.0);
    CHECK(std::abs(sinc_kernel(std::vector<double>{2.0, 0.1}, std::vector<double>{-1.0, 0.1})) < 1e-15);
    CHECK(sinc_kernel(std::vector<double>{0.5}, std::vector<double>{0.0}) == doctest::Approx(2.0 / M_PI));

    const auto tb = make_tb(2.0, 1, 2);
    const auto f = synth_random(tb, 4, 0.03, 8);
    const int K = 200;
    for (double t : {-0.7, 0.25, 0.5, 1.3}) {
        double s = 0.0;
        for (int k = -K; k <= K; ++k)
            s += at(f, k) * sinc_kernel(std::vector<double>{t}, std::vector<double>{static_cast<double>(k)});
        CHECK(std::abs(s - at(f, t)) < 1e-2);
    }
}

TEST_CASE("function CSV round trip and header checks") {
    const auto tb = make_tb(2.0, 1, 2);
    const auto f = synth_random(tb, 4, 0.05, 31);
    std::stringstream ss;
    write_function_csv(ss, f);
    const auto g = read_function_csv(ss, tb);
    CHECK(g.coeffs() == f.coeffs());
    CHECK(g.seed() == 31);

    std::stringstream bad("#function,R=3,d=1,N=2,M=4,seed=1\nj,c_j\n0,1\n1,0\n2,0\n3,0\n");
    CHECK_THROWS_AS(read_function_csv(bad, tb), ParseError);
    std::stringstream garbled("#function,R=2,d=1,N=2,M=4,seed=1\nj,c_j\n0,1\n1,x\n2,0\n3,0\n");
    try {
        read_function_csv(garbled, tb);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}
