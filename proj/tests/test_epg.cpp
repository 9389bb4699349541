// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include "faisac/epg.hpp"
#include "faisac/solver.hpp"

#include <doctest.h>

using namespace faisac;
using doctest::Approx;

namespace
{
    struct State
    {
        Scenario s;
        Apv t;
        Beamformers W;
        AuxState aux;
        ChannelSet ch;
    };

    State make_state(const Scenario &s, const Apv &t, std::uint64_t seed)
    {
        State x{s, t, init_beamformers(s, t, seed), {}, build_channels(s, t)};
        x.aux = update_aux(x.ch, x.W, s.noise_power);
        return x;
    }

    State random_state(std::mt19937_64 &rng, int M, int K)
    {
        Scenario s = oracle::random_scenario(rng, M, K);
        s.probe_threshold = 0.0;
        const Apv t = oracle::random_positions(rng, s);
        State x{s, t, {}, {}, build_channels(s, t)};
        x.W = oracle::random_complex(rng, M, K,
                                     std::sqrt(s.noise_power[0]) / (x.ch.gain[0] * std::sqrt(static_cast<double>(M))));
        x.aux = update_aux(x.ch, x.W, s.noise_power);
        return x;
    }
}

TEST_CASE("real factors of the Hermitian forms")
{
    std::mt19937_64 rng(1);
    const Beamformers W = oracle::random_complex(rng, 5, 3);
    const WSplit sp(W);
    for (Eigen::Index i = 0; i < 3; ++i)
    {
        const Eigen::VectorXd a = W.col(i).real(), b = W.col(i).imag();
        CHECK((sp.C(i) - (a * a.transpose() + b * b.transpose())).norm() <= 1e-14);
        CHECK((sp.D(i) - (a * b.transpose() - b * a.transpose())).norm() <= 1e-14);
        const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(5, [&] { return oracle::uniform(rng, -1.0, 1.0); });
        CHECK((sp.apply_C(i, x) - sp.C(i) * x).norm() <= 1e-13);
        CHECK((sp.apply_D(i, x) - sp.D(i) * x).norm() <= 1e-13);
    }
}

TEST_CASE("trigonometric state")
{
    Apv t(2);
    t << 0.0, 0.25;
    Eigen::VectorXd v(1);
    v << 2.0 * std::numbers::pi;
    const TrigState ts(t, v);
    CHECK(ts.g(0, 0) == 1.0);
    CHECK(ts.q(0, 0) == 0.0);
    CHECK(ts.g(1, 0) == Approx(0.0).scale(1.0));
    CHECK(ts.q(1, 0) == Approx(1.0));
}

TEST_CASE("real quadratic forms match the complex inner products")
{
    std::mt19937_64 rng(2);
    for (int n = 0; n < 30; ++n)
    {
        const State x = random_state(rng, 1 + static_cast<int>(rng() % 8), 1 + static_cast<int>(rng() % 8));
        const QuadraticForms qf = quadratic_forms(x.t, x.W, x.ch);
        const auto K = x.W.cols();
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const Eigen::VectorXcd a = steering_vector(x.t, x.s.user_angles[static_cast<std::size_t>(k)], x.s.wavelength);
            for (Eigen::Index i = 0; i < K; ++i)
            {
                const double ref = std::norm(a.dot(x.W.col(i)));
                CHECK(qf.f(k, i) == Approx(ref).epsilon(1e-10).scale(1e-14 * x.W.squaredNorm()));
            }
            CHECK(qf.h[k] == Approx(a.dot(x.W.col(k)).real()).epsilon(1e-10).scale(1e-12 * x.W.norm()));
        }
    }
}

TEST_CASE("position objective matches the WMMSE objective")
{
    std::mt19937_64 rng(3);
    const State x = random_state(rng, 6, 3);
    CHECK(position_objective(x.s, x.t, x.W, x.aux) == Approx(objective(x.ch, x.W, x.aux, x.s.noise_power)).epsilon(1e-13));
}

TEST_CASE("position gradient matches finite differences")
{
    std::mt19937_64 rng(4);
    for (int n = 0; n < 40; ++n)
    {
        const State x = random_state(rng, 2 + static_cast<int>(rng() % 7), 1 + static_cast<int>(rng() % 8));
        // perturb the receivers so the gradient is not zero by construction
        AuxState aux = x.aux;
        aux.u = aux.u.cwiseProduct(Eigen::VectorXcd::Ones(aux.u.size()) + oracle::random_complex(rng, aux.u.size(), 1, 0.3));
        const auto f = [&](const Eigen::VectorXd &t) { return position_objective(x.s, t, x.W, aux); };
        const Eigen::VectorXd fd = oracle::finite_gradient(f, x.t, 1e-7 * x.s.wavelength);
        const Eigen::VectorXd an = grad_t(x.t, x.W, aux, x.ch);
        CHECK((fd - an).norm() <= 1e-5 * std::max(an.norm(), 1e-3 / x.s.wavelength));
    }
}

TEST_CASE("zero beamformers give a zero position gradient")
{
    std::mt19937_64 rng(5);
    const State x = random_state(rng, 5, 2);
    const Beamformers Z = Beamformers::Zero(5, 2);
    CHECK(grad_t(x.t, Z, x.aux, x.ch).norm() == 0.0);
    const AuxState zero{Eigen::VectorXcd::Zero(2), Eigen::VectorXd::Ones(2)};
    CHECK(grad_t(x.t, x.W, zero, x.ch).norm() == 0.0);
}

TEST_CASE("momentum sequence")
{
    double alpha = 0.0;
    alpha = next_alpha(alpha);
    CHECK(alpha == 1.0);
    CHECK(momentum_weight(alpha) == 0.0);
    alpha = next_alpha(alpha);
    CHECK(alpha == Approx((1.0 + std::sqrt(5.0)) / 2.0));
    CHECK(momentum_weight(alpha) == Approx((alpha - 1.0) / alpha));
    for (int i = 0; i < 100; ++i)
    {
        const double a2 = next_alpha(alpha);
        CHECK(a2 > alpha);
        CHECK(a2 * a2 - a2 == Approx(alpha * alpha).epsilon(1e-12));
        CHECK(momentum_weight(a2) > momentum_weight(alpha));
        CHECK(momentum_weight(a2) < 1.0);
        alpha = a2;
    }
}

TEST_CASE("unconstrained probing: descent and feasibility")
{
    const Scenario s = two_user_scenario(0.0);
    const State x = make_state(s, uniform_positions(s.num_antennas, s.aperture), 3);
    EpgOptions o;
    o.max_iter = 200;
    const EpgResult r = epg_solve(x.t, x.W, x.aux, s, o);
    CHECK(r.initial_value == Approx(position_objective(s, x.t, x.W, x.aux)).epsilon(1e-13));
    CHECK(r.value == Approx(position_objective(s, r.t, x.W, x.aux)).epsilon(1e-13));
    CHECK(r.value <= r.initial_value);
    CHECK(positions_feasible(r.t, s.aperture, s.min_spacing, 1e-12));
    REQUIRE_FALSE(r.history.empty());
    CHECK(r.history.size() <= 201);
    CHECK(*std::min_element(r.history.begin(), r.history.end()) == Approx(r.value).epsilon(1e-14));
    // momentum may raise single iterates; the best value so far may not rise
    double best = r.history.front();
    for (double h : r.history)
        best = std::min(best, h);
    CHECK(best == r.value);
}

TEST_CASE("probing requirement is kept along the iterations")
{
    for (double Pt : {1.0, 3.0, 5.0})
    {
        CAPTURE(Pt);
        const Scenario s = two_user_scenario(Pt);
        const Apv t0 = half_wavelength_positions(s.num_antennas, s.wavelength);
        State x = make_state(s, t0, 5);
        const Eigen::VectorXcd a = steering_vector(t0, s.probe_angle, s.wavelength);
        REQUIRE(probing_power(x.W, a) >= Pt * (1.0 - 1e-9));
        x.aux = update_aux(x.ch, x.W, s.noise_power);
        const EpgResult r = epg_solve(t0, x.W, x.aux, s, EpgOptions{});
        CHECK(r.value <= r.initial_value);
        CHECK(positions_feasible(r.t, s.aperture, s.min_spacing, 1e-12));
        CHECK(probing_power(x.W, r.t, s.probe_angle, s.wavelength) >= Pt - 1e-6 * std::max(1.0, Pt));
    }
}

TEST_CASE("a converged point is a fixed point")
{
    SUBCASE("zero gradient")
    {
        const Scenario s = two_user_scenario(0.0);
        const State x = make_state(s, uniform_positions(s.num_antennas, s.aperture), 9);
        const AuxState zero{Eigen::VectorXcd::Zero(2), Eigen::VectorXd::Ones(2)};
        const EpgResult r = epg_solve(x.t, x.W, zero, s, EpgOptions{});
        CHECK(r.converged);
        CHECK(r.t == x.t);
        CHECK(r.value == r.initial_value);
    }
    SUBCASE("two antennas")
    {
        Scenario s = two_user_scenario(0.0);
        s.num_antennas = 2;
        const State x = make_state(s, uniform_positions(2, s.aperture), 9);
        EpgOptions o;
        o.max_iter = 2000;
        const EpgResult r = epg_solve(x.t, x.W, x.aux, s, o);
        REQUIRE(r.converged);
        const EpgResult again = epg_solve(r.t, x.W, x.aux, s, o);
        CHECK(again.value == Approx(r.value).epsilon(1e-9));
        CHECK((again.t - r.t).cwiseAbs().maxCoeff() <= 1e-6 * s.wavelength);
    }
}

TEST_CASE("two antennas: best of several starts against a grid search")
{
    Scenario s = two_user_scenario(0.0);
    s.num_antennas = 2;
    const Apv t0 = uniform_positions(2, s.aperture);
    const State x = make_state(s, t0, 4);

    const int n = static_cast<int>(std::lround(s.aperture / 1e-4));
    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j)
        {
            Apv t(2);
            t << s.aperture * i / n, s.aperture * j / n;
            if (t[1] - t[0] < s.min_spacing)
                continue;
            grid_best = std::min(grid_best, position_objective(s, t, x.W, x.aux));
        }

    double epg_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i)
        for (int j = i + 1; j < 20; ++j)
        {
            Apv t(2);
            t << s.aperture * i / 19.0, s.aperture * j / 19.0;
            if (t[1] - t[0] < s.min_spacing)
                continue;
            epg_best = std::min(epg_best, epg_solve(t, x.W, x.aux, s, EpgOptions{}).value);
        }
    MESSAGE("grid " << grid_best << ", best start " << epg_best);
    CHECK(epg_best <= grid_best + 1e-3);
}

TEST_CASE("options are validated")
{
    EpgOptions o;
    o.shrink = 1.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = EpgOptions{};
    o.max_iter = 0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}
