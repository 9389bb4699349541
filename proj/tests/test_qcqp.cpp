// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include "faisac/qcqp.hpp"
#include "faisac/solver.hpp"

#include <doctest.h>

using namespace faisac;
using doctest::Approx;

namespace
{
    struct Case
    {
        Scenario s;
        Apv t;
        Eigen::MatrixXcd W, Rw;
        Surrogate sur;
    };

    Case reference_case(std::mt19937_64 &rng, int M, int K)
    {
        Case c;
        c.s = oracle::random_scenario(rng, M, K);
        c.t = oracle::random_positions(rng, c.s);
        c.W = oracle::random_complex(rng, M, K);
        c.Rw = c.W * c.W.adjoint();
        c.sur = build_surrogate(c.t, c.Rw, c.s.probe_angle, c.s.wavelength);
        return c;
    }

    double probing_at(const Case &c, const Apv &t)
    {
        const Eigen::VectorXcd a = steering_vector(t, c.s.probe_angle, c.s.wavelength);
        return (a.adjoint() * c.Rw * a)(0, 0).real();
    }
}

TEST_CASE("surrogate of the identity covariance is the constant M")
{
    std::mt19937_64 rng(1);
    const Scenario s = oracle::random_scenario(rng, 5, 2);
    const Apv t = oracle::random_positions(rng, s);
    const Surrogate g = build_surrogate(t, Eigen::MatrixXcd::Identity(5, 5), s.probe_angle, s.wavelength);
    CHECK(g.Dm.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(g.d.cwiseAbs().maxCoeff() <= 1e-9);
    for (int i = 0; i < 10; ++i)
        CHECK(g.value(oracle::random_positions(rng, s)) == Approx(5.0).epsilon(1e-9));
}

TEST_CASE("surrogate is a tight, tangent minorizer with negative semidefinite curvature")
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 30; ++i)
    {
        const Case c = reference_case(rng, 2 + static_cast<int>(rng() % 7), 1 + static_cast<int>(rng() % 4));
        const double p0 = probing_at(c, c.t);
        const double scale = std::max(1.0, p0);

        CHECK(p0 == Approx(oracle::probing_double_sum(c.W, c.t, c.s.probe_angle, c.s.wavelength)).epsilon(1e-9));
        CHECK(std::abs(c.sur.value(c.t) - p0) <= 1e-9 * scale);

        const auto f = [&](const Eigen::VectorXd &x) { return probing_at(c, x); };
        const Eigen::VectorXd fd = oracle::finite_gradient(f, c.t, 1e-7 * c.s.wavelength);
        const Eigen::VectorXd an = c.sur.gradient(c.t);
        CHECK((fd - an).norm() <= 1e-5 * std::max(1.0, an.norm()));

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.sur.Dm);
        CHECK(es.eigenvalues().maxCoeff() <= 1e-9 * std::max(1.0, c.sur.Dm.norm()));

        for (int j = 0; j < 50; ++j)
        {
            const Apv x = c.t + Eigen::VectorXd::NullaryExpr(c.t.size(), [&] {
                              return oracle::uniform(rng, -1.0, 1.0) * c.s.wavelength;
                          });
            CHECK(c.sur.value(x) <= probing_at(c, x) + 1e-9 * scale);
        }
    }
}

TEST_CASE("chain projection examples")
{
    SUBCASE("already feasible")
    {
        Eigen::VectorXd k(3);
        k << 0.0, 0.5, 1.0;
        CHECK((project_chain(k, 0.25, 1.0) - k).norm() == 0.0);
    }
    SUBCASE("only one feasible point")
    {
        Eigen::VectorXd k(2);
        k << 0.6, 0.4;
        const Apv t = project_chain(k, 1.0, 1.0);
        CHECK(t[0] == Approx(0.0).scale(1.0));
        CHECK(t[1] == Approx(1.0));
    }
    SUBCASE("crossed pair is pulled apart symmetrically")
    {
        Eigen::VectorXd k(2);
        k << 0.5, 0.5;
        const Apv t = project_chain(k, 0.2, 1.0);
        CHECK(t[0] == Approx(0.4));
        CHECK(t[1] == Approx(0.6));
    }
    SUBCASE("box clipping")
    {
        Eigen::VectorXd k(2);
        k << -1.0, 2.0;
        const Apv t = project_chain(k, 0.1, 1.0);
        CHECK(t[0] == Approx(0.0).scale(1.0));
        CHECK(t[1] == Approx(1.0));
    }
}

TEST_CASE("chain projection agrees with Dykstra's algorithm")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i)
    {
        const int M = 1 + static_cast<int>(rng() % 6);
        const double D = 1.0, D0 = (M > 1 ? oracle::uniform(rng, 0.0, 1.0) / (M - 1) : 0.3);
        const Eigen::VectorXd k = Eigen::VectorXd::NullaryExpr(M, [&] { return oracle::uniform(rng, -0.5, 1.5); });
        const Apv t = project_chain(k, D0, D);
        CHECK(oracle::chain_ok(t, D0, D, 1e-12));
        CHECK((t - oracle::dykstra_chain(k, D0, D)).norm() <= 1e-8);
    }
}

TEST_CASE("chain quadratic program")
{
    std::mt19937_64 rng(4);
    SUBCASE("identity Hessian is the projection")
    {
        for (int i = 0; i < 50; ++i)
        {
            const int M = 2 + static_cast<int>(rng() % 6);
            const double D0 = 0.8 / (M - 1);
            const Eigen::VectorXd k = Eigen::VectorXd::NullaryExpr(M, [&] { return oracle::uniform(rng, -0.5, 1.5); });
            const Apv t = chain_qp(Eigen::MatrixXd::Identity(M, M), k, D0, 1.0, Eigen::VectorXd::Zero(M));
            CHECK((t - project_chain(k, D0, 1.0)).norm() <= 1e-10);
        }
    }
    SUBCASE("projected-gradient fixed point")
    {
        for (int i = 0; i < 50; ++i)
        {
            const int M = 2 + static_cast<int>(rng() % 6);
            const double D0 = 0.8 / (M - 1);
            const Eigen::MatrixXd G = Eigen::MatrixXd::NullaryExpr(M, M, [&] { return oracle::uniform(rng, -1.0, 1.0); });
            const Eigen::MatrixXd Q = G * G.transpose() + 0.1 * Eigen::MatrixXd::Identity(M, M);
            const Eigen::VectorXd r = Eigen::VectorXd::NullaryExpr(M, [&] { return oracle::uniform(rng, -2.0, 2.0); });
            const Apv t = chain_qp(Q, r, D0, 1.0, Eigen::VectorXd::Zero(M));
            REQUIRE(oracle::chain_ok(t, D0, 1.0, 1e-12));
            const double step = 1.0 / Q.norm();
            CHECK((project_chain(t - step * (Q * t - r), D0, 1.0) - t).norm() <= 1e-9);
        }
    }
}

TEST_CASE("feasible projection")
{
    std::mt19937_64 rng(5);

    SUBCASE("points inside are unchanged")
    {
        const Case c = reference_case(rng, 4, 2);
        const FeasibleProjection p =
            project_feasible(c.t, c.sur, c.s.min_spacing, c.s.aperture, 0.5 * c.sur.value(c.t));
        CHECK(p.feasible);
        CHECK((p.t - c.t).norm() <= 1e-12 * c.s.aperture);
        CHECK(p.multiplier == 0.0);
    }
    SUBCASE("slack threshold reduces to the chain projection")
    {
        const Case c = reference_case(rng, 5, 2);
        const Eigen::VectorXd k = c.t + Eigen::VectorXd::NullaryExpr(5, [&] { return oracle::uniform(rng, -1.0, 1.0) * c.s.aperture; });
        const FeasibleProjection p = project_feasible(k, c.sur, c.s.min_spacing, c.s.aperture, -1e30);
        CHECK(p.feasible);
        CHECK((p.t - project_chain(k, c.s.min_spacing, c.s.aperture)).norm() <= 1e-12 * c.s.aperture);
    }
    SUBCASE("stationarity, idempotence and sampled optimality")
    {
        int active = 0;
        for (int i = 0; i < 40; ++i)
        {
            const int M = 2 + i % 2;
            const Case c = reference_case(rng, M, 1 + i % 3);
            const double g0 = c.sur.value(c.t);
            const double Pt = g0 * oracle::uniform(rng, 0.9, 1.0);
            const Eigen::VectorXd k =
                c.t + Eigen::VectorXd::NullaryExpr(M, [&] { return oracle::uniform(rng, -0.3, 0.3) * c.s.wavelength; });
            const FeasibleProjection p = project_feasible(k, c.sur, c.s.min_spacing, c.s.aperture, Pt);
            REQUIRE(p.feasible);
            CHECK(oracle::chain_ok(p.t, c.s.min_spacing, c.s.aperture, 1e-12 * c.s.aperture));
            CHECK(p.surrogate_value >= Pt - 1e-9 * std::max(1.0, Pt));
            CHECK(p.surrogate_value == Approx(c.sur.value(p.t)).epsilon(1e-12));
            if (p.multiplier > 0.0)
            {
                ++active;
                CHECK(p.surrogate_value == Approx(Pt).epsilon(1e-8));
            }

            // t = P_chain(kappa + mu (Dm t - d))
            const Eigen::VectorXd shifted = k + p.multiplier * 0.5 * c.sur.gradient(p.t);
            CHECK((project_chain(shifted, c.s.min_spacing, c.s.aperture) - p.t).norm() <= 1e-8 * c.s.wavelength);

            const FeasibleProjection again = project_feasible(p.t, c.sur, c.s.min_spacing, c.s.aperture, Pt);
            CHECK((again.t - p.t).norm() <= 1e-9 * c.s.wavelength);

            // no feasible sample in a ball around kappa is closer
            const double best = (p.t - k).norm();
            for (int j = 0; j < 20000; ++j)
            {
                Eigen::VectorXd z = Eigen::VectorXd::NullaryExpr(M, [&] { return oracle::uniform(rng, -1.0, 1.0); });
                z = k + 1.2 * best * z / std::max(1.0, z.norm());
                if (oracle::chain_ok(z, c.s.min_spacing, c.s.aperture, 0.0) && c.sur.value(z) >= Pt)
                    CHECK((z - k).norm() >= best - 1e-10 * c.s.wavelength);
            }
        }
        CHECK(active > 0);
    }
    SUBCASE("unreachable threshold is reported")
    {
        const Case c = reference_case(rng, 3, 1);
        const FeasibleProjection p = project_feasible(c.t, c.sur, c.s.min_spacing, c.s.aperture, 1e6 * c.sur.value(c.t));
        CHECK_FALSE(p.feasible);
        CHECK(oracle::chain_ok(p.t, c.s.min_spacing, c.s.aperture, 1e-12 * c.s.aperture));
    }
}
