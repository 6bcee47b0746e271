#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dense_reference.hpp"
#include "tdinv/errors.hpp"
#include "tdinv/problem.hpp"

using namespace tdinv;

TEST(Phi, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(phi(1.0), 10.0);
    EXPECT_DOUBLE_EQ(phi(-2.0), -40.0);
    EXPECT_DOUBLE_EQ(phi(0.0), 0.0);
    EXPECT_DOUBLE_EQ(phi_prime(0.0), 0.0);
    EXPECT_DOUBLE_EQ(phi_prime(-3.0), 60.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 50; ++i) {
        const double s = u(rng);
        EXPECT_DOUBLE_EQ(phi(-s), -phi(s));
    }
}

class Benchmark : public ::testing::Test {
protected:
    TriplePtr tr = build_triple(8);
    SemilinearDiffusion pb{tr};
    oracle::Setup s = oracle::make_setup(8, 1, 1.0, 10.0);
};

TEST_F(Benchmark, ModelFunctions) {
    const Vector theta = Vector::Random(8);
    EXPECT_LE((pb.eval_f(0.0, Vector::Zero(8), theta) - theta).norm(), 0.0);
    EXPECT_EQ(pb.eval_f(0.0, Vector::Zero(8), Vector::Zero(8)), Vector::Zero(8));
    const Vector q1 = tr->eigenvectors().col(0);
    Vector expect = -tr->eigenvalues()(0) * q1;
    for (int i = 0; i < 8; ++i) expect(i) -= phi(q1(i));
    EXPECT_LE((pb.eval_f(0.3, q1, Vector::Zero(8)) - expect).norm(), 1e-10);
    const Vector u = Vector::Random(8);
    EXPECT_EQ(pb.eval_g(0.1, u, theta), u);
    EXPECT_EQ(pb.eval_g(0.1, Vector::Zero(8), theta), Vector::Zero(8));
    EXPECT_EQ(pb.eval_u0(theta), Vector::Zero(8));
}

TEST_F(Benchmark, JacobianBlocks) {
    const Vector u = Vector::Random(8), theta = Vector::Random(8), v = Vector::Random(8);
    EXPECT_LE((pb.jac(Jacobian::f_u, JacobianMode::forward, 0, Vector::Zero(8), theta, v) + s.A * v).norm(),
              1e-10 * (s.A * v).norm());
    Matrix Ju = -s.A;
    for (int i = 0; i < 8; ++i) Ju(i, i) -= oracle::dphi(s, u(i));
    EXPECT_LE((pb.jac(Jacobian::f_u, JacobianMode::forward, 0, u, theta, v) - Ju * v).norm(), 1e-10 * (Ju * v).norm());
    EXPECT_EQ(pb.jac(Jacobian::f_theta, JacobianMode::forward, 0, u, theta, v), v);
    EXPECT_EQ(pb.jac(Jacobian::g_u, JacobianMode::adjoint, 0, u, theta, v), v);
    EXPECT_EQ(pb.jac(Jacobian::g_theta, JacobianMode::forward, 0, u, theta, v), Vector::Zero(8));
    EXPECT_EQ(pb.jac(Jacobian::u0, JacobianMode::forward, 0, u, theta, v), Vector::Zero(8));
}

TEST_F(Benchmark, ForwardAdjointDuality) {
    for (Jacobian which : {Jacobian::f_u, Jacobian::f_theta, Jacobian::g_u, Jacobian::g_theta, Jacobian::u0}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Vector u = Vector::Random(8), theta = Vector::Random(8), x = Vector::Random(8), p = Vector::Random(8);
            const double lhs = tr->dx() * pb.jac(which, JacobianMode::forward, 0, u, theta, x).dot(p);
            const double rhs = tr->dx() * x.dot(pb.jac(which, JacobianMode::adjoint, 0, u, theta, p));
            EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST_F(Benchmark, TaylorOrderOfF) {
    const Vector u = Vector::Random(8), theta = Vector::Random(8), v = Vector::Random(8);
    const Vector f0 = pb.eval_f(0, u, theta);
    const Vector jv = pb.jac(Jacobian::f_u, JacobianMode::forward, 0, u, theta, v);
    double prev = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        const double rem = tr->norm(Pairing::Vstar, pb.eval_f(0, u + eps * v, theta) - f0 - eps * jv);
        if (prev > 0.0) EXPECT_GE(std::log10(prev / rem), 1.9);
        prev = rem;
    }
}

TEST_F(Benchmark, Validation) {
    EXPECT_THROW(pb.eval_f(0, Vector::Zero(7), Vector::Zero(8)), ValidationError);
    EXPECT_THROW(pb.eval_g(0, Vector::Zero(8), Vector::Zero(9)), ValidationError);
    EXPECT_THROW(pb.jac(Jacobian::f_u, JacobianMode::forward, 0, Vector::Zero(8), Vector::Zero(8), Vector::Zero(3)),
                 ValidationError);
    EXPECT_THROW(pb.jac(static_cast<Jacobian>(42), JacobianMode::forward, 0, Vector::Zero(8), Vector::Zero(8),
                        Vector::Zero(8)),
                 ValidationError);
    EXPECT_THROW(SemilinearDiffusion(tr, 10.0, Vector::Ones(3)), ValidationError);
}

TEST(Support, SubdomainSourceRestrictsTheta) {
    const auto tr = build_triple(6);
    Vector mask = Vector::Zero(6);
    mask.head(3).setOnes();
    const SemilinearDiffusion pb(tr, 10.0, mask);
    const Vector theta = Vector::Ones(6);
    const Vector f = pb.eval_f(0, Vector::Zero(6), theta);
    EXPECT_EQ(f, mask);
    EXPECT_EQ(pb.jac(Jacobian::f_theta, JacobianMode::adjoint, 0, Vector::Zero(6), theta, theta), mask);
}
