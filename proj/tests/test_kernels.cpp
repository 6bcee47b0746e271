#include <gtest/gtest.h>

#include "dense_reference.hpp"
#include "tdinv/kernels.hpp"

using namespace tdinv;
using kernels::Exec;

namespace {

struct Data {
    Matrix q = Matrix::Random(17, 17);
    Matrix x = Matrix::Random(17, 23);
    Vector lambda = Vector::LinSpaced(17, 1.0, 300.0);
    Vector v0 = Vector::Random(17);
};

}  // namespace

TEST(Kernels, ModalTransformsMatchGemm) {
    Data d;
    Matrix s, p;
    kernels::to_modal(d.q, d.x, s, Exec::serial);
    kernels::to_modal(d.q, d.x, p, Exec::parallel);
    EXPECT_LE((s - d.q.transpose() * d.x).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((p - d.q.transpose() * d.x).cwiseAbs().maxCoeff(), 1e-13);
    kernels::from_modal(d.q, d.x, s, Exec::serial);
    kernels::from_modal(d.q, d.x, p, Exec::parallel);
    EXPECT_LE((s - d.q * d.x).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LE((p - d.q * d.x).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Kernels, RecursionsAreBitIdenticalAcrossPolicies) {
    Data d;
    Matrix s, p;
    kernels::modal_forward(d.lambda, 1e-2, d.v0, d.x, s, Exec::serial);
    kernels::modal_forward(d.lambda, 1e-2, d.v0, d.x, p, Exec::parallel);
    EXPECT_EQ(s, p);
    kernels::modal_backward(d.lambda, 1e-2, d.v0, d.x, s, Exec::serial);
    kernels::modal_backward(d.lambda, 1e-2, d.v0, d.x, p, Exec::parallel);
    EXPECT_EQ(s, p);
    kernels::scale_modes(d.lambda, d.x, s, Exec::serial);
    kernels::scale_modes(d.lambda, d.x, p, Exec::parallel);
    EXPECT_EQ(s, p);
    kernels::apply_stencil(7.0, d.x, s, Exec::serial);
    kernels::apply_stencil(7.0, d.x, p, Exec::parallel);
    EXPECT_EQ(s, p);
}

TEST(Kernels, ForwardRecursionMatchesScalarFormula) {
    const Vector lambda = (Vector(2) << 2.0, 50.0).finished();
    const Vector v0 = (Vector(2) << 1.0, -1.0).finished();
    const Matrix src = Matrix::Zero(2, 6);
    Matrix out;
    kernels::modal_forward(lambda, 0.1, v0, src, out);
    for (int n = 0; n < 6; ++n) {
        EXPECT_NEAR(out(0, n), std::pow(1.0 + 0.2, -n), 1e-15);
        EXPECT_NEAR(out(1, n), -std::pow(1.0 + 5.0, -n), 1e-15);
    }
    kernels::modal_backward(lambda, 0.1, v0, src, out);
    for (int n = 0; n < 6; ++n) EXPECT_NEAR(out(0, n), std::pow(1.2, -(5 - n)), 1e-15);
}

TEST(Kernels, StencilMatchesDenseLaplacian) {
    const oracle::Setup s = oracle::make_setup(9, 2, 1.0, 0.0);
    const Matrix x = Matrix::Random(9, 4);
    Matrix out;
    kernels::apply_stencil(1.0 / (s.dx * s.dx), x, out);
    EXPECT_LE((out - s.A * x).cwiseAbs().maxCoeff(), 1e-10 * (s.A * x).cwiseAbs().maxCoeff());
}

TEST(Kernels, DefaultPolicyCanBeSwitched) {
    const Exec before = kernels::default_exec();
    kernels::set_default_exec(Exec::serial);
    EXPECT_EQ(kernels::default_exec(), Exec::serial);
    kernels::set_default_exec(before);
    EXPECT_EQ(kernels::default_exec(), before);
}
