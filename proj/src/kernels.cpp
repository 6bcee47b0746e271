#include "tdinv/kernels.hpp"

#include <atomic>

#include <omp.h>

namespace tdinv::kernels {

namespace {

std::atomic<Exec> g_default_exec{Exec::parallel};

// Contiguous column block [begin, end) handled by the calling thread.
std::pair<Index, Index> thread_block(Index cols) {
    const Index threads = omp_get_num_threads();
    const Index id = omp_get_thread_num();
    const Index chunk = (cols + threads - 1) / threads;
    const Index begin = std::min(cols, id * chunk);
    const Index end = std::min(cols, begin + chunk);
    return {begin, end};
}

void gemm_serial(const Matrix& Q, bool transpose, const Matrix& X, Matrix& out) {
    const Index n = Q.rows();
    out.resize(n, X.cols());
    for (Index c = 0; c < X.cols(); ++c) {
        for (Index i = 0; i < n; ++i) {
            double acc = 0.0;
            for (Index k = 0; k < n; ++k) acc += (transpose ? Q(k, i) : Q(i, k)) * X(k, c);
            out(i, c) = acc;
        }
    }
}

void gemm_parallel(const Matrix& Q, bool transpose, const Matrix& X, Matrix& out) {
    out.resize(Q.rows(), X.cols());
#pragma omp parallel
    {
        auto [begin, end] = thread_block(X.cols());
        if (end > begin) {
            if (transpose)
                out.middleCols(begin, end - begin).noalias() = Q.transpose() * X.middleCols(begin, end - begin);
            else
                out.middleCols(begin, end - begin).noalias() = Q * X.middleCols(begin, end - begin);
        }
    }
}

}  // namespace

Exec default_exec() noexcept { return g_default_exec.load(std::memory_order_relaxed); }
void set_default_exec(Exec exec) noexcept { g_default_exec.store(exec, std::memory_order_relaxed); }

void to_modal(const Matrix& Q, const Matrix& X, Matrix& out, Exec exec) {
    if (exec == Exec::serial)
        gemm_serial(Q, true, X, out);
    else
        gemm_parallel(Q, true, X, out);
}

void from_modal(const Matrix& Q, const Matrix& X, Matrix& out, Exec exec) {
    if (exec == Exec::serial)
        gemm_serial(Q, false, X, out);
    else
        gemm_parallel(Q, false, X, out);
}

void modal_forward(const Vector& lambda, double step, const Vector& v0, const Matrix& src, Matrix& out,
                   Exec exec) {
    const Index modes = lambda.size();
    const Index nodes = src.cols();
    out.resize(modes, nodes);
    auto sweep = [&](Index k) {
        const double damp = 1.0 / (1.0 + step * lambda(k));
        double v = v0(k);
        out(k, 0) = v;
        for (Index n = 1; n < nodes; ++n) {
            v = (v + step * src(k, n)) * damp;
            out(k, n) = v;
        }
    };
    if (exec == Exec::serial) {
        for (Index k = 0; k < modes; ++k) sweep(k);
    } else {
#pragma omp parallel for schedule(static)
        for (Index k = 0; k < modes; ++k) sweep(k);
    }
}

void modal_backward(const Vector& lambda, double step, const Vector& pT, const Matrix& src, Matrix& out,
                    Exec exec) {
    const Index modes = lambda.size();
    const Index nodes = src.cols();
    out.resize(modes, nodes);
    auto sweep = [&](Index k) {
        const double damp = 1.0 / (1.0 + step * lambda(k));
        double p = pT(k);
        out(k, nodes - 1) = p;
        for (Index n = nodes - 1; n >= 1; --n) {
            p = (p + step * src(k, n)) * damp;
            out(k, n - 1) = p;
        }
    };
    if (exec == Exec::serial) {
        for (Index k = 0; k < modes; ++k) sweep(k);
    } else {
#pragma omp parallel for schedule(static)
        for (Index k = 0; k < modes; ++k) sweep(k);
    }
}

void scale_modes(const Vector& weight, const Matrix& X, Matrix& out, Exec exec) {
    out.resize(X.rows(), X.cols());
    if (exec == Exec::serial) {
        for (Index c = 0; c < X.cols(); ++c)
            for (Index k = 0; k < X.rows(); ++k) out(k, c) = X(k, c) * weight(k);
    } else {
#pragma omp parallel for schedule(static)
        for (Index c = 0; c < X.cols(); ++c) out.col(c) = X.col(c).cwiseProduct(weight);
    }
}

void apply_stencil(double inv_dx2, const Matrix& X, Matrix& out, Exec exec) {
    const Index n = X.rows();
    out.resize(n, X.cols());
    auto column = [&](Index c) {
        for (Index i = 0; i < n; ++i) {
            double v = 2.0 * X(i, c);
            if (i > 0) v -= X(i - 1, c);
            if (i + 1 < n) v -= X(i + 1, c);
            out(i, c) = v * inv_dx2;
        }
    };
    if (exec == Exec::serial) {
        for (Index c = 0; c < X.cols(); ++c) column(c);
    } else {
#pragma omp parallel for schedule(static)
        for (Index c = 0; c < X.cols(); ++c) column(c);
    }
}

}  // namespace tdinv::kernels
