#pragma once

#include "mrst/core/image.hpp"
#include "mrst/recon/data_term.hpp"

namespace mrst {

enum class SolverKind {
    mm,      // projected diagonal-majorizer step (OS-SQS when subsets > 1)
    oslalm,  // relaxed OS-LALM
};

/// Smooth penalty with a constant diagonal majorizer of its Hessian.
class SmoothPenalty {
public:
    virtual ~SmoothPenalty() = default;
    virtual Image gradient(const Image& x) const = 0;
    virtual const Image& majorizer() const = 0;
};

/// Minimizes L(x) + R(x) over x >= 0 for a DataTerm L and a SmoothPenalty R.
/// The OS-LALM auxiliary variables depend only on L, so they persist across
/// calls to run() while the penalty is swapped between calls (the sparse
/// codes change every outer iteration).
class ImageSolver {
public:
    /// Relaxation parameter of relaxed OS-LALM.
    static constexpr double kRelaxation = 1.999;

    ImageSolver(const DataTerm& data, SolverKind kind);

    /// `passes` sweeps over all subsets. x is updated in place and stays >= 0.
    void run(Image& x, const SmoothPenalty& penalty, int passes);

    SolverKind kind() const { return kind_; }
    long long subiterations() const { return k_; }

    /// Penalty-parameter continuation rho_k of relaxed OS-LALM.
    static double rho(long long k, double alpha = kRelaxation);

private:
    void mm_step(Image& x, const SmoothPenalty& penalty, int m);
    void lalm_step(Image& x, const SmoothPenalty& penalty, int m);

    const DataTerm* data_;
    SolverKind kind_;
    long long k_ = 0;
    bool initialized_ = false;
    Image g_;
    Image h_;
};

}  // namespace mrst
