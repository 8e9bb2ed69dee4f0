#pragma once

#include <string>
#include <vector>

namespace wgmopo {

// Coincidence histogram: counts per tau bin with uniform width; tau_s are
// the bin centers in seconds.
struct Histogram {
    std::vector<double> tau_s;
    std::vector<double> counts;
    double bin_width_s = 0.0;
};

enum class FitKind { direct, fluorescence };
const char* to_string(FitKind kind);
FitKind fit_kind_from_string(const std::string& name);

struct FitResult {
    FitKind kind = FitKind::direct;
    std::vector<std::string> names;   // parameter names, model order
    std::vector<double> values;
    std::vector<double> sigmas;       // sqrt(diag[(J^T W J)^-1])
    double chi2_red = 0.0;
    int iterations = 0;
    bool converged = false;

    double value(const std::string& name) const;
    double sigma(const std::string& name) const;
};

// Weighted least-squares fit of a correlation model to a coincidence
// histogram by Levenberg-Marquardt with a numerical Jacobian.  The model
// for bin i with edges [lo_i, hi_i] is
//
//   counts_i = A (F(hi_i) - F(lo_i)) + B,
//
// where F is the closed-form CDF of the chosen density, A the total
// correlated-pair scale and B a flat background per bin; using the bin
// integral instead of the center value removes the binning bias.  Weights
// are 1/max(counts, 1) (Poisson).  Parameters: direct (A, tau_si, B),
// fluorescence (A, tau_si, tau_f, B).  Throws DomainError for histograms
// with fewer bins than parameters and ConvergenceError if the optimizer
// fails to move off its start.
FitResult fit_g2(const Histogram& histogram, FitKind kind);

}  // namespace wgmopo
