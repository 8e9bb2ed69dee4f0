#include "wgmopo/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wgmopo/correlations.hpp"
#include "wgmopo/errors.hpp"

namespace wgmopo {

const char* to_string(FitKind kind) {
    return kind == FitKind::direct ? "direct" : "fluorescence";
}

FitKind fit_kind_from_string(const std::string& name) {
    if (name == "direct") return FitKind::direct;
    if (name == "fluorescence") return FitKind::fluorescence;
    throw DomainError("unknown fit kind: '" + name + "'");
}

double FitResult::value(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    throw DomainError("no fit parameter named '" + name + "'");
}

double FitResult::sigma(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return sigmas[i];
    }
    throw DomainError("no fit parameter named '" + name + "'");
}

namespace {

double model_cdf(FitKind kind, double tau, const std::vector<double>& p) {
    return kind == FitKind::direct ? cdf_direct(tau, p[1])
                                   : cdf_fluorescence(tau, p[1], p[2]);
}

// Predicted counts per bin: pair scale times the probability mass in the
// bin plus the flat background (the last parameter).
std::vector<double> predict(const Histogram& h, FitKind kind,
                            const std::vector<double>& p) {
    const double half = 0.5 * h.bin_width_s;
    std::vector<double> out(h.tau_s.size());
    for (std::size_t i = 0; i < h.tau_s.size(); ++i) {
        const double mass =
            model_cdf(kind, h.tau_s[i] + half, p) - model_cdf(kind, h.tau_s[i] - half, p);
        out[i] = p[0] * mass + p.back();
    }
    return out;
}

double chi_squared(const Histogram& h, const std::vector<double>& w,
                   const std::vector<double>& model) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double r = h.counts[i] - model[i];
        chi2 += w[i] * r * r;
    }
    return chi2;
}

bool admissible(FitKind kind, const std::vector<double>& p) {
    if (!(p[0] > 0.0) || !(p[1] > 0.0)) return false;              // A, tau_si
    if (kind == FitKind::fluorescence && !(p[2] > 0.0)) return false;  // tau_f
    return p.back() >= 0.0;                                        // background
}

// Solves M x = b in place by Gauss elimination with partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> m,
                                 std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
        }
        if (m[pivot][col] == 0.0) throw ConvergenceError("singular normal equations");
        std::swap(m[col], m[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = m[row][col] / m[col][col];
            for (std::size_t k = col; k < n; ++k) m[row][k] -= f * m[col][k];
            b[row] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k) acc -= m[i][k] * x[k];
        x[i] = acc / m[i][i];
    }
    return x;
}

std::vector<double> initial_guess(const Histogram& h, FitKind kind) {
    const std::size_t n = h.tau_s.size();
    // Background from the outer 5% of bins on each side.
    const std::size_t edge = std::max<std::size_t>(1, n / 20);
    double bg = 0.0;
    for (std::size_t i = 0; i < edge; ++i) bg += h.counts[i] + h.counts[n - 1 - i];
    bg /= static_cast<double>(2 * edge);

    const double total = std::accumulate(h.counts.begin(), h.counts.end(), 0.0);
    const double amplitude = std::max(total - bg * static_cast<double>(n), 1.0);

    // The left flank is a pure exp(tau/tau_si) in both models, so the
    // excess-weighted mean |tau| over tau < 0 estimates tau_si.
    double left_mass = 0.0, left_first = 0.0;
    double right_mass = 0.0, right_first = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double excess = std::max(h.counts[i] - bg, 0.0);
        if (h.tau_s[i] < 0.0) {
            left_mass += excess;
            left_first += excess * (-h.tau_s[i]);
        } else {
            right_mass += excess;
            right_first += excess * h.tau_s[i];
        }
    }
    double tau_si = left_mass > 0.0 ? left_first / left_mass : h.bin_width_s;
    tau_si = std::max(tau_si, 0.1 * h.bin_width_s);

    if (kind == FitKind::direct) return {amplitude, tau_si, std::max(bg, 0.0)};

    // Right-side mean is tau_f plus a tau_si-sized correction; good enough
    // to start, but keep it clear of tau_si to avoid a degenerate start.
    double tau_f = right_mass > 0.0 ? right_first / right_mass : 2.0 * tau_si;
    tau_f = std::max(tau_f, 1.5 * tau_si);
    return {amplitude, tau_si, tau_f, std::max(bg, 0.0)};
}

}  // namespace

FitResult fit_g2(const Histogram& h, FitKind kind) {
    const std::size_t n = h.tau_s.size();
    const std::size_t k = (kind == FitKind::direct) ? 3 : 4;
    if (h.counts.size() != n) throw DomainError("histogram size mismatch");
    if (!(h.bin_width_s > 0.0)) throw DomainError("bin width must be positive");
    if (n <= k) throw DomainError("histogram has too few bins for the model");

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (h.counts[i] < 0.0) throw DomainError("negative histogram counts");
        w[i] = 1.0 / std::max(h.counts[i], 1.0);
    }

    std::vector<double> p = initial_guess(h, kind);
    double chi2 = chi_squared(h, w, predict(h, kind, p));
    double lambda = 1e-3;
    int iterations = 0;
    bool converged = false;

    const auto jacobian = [&](const std::vector<double>& params) {
        std::vector<std::vector<double>> jac(n, std::vector<double>(k));
        for (std::size_t j = 0; j < k; ++j) {
            const double step = std::max(1e-6 * std::abs(params[j]), 1e-14);
            auto hi = params, lo = params;
            hi[j] += step;
            lo[j] -= step;
            const auto f_hi = predict(h, kind, hi);
            const auto f_lo = predict(h, kind, lo);
            for (std::size_t i = 0; i < n; ++i) {
                jac[i][j] = (f_hi[i] - f_lo[i]) / (2.0 * step);
            }
        }
        return jac;
    };

    for (; iterations < 200; ++iterations) {
        const auto model = predict(h, kind, p);
        const auto jac = jacobian(p);

        // Normal equations J^T W J and gradient J^T W r.
        std::vector<std::vector<double>> jtj(k, std::vector<double>(k, 0.0));
        std::vector<double> jtr(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = h.counts[i] - model[i];
            for (std::size_t a = 0; a < k; ++a) {
                jtr[a] += w[i] * jac[i][a] * r;
                for (std::size_t b = a; b < k; ++b) {
                    jtj[a][b] += w[i] * jac[i][a] * jac[i][b];
                }
            }
        }
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        // Damped step, retried with a stiffer lambda until chi^2 improves.
        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            auto damped = jtj;
            for (std::size_t a = 0; a < k; ++a) {
                damped[a][a] += lambda * std::max(jtj[a][a], 1e-30);
            }
            std::vector<double> delta;
            try {
                delta = solve_linear(damped, jtr);
            } catch (const ConvergenceError&) {
                lambda *= 5.0;
                continue;
            }
            auto trial = p;
            for (std::size_t a = 0; a < k; ++a) trial[a] += delta[a];
            if (admissible(kind, trial)) {
                const double trial_chi2 = chi_squared(h, w, predict(h, kind, trial));
                if (trial_chi2 <= chi2) {
                    const double improvement = chi2 - trial_chi2;
                    p = trial;
                    chi2 = trial_chi2;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    accepted = true;
                    converged = improvement < 1e-8 * (chi2 + 1.0);
                    break;
                }
            }
            lambda *= 5.0;
        }
        if (!accepted) {
            // No downhill step at any damping: either we're at the optimum
            // or stuck immediately.
            converged = iterations > 0;
            break;
        }
        if (converged) break;
    }
    if (!converged) {
        throw ConvergenceError("correlation fit failed to converge");
    }

    // Covariance from the undamped normal equations at the optimum.
    const auto jac = jacobian(p);
    std::vector<std::vector<double>> jtj(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b)
                jtj[a][b] += w[i] * jac[i][a] * jac[i][b];
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

    std::vector<double> sigmas(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        // a-th diagonal of the inverse via one linear solve per column.
        std::vector<double> e(k, 0.0);
        e[a] = 1.0;
        const auto col = solve_linear(jtj, e);
        sigmas[a] = std::sqrt(std::max(col[a], 0.0));
    }

    FitResult result;
    result.kind = kind;
    result.names = kind == FitKind::direct
                       ? std::vector<std::string>{"amplitude", "tau_si", "background"}
                       : std::vector<std::string>{"amplitude", "tau_si", "tau_f",
                                                  "background"};
    result.values = p;
    result.sigmas = sigmas;
    result.chi2_red = chi2 / static_cast<double>(n - k);
    result.iterations = iterations;
    result.converged = true;
    return result;
}

}  // namespace wgmopo
