#include <Eigen/Dense>

#include <cmath>

#include "fxlab/anc.hpp"
#include "fxlab/error.hpp"
#include "fxlab/format.hpp"

namespace fxlab::anc {

namespace {

// sum_m a[m] b[m + lag]
double correlate(std::span<const double> a, std::span<const double> b, std::size_t lag) {
    double acc = 0.0;
    for (std::size_t m = 0; m + lag < b.size() && m < a.size(); ++m)
        acc += a[m] * b[m + lag];
    return acc;
}

} // namespace

WienerSolution wiener_oracle(const paths::FirFilter& p, const paths::FirFilter& s,
                             std::size_t order) {
    if (order == 0)
        throw ValidationError("wiener_oracle: order must be positive");
    if (s.delay() == s.size())
        throw InfeasibleError("secondary path '" + s.label() + "' is identically zero");
    if (p.delay() < s.delay())
        throw InfeasibleError("primary path delay " + std::to_string(p.delay()) +
                              " is shorter than secondary path delay " +
                              std::to_string(s.delay()) + "; P/S is not causal");

    // With white unit-variance x and u = s * x, the normal equations are
    // R_ij = E[u(n-i) u(n-j)] = r_ss(|i-j|) and r_i = E[d(n) u(n-i)].
    const auto st = s.taps();
    const auto pt = p.taps();
    const auto n = static_cast<Eigen::Index>(order);
    Eigen::MatrixXd R(n, n);
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            R(i, j) = correlate(st, st, static_cast<std::size_t>(std::abs(i - j)));
        r(i) = correlate(st, pt, static_cast<std::size_t>(i));
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(R, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(cond <= kMaxConditionNumber))
        throw ConditioningError("wiener_oracle: normal equations ill-conditioned (condition "
                                "number " + format_number(cond) + ")",
                                cond);

    const Eigen::VectorXd w = R.ldlt().solve(r);
    double dd = 0.0;
    for (double v : pt)
        dd += v * v;
    const double residual = std::max(0.0, dd - 2.0 * w.dot(r) + w.dot(R * w));

    return {paths::FirFilter(std::vector<double>(w.data(), w.data() + w.size()),
                             "wiener(" + p.label() + "/" + s.label() + ")"),
            residual, cond};
}

} // namespace fxlab::anc
