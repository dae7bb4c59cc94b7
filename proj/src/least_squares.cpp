#include "revpanel/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "revpanel/error.hpp"

namespace revpanel::linalg {

LeastSquares solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const std::vector<std::string>& names, double rank_tol) {
    const Eigen::Index k = x.cols();
    if (x.rows() < k) {
        throw InsufficientDataError(fmt::format("{} observations for {} parameters", x.rows(), k));
    }
    // Scale columns so the rank decision is unit-free.
    Eigen::VectorXd scale(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        double n = x.col(j).norm();
        scale(j) = n > 0 ? n : 1.0;
    }
    Eigen::MatrixXd xs = x * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(rank_tol);
    if (qr.rank() < k) {
        std::vector<std::string> dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index p = qr.rank(); p < k; ++p) {
            auto j = static_cast<std::size_t>(perm(p));
            dependent.push_back(j < names.size() ? names[j] : fmt::format("col{}", j));
        }
        std::sort(dependent.begin(), dependent.end());
        throw RankDeficientError(
            fmt::format("design matrix is rank deficient; collinear columns: {}", fmt::join(dependent, ", ")),
            dependent);
    }
    LeastSquares out;
    out.coef = qr.solve(y).cwiseQuotient(scale);
    out.residuals = y - x * out.coef;
    Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd inv_scaled = r_inv * r_inv.transpose();  // permuted, scaled
    Eigen::MatrixXd unperm = qr.colsPermutation() * inv_scaled * qr.colsPermutation().transpose();
    out.xtx_inv = scale.cwiseInverse().asDiagonal() * unperm * scale.cwiseInverse().asDiagonal();
    return out;
}

std::vector<std::size_t> dependent_columns(const Eigen::MatrixXd& x, double rank_tol) {
    const Eigen::Index k = x.cols();
    Eigen::MatrixXd xs = x;
    for (Eigen::Index j = 0; j < k; ++j) {
        double n = x.col(j).norm();
        if (n > 0) xs.col(j) /= n;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    qr.setThreshold(rank_tol);
    std::vector<std::size_t> out;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index p = qr.rank(); p < k; ++p) out.push_back(static_cast<std::size_t>(perm(p)));
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::MatrixXd pinv_symmetric(const Eigen::MatrixXd& a, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = rel_tol * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd inv(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) inv(i) = ev(i) > cut ? 1.0 / ev(i) : 0.0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

std::vector<std::size_t> constant_columns(const Eigen::MatrixXd& x, double tol) {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (x.rows() == 0) {
            out.push_back(static_cast<std::size_t>(j));
            continue;
        }
        double hi = x.col(j).maxCoeff();
        double lo = x.col(j).minCoeff();
        if (hi - lo <= tol * std::max(1.0, std::max(std::abs(hi), std::abs(lo)))) {
            out.push_back(static_cast<std::size_t>(j));
        }
    }
    return out;
}

double mean(std::span<const double> v) {
    if (v.empty()) return std::nan("");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<double> sample_sd(std::span<const double> v) {
    if (v.size() < 2) return std::nullopt;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::optional<double> median(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double two_sided_p(double z) {
    if (!std::isfinite(z)) return std::isnan(z) ? std::nan("") : 0.0;
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

}  // namespace revpanel::linalg
