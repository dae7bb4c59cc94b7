#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace revpanel::linalg {

struct LeastSquares {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd xtx_inv;  // (X'X)^-1
};

// Least squares via column-pivoted Householder QR. Throws
// RankDeficientError naming the dependent columns when X lacks full column
// rank (relative tolerance `rank_tol`).
LeastSquares solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const std::vector<std::string>& names, double rank_tol = 1e-10);

// Indices (ascending) of columns that are linear combinations of the
// others, after scaling every column to unit norm.
std::vector<std::size_t> dependent_columns(const Eigen::MatrixXd& x, double rank_tol = 1e-10);

// Moore-Penrose inverse of a symmetric positive semi-definite matrix.
Eigen::MatrixXd pinv_symmetric(const Eigen::MatrixXd& a, double rel_tol = 1e-12);

// Column indices of `x` that are numerically constant (max - min below
// tol * max(1, |max|)).
std::vector<std::size_t> constant_columns(const Eigen::MatrixXd& x, double tol = 1e-12);

double mean(std::span<const double> v);
// Sample standard deviation (n - 1). nullopt for fewer than two values.
std::optional<double> sample_sd(std::span<const double> v);
// Median of a copy; nullopt when empty.
std::optional<double> median(std::vector<double> v);

// Standard normal CDF and two-sided p-value.
double normal_cdf(double z);
double two_sided_p(double z);

}  // namespace revpanel::linalg
