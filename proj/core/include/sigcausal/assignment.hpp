#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sigcausal {

/// Exact minimum-cost perfect assignment on a square cost matrix
/// (shortest augmenting paths with potentials, O(n^3)).
/// Returns col[i], the column assigned to row i.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Minimum-cost permutation without fixed points (n >= 2).
std::vector<int> solve_derangement(const Eigen::MatrixXd& cost);

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& col);

}  // namespace sigcausal
