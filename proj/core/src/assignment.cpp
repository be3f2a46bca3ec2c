#include "sigcausal/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigcausal/error.hpp"

namespace sigcausal {

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const auto n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw UsageError("assignment: cost matrix must be square");
    if (!cost.allFinite()) throw NumericError("assignment: non-finite cost");
    if (n == 0) return {};

    // 1-based potentials u (rows), v (cols); p[j] is the row matched to column j.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col(n);
    for (int j = 1; j <= n; ++j) col[p[j] - 1] = j - 1;
    return col;
}

std::vector<int> solve_derangement(const Eigen::MatrixXd& cost) {
    const auto n = cost.rows();
    if (n < 2) throw UsageError("derangement: need at least 2 elements");
    if (cost.cols() != n) throw UsageError("derangement: cost matrix must be square");
    // Any derangement costs at most n * max|c|, so this barrier is never chosen.
    const double bound = cost.cwiseAbs().maxCoeff();
    const double barrier = 4.0 * static_cast<double>(n) * (bound + 1.0);
    Eigen::MatrixXd c = cost;
    c.diagonal().setConstant(barrier);
    std::vector<int> col = solve_assignment(c);
    for (Eigen::Index i = 0; i < n; ++i)
        if (col[static_cast<std::size_t>(i)] == i) throw NumericError("derangement: solver returned a fixed point");
    return col;
}

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& col) {
    double acc = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) acc += cost(static_cast<Eigen::Index>(i), col[i]);
    return acc;
}

}  // namespace sigcausal
