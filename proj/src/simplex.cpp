#include "kref/simplex.hpp"

#include <stdexcept>

namespace kref {

namespace {

/// Tableau with rows 0..m-1 the constraints and row m the objective
/// (reduced costs; maximization). basis[i] is the variable of row i.
struct Tableau {
    std::size_t m, n;  // constraints, structural+slack+artificial columns
    std::vector<std::vector<Rat>> t;  // (m+1) x (n+1); column n is the rhs
    std::vector<std::size_t> basis;

    void pivot(std::size_t row, std::size_t col) {
        const Rat piv = t[row][col];
        for (auto& v : t[row]) v /= piv;
        for (std::size_t r = 0; r <= m; ++r) {
            if (r == row) continue;
            const Rat factor = t[r][col];
            if (factor == 0) continue;
            for (std::size_t c = 0; c <= n; ++c) t[r][c] -= factor * t[row][c];
        }
        basis[row] = col;
    }

    /// Primal simplex with Bland's rule; assumes the current basis is
    /// feasible. Returns false on unboundedness.
    bool run() {
        while (true) {
            std::size_t enter = n;
            for (std::size_t c = 0; c < n; ++c) {
                if (t[m][c] > 0) {  // reduced cost favors entering
                    enter = c;
                    break;
                }
            }
            if (enter == n) return true;
            std::size_t leave = m;
            Rat best_ratio(0);
            for (std::size_t r = 0; r < m; ++r) {
                if (t[r][enter] > 0) {
                    Rat ratio = t[r][n] / t[r][enter];
                    if (leave == m || ratio < best_ratio ||
                        (ratio == best_ratio && basis[r] < basis[leave])) {
                        leave = r;
                        best_ratio = ratio;
                    }
                }
            }
            if (leave == m) return false;
            pivot(leave, enter);
        }
    }
};

}  // namespace

LpResult simplex_max_nonneg_rhs(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                                const std::vector<Rat>& c) {
    const std::size_t rows = a.size(), cols = c.size();
    for (const auto& bi : b)
        if (bi < 0) throw std::invalid_argument("simplex_max_nonneg_rhs: negative rhs");
    Tableau tab;
    tab.m = rows;
    tab.n = cols + rows;  // slacks
    tab.t.assign(rows + 1, std::vector<Rat>(tab.n + 1, Rat(0)));
    tab.basis.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) tab.t[r][j] = a[r][j];
        tab.t[r][cols + r] = 1;
        tab.t[r][tab.n] = b[r];
        tab.basis[r] = cols + r;
    }
    for (std::size_t j = 0; j < cols; ++j) tab.t[rows][j] = c[j];
    LpResult res;
    if (!tab.run()) {
        res.status = LpResult::Status::Unbounded;
        return res;
    }
    res.status = LpResult::Status::Optimal;
    res.solution.assign(cols, Rat(0));
    for (std::size_t r = 0; r < rows; ++r)
        if (tab.basis[r] < cols) res.solution[tab.basis[r]] = tab.t[r][tab.n];
    res.objective = Rat(0);
    for (std::size_t j = 0; j < cols; ++j) res.objective += c[j] * res.solution[j];
    return res;
}

namespace {

LpResult two_phase(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                   const std::vector<Rat>* c) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : (c ? c->size() : 0);
    Tableau tab;
    tab.m = rows;
    tab.n = cols + rows;  // artificials
    tab.t.assign(rows + 1, std::vector<Rat>(tab.n + 1, Rat(0)));
    tab.basis.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const int flip = b[r] < 0 ? -1 : 1;
        for (std::size_t j = 0; j < cols; ++j) tab.t[r][j] = Rat(flip) * a[r][j];
        tab.t[r][cols + r] = 1;
        tab.t[r][tab.n] = Rat(flip) * b[r];
        tab.basis[r] = cols + r;
    }
    // phase I: maximize -sum(artificials) -> price out
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j <= tab.n; ++j)
            if (j < cols || j == tab.n) tab.t[rows][j] += tab.t[r][j];
    // objective row currently holds sum of rows over structural+rhs; reduced
    // costs for maximizing -sum a_i: positive entries favour pivots.
    if (!tab.run()) throw std::logic_error("phase I unbounded");
    LpResult res;
    if (tab.t[rows][tab.n] != 0) {
        res.status = LpResult::Status::Infeasible;
        return res;
    }
    // drive any artificial out of the basis where possible
    for (std::size_t r = 0; r < rows; ++r) {
        if (tab.basis[r] >= cols) {
            for (std::size_t j = 0; j < cols; ++j) {
                if (tab.t[r][j] != 0) {
                    tab.pivot(r, j);
                    break;
                }
            }
        }
    }
    // phase II: retire the artificial columns entirely (zero them out so no
    // pivot touches them, and keep their reduced costs negative)
    for (std::size_t j = cols; j < tab.n; ++j)
        for (std::size_t r = 0; r <= rows; ++r) tab.t[r][j] = 0;
    for (std::size_t j = 0; j <= tab.n; ++j) tab.t[rows][j] = 0;
    if (c) {
        for (std::size_t j = 0; j < cols; ++j) tab.t[rows][j] = (*c)[j];
        // price out the basis
        for (std::size_t r = 0; r < rows; ++r) {
            if (tab.basis[r] < cols && tab.t[rows][tab.basis[r]] != 0) {
                const Rat factor = tab.t[rows][tab.basis[r]];
                for (std::size_t j = 0; j <= tab.n; ++j) tab.t[rows][j] -= factor * tab.t[r][j];
            }
        }
        for (std::size_t j = cols; j < tab.n; ++j) tab.t[rows][j] = Rat(-1);
        if (!tab.run()) {
            res.status = LpResult::Status::Unbounded;
            return res;
        }
    }
    res.status = LpResult::Status::Optimal;
    res.solution.assign(cols, Rat(0));
    for (std::size_t r = 0; r < rows; ++r) {
        if (tab.basis[r] < cols) res.solution[tab.basis[r]] = tab.t[r][tab.n];
        else if (tab.t[r][tab.n] != 0)
            throw std::logic_error("artificial stuck in basis at nonzero level");
    }
    res.objective = Rat(0);
    if (c)
        for (std::size_t j = 0; j < cols; ++j) res.objective += (*c)[j] * res.solution[j];
    return res;
}

}  // namespace

LpResult simplex_feasible_eq(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b) {
    return two_phase(a, b, nullptr);
}

LpResult simplex_max_eq(const std::vector<std::vector<Rat>>& a, const std::vector<Rat>& b,
                        const std::vector<Rat>& c) {
    return two_phase(a, b, &c);
}

}  // namespace kref
