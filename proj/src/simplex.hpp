#pragma once

// Small dense two-phase simplex, templated on the scalar so the same pivoting
// runs in double or in exact rational arithmetic. Problems here have at most
// a few dozen variables; Bland's rule keeps it cycle-free.
//
// Standard form: minimize c.x  subject to  A x = b, x >= 0.

#include <optional>
#include <vector>

namespace sysmorse::detail {

template <class S>
struct LpResult {
    bool feasible = false;
    bool bounded = true;
    S objective{};
    std::vector<S> x;
};

template <class S>
class Simplex {
  public:
    Simplex(std::vector<std::vector<S>> A, std::vector<S> b, std::vector<S> c)
        : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)), m_(A_.size()),
          n_(A_.empty() ? 0 : A_[0].size()) {}

    LpResult<S> solve() {
        for (size_t i = 0; i < m_; ++i)
            if (b_[i] < S(0)) {
                for (auto& a : A_[i]) a = -a;
                b_[i] = -b_[i];
            }
        // phase 1: artificial basis
        size_t total = n_ + m_;
        tab_.assign(m_, std::vector<S>(total + 1, S(0)));
        basis_.resize(m_);
        for (size_t i = 0; i < m_; ++i) {
            for (size_t j = 0; j < n_; ++j) tab_[i][j] = A_[i][j];
            tab_[i][n_ + i] = S(1);
            tab_[i][total] = b_[i];
            basis_[i] = n_ + i;
        }
        std::vector<S> phase1(total, S(0));
        for (size_t j = n_; j < total; ++j) phase1[j] = S(1);
        if (!run(phase1, total, total)) return {};
        S art_sum{};
        for (size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_) art_sum += tab_[i][total];
        if (!(art_sum == S(0)) && !(art_sum < eps())) return {}; // infeasible
        // drive remaining artificials out of the basis when possible
        for (size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            size_t piv = n_;
            for (size_t j = 0; j < n_; ++j)
                if (!is_zero(tab_[i][j])) { piv = j; break; }
            if (piv < n_) pivot(i, piv);
        }
        // phase 2
        LpResult<S> res;
        res.feasible = true;
        // artificial columns may not re-enter in phase 2
        std::vector<S> cost(total, S(0));
        for (size_t j = 0; j < n_; ++j) cost[j] = c_[j];
        if (!run(cost, total, n_)) {
            res.bounded = false;
            return res;
        }
        res.x.assign(n_, S(0));
        for (size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) res.x[basis_[i]] = tab_[i][total];
        res.objective = S(0);
        for (size_t j = 0; j < n_; ++j) res.objective += c_[j] * res.x[j];
        return res;
    }

  private:
    static S eps() {
        if constexpr (std::is_floating_point_v<S>)
            return S(1e-11);
        else
            return S(0);
    }
    static bool is_zero(const S& v) {
        if constexpr (std::is_floating_point_v<S>)
            return v > -eps() && v < eps();
        else
            return v == S(0);
    }

    bool run(const std::vector<S>& cost, size_t total, size_t allowed) {
        for (long iter = 0; iter < 20000; ++iter) {
            // reduced costs: r_j = cost_j - cb . column_j
            size_t enter = total;
            for (size_t j = 0; j < allowed; ++j) {
                S r = cost[j];
                for (size_t i = 0; i < m_; ++i) r -= cost[basis_[i]] * tab_[i][j];
                if (r < -eps()) { enter = j; break; } // Bland: first improving index
            }
            if (enter == total) return true;
            size_t leave = m_;
            for (size_t i = 0; i < m_; ++i) {
                if (tab_[i][enter] > eps()) {
                    if (leave == m_) { leave = i; continue; }
                    S lhs = tab_[i][total] * tab_[leave][enter];
                    S rhs = tab_[leave][total] * tab_[i][enter];
                    if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[leave])) leave = i;
                }
            }
            if (leave == m_) return false; // unbounded
            pivot(leave, enter);
        }
        return false;
    }

    void pivot(size_t row, size_t col) {
        S p = tab_[row][col];
        for (auto& v : tab_[row]) v = v / p;
        for (size_t i = 0; i < m_; ++i) {
            if (i == row || is_zero(tab_[i][col])) continue;
            S f = tab_[i][col];
            for (size_t j = 0; j < tab_[i].size(); ++j) tab_[i][j] -= f * tab_[row][j];
        }
        basis_[row] = col;
    }

    std::vector<std::vector<S>> A_;
    std::vector<S> b_;
    std::vector<S> c_;
    size_t m_, n_;
    std::vector<std::vector<S>> tab_;
    std::vector<size_t> basis_;
};

} // namespace sysmorse::detail
