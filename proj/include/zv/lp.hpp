/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "matrix.hpp"

#include <cassert>
#include <vector>

namespace zv {

/* Exact two-phase primal simplex with Bland's rule, over any ordered field T
 * with is_zero and sign (unqualified, found in namespace zv).
 *
 * Problem form: maximize c.x subject to A x <= b, x free. */

enum class LpStatus { optimal, infeasible, unbounded };

template <class T> struct LpResult {
	LpStatus status;
	Vec<T> x;
	T value;
};

template <class T> int lp_sign(const T &x) { return sign(x); }
inline int lp_sign(const Rat &x) { return sgn(x); }

template <class T> class SimplexTableau {
public:
	/* columns: 0..2n-1 split vars, 2n..2n+m-1 slacks, then m artificials,
	 * last column rhs */
	SimplexTableau(const Mat<T> &A, const Vec<T> &b, const T &zero, const T &one)
	    : zero(zero), one(one), m(A.size()), n(A.empty() ? 0 : A[0].size())
	{
		cols = 2 * n + 2 * m + 1;
		tab.assign(m, Vec<T>(cols, zero));
		basis.assign(m, 0);
		for (size_t i = 0; i < m; i++) {
			int s = lp_sign(b[i]);
			T f = s < 0 ? zero - one : one;
			for (size_t j = 0; j < n; j++) {
				tab[i][j] = f * A[i][j];
				tab[i][n + j] = zero - f * A[i][j];
			}
			tab[i][2 * n + i] = f;
			tab[i][2 * n + m + i] = one;
			tab[i][cols - 1] = f * b[i];
			basis[i] = 2 * n + m + i;
		}
	}

	/* returns false on infeasible */
	bool phase1()
	{
		Vec<T> cost(cols - 1, zero);
		for (size_t j = 2 * n + m; j < 2 * n + 2 * m; j++)
			cost[j] = one;
		T opt = run(cost);
		if (lp_sign(opt) != 0)
			return false;
		/* pivot remaining artificials out of the basis when possible */
		for (size_t i = 0; i < m; i++) {
			if (basis[i] < 2 * n + m)
				continue;
			size_t enter = cols - 1;
			for (size_t j = 0; j < 2 * n + m; j++)
				if (!is_zero(tab[i][j])) {
					enter = j;
					break;
				}
			if (enter != cols - 1)
				pivot(i, enter);
			/* otherwise the row is all-zero on structural columns:
			 * redundant constraint, harmless */
		}
		artificial_banned = true;
		return true;
	}

	/* maximize c.x over the original variables; call after phase1 */
	LpResult<T> phase2(const Vec<T> &c)
	{
		Vec<T> cost(cols - 1, zero);
		for (size_t j = 0; j < n; j++) {
			cost[j] = zero - c[j];
			cost[n + j] = c[j];
		}
		bool bounded = true;
		T opt = run(cost, &bounded);
		LpResult<T> r{LpStatus::optimal, Vec<T>(n, zero), zero - opt};
		if (!bounded) {
			r.status = LpStatus::unbounded;
			return r;
		}
		Vec<T> y(cols - 1, zero);
		for (size_t i = 0; i < m; i++)
			y[basis[i]] = tab[i][cols - 1];
		for (size_t j = 0; j < n; j++)
			r.x[j] = y[j] - y[n + j];
		return r;
	}

private:
	T zero, one;
	size_t m, n, cols;
	Mat<T> tab;
	std::vector<size_t> basis;
	bool artificial_banned = false;

	void pivot(size_t row, size_t col)
	{
		T piv = tab[row][col];
		for (auto &x : tab[row])
			x = x / piv;
		for (size_t i = 0; i < m; i++) {
			if (i == row || is_zero(tab[i][col]))
				continue;
			T f = tab[i][col];
			for (size_t j = 0; j < cols; j++)
				tab[i][j] = tab[i][j] - f * tab[row][j];
		}
		basis[row] = col;
	}

	/* minimize cost.y; returns optimal value; Bland's rule */
	T run(const Vec<T> &cost, bool *bounded = nullptr)
	{
		size_t limit = artificial_banned ? 2 * n + m : 2 * n + 2 * m;
		for (;;) {
			/* reduced costs: cost_j - cost_B . column_j */
			Vec<T> dual(m, zero);
			for (size_t i = 0; i < m; i++)
				dual[i] = cost[basis[i]];
			size_t enter = cols;
			for (size_t j = 0; j < limit && enter == cols; j++) {
				bool basic = false;
				for (size_t i = 0; i < m; i++)
					if (basis[i] == j)
						basic = true;
				if (basic)
					continue;
				T rc = cost[j];
				for (size_t i = 0; i < m; i++)
					if (!is_zero(tab[i][j]))
						rc = rc - dual[i] * tab[i][j];
				if (lp_sign(rc) < 0)
					enter = j;
			}
			if (enter == cols)
				break;
			size_t leave = m;
			for (size_t i = 0; i < m; i++) {
				if (lp_sign(tab[i][enter]) <= 0)
					continue;
				if (leave == m)
					leave = i;
				else {
					T cur = tab[i][cols - 1] / tab[i][enter];
					T best = tab[leave][cols - 1] / tab[leave][enter];
					T diff = cur - best;
					int s = lp_sign(diff);
					if (s < 0 || (s == 0 && basis[i] < basis[leave]))
						leave = i;
				}
			}
			if (leave == m) {
				if (bounded)
					*bounded = false;
				return zero;
			}
			pivot(leave, enter);
		}
		T val = zero;
		for (size_t i = 0; i < m; i++)
			val = val + cost[basis[i]] * tab[i][cols - 1];
		return val;
	}
};

template <class T>
LpResult<T> lp_maximize(const Mat<T> &A, const Vec<T> &b, const Vec<T> &c,
                        const T &zero, const T &one)
{
	SimplexTableau<T> t(A, b, zero, one);
	if (!t.phase1())
		return {LpStatus::infeasible, {}, zero};
	return t.phase2(c);
}

template <class T>
std::optional<Vec<T>> lp_feasible_point(const Mat<T> &A, const Vec<T> &b,
                                        const T &zero, const T &one)
{
	if (A.empty())
		return Vec<T>{};
	Vec<T> c(A[0].size(), zero);
	auto r = lp_maximize(A, b, c, zero, one);
	if (r.status == LpStatus::infeasible)
		return std::nullopt;
	return r.x;
}

} // namespace zv
