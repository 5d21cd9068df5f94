/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "rational.hpp"

#include <cassert>
#include <optional>
#include <vector>

namespace zv {

inline bool is_zero(const Rat &q) { return sgn(q) == 0; }

/* Dense exact linear algebra over any field type providing +,-,*,/ and
 * an unqualified is_zero(x) found in namespace zv. */

template <class T> using Vec = std::vector<T>;
template <class T> using Mat = std::vector<std::vector<T>>;

template <class T> Mat<T> mat_identity(size_t n, const T &zero, const T &one)
{
	Mat<T> m(n, Vec<T>(n, zero));
	for (size_t i = 0; i < n; i++)
		m[i][i] = one;
	return m;
}

template <class T> Mat<T> transpose(const Mat<T> &a)
{
	if (a.empty())
		return {};
	Mat<T> r(a[0].size(), Vec<T>(a.size(), a[0][0]));
	for (size_t i = 0; i < a.size(); i++)
		for (size_t j = 0; j < a[i].size(); j++)
			r[j][i] = a[i][j];
	return r;
}

template <class T> Vec<T> mat_vec(const Mat<T> &a, const Vec<T> &x)
{
	Vec<T> r;
	r.reserve(a.size());
	for (auto &row : a) {
		assert(row.size() == x.size());
		T s = row[0] * x[0];
		for (size_t j = 1; j < x.size(); j++)
			s = s + row[j] * x[j];
		r.push_back(s);
	}
	return r;
}

template <class T> Mat<T> mat_mul(const Mat<T> &a, const Mat<T> &b)
{
	Mat<T> r(a.size());
	for (size_t i = 0; i < a.size(); i++) {
		r[i].reserve(b[0].size());
		for (size_t j = 0; j < b[0].size(); j++) {
			T s = a[i][0] * b[0][j];
			for (size_t k = 1; k < b.size(); k++)
				s = s + a[i][k] * b[k][j];
			r[i].push_back(s);
		}
	}
	return r;
}

/* Row-reduce in place; returns pivot columns. Augmented columns (the last
 * `aug` ones) are excluded from pivot selection. */
template <class T> std::vector<size_t> row_reduce(Mat<T> &m, size_t aug = 0)
{
	std::vector<size_t> pivots;
	if (m.empty())
		return pivots;
	size_t rows = m.size(), cols = m[0].size() - aug;
	size_t r = 0;
	for (size_t c = 0; c < cols && r < rows; c++) {
		size_t p = r;
		while (p < rows && is_zero(m[p][c]))
			p++;
		if (p == rows)
			continue;
		std::swap(m[p], m[r]);
		T inv_piv = m[r][c];
		for (size_t j = c; j < m[r].size(); j++)
			m[r][j] = m[r][j] / inv_piv;
		for (size_t i = 0; i < rows; i++) {
			if (i == r || is_zero(m[i][c]))
				continue;
			T f = m[i][c];
			for (size_t j = c; j < m[i].size(); j++)
				m[i][j] = m[i][j] - f * m[r][j];
		}
		pivots.push_back(c);
		r++;
	}
	return pivots;
}

template <class T> size_t rank(Mat<T> m)
{
	return row_reduce(m).size();
}

/* Any solution of A x = b, or nullopt if inconsistent. */
template <class T>
std::optional<Vec<T>> solve(const Mat<T> &a, const Vec<T> &b, const T &zero)
{
	assert(a.size() == b.size());
	if (a.empty())
		return Vec<T>{};
	size_t cols = a[0].size();
	Mat<T> m(a.size());
	for (size_t i = 0; i < a.size(); i++) {
		m[i] = a[i];
		m[i].push_back(b[i]);
	}
	auto pivots = row_reduce(m, 1);
	for (size_t i = pivots.size(); i < m.size(); i++)
		if (!is_zero(m[i][cols]))
			return std::nullopt;
	Vec<T> x(cols, zero);
	for (size_t i = 0; i < pivots.size(); i++)
		x[pivots[i]] = m[i][cols];
	return x;
}

/* Basis of the right kernel of A. */
template <class T> Mat<T> nullspace(Mat<T> m, size_t cols, const T &zero, const T &one)
{
	auto pivots = row_reduce(m);
	std::vector<bool> is_pivot(cols, false);
	for (size_t c : pivots)
		is_pivot[c] = true;
	Mat<T> basis;
	for (size_t c = 0; c < cols; c++) {
		if (is_pivot[c])
			continue;
		Vec<T> v(cols, zero);
		v[c] = one;
		for (size_t i = 0; i < pivots.size(); i++)
			v[pivots[i]] = zero - m[i][c];
		basis.push_back(v);
	}
	return basis;
}

template <class T> T det(Mat<T> m, const T &zero, const T &one)
{
	size_t n = m.size();
	T d = one;
	for (size_t c = 0; c < n; c++) {
		size_t p = c;
		while (p < n && is_zero(m[p][c]))
			p++;
		if (p == n)
			return zero;
		if (p != c) {
			std::swap(m[p], m[c]);
			d = zero - d;
		}
		d = d * m[c][c];
		T piv = m[c][c];
		for (size_t i = c + 1; i < n; i++) {
			if (is_zero(m[i][c]))
				continue;
			T f = m[i][c] / piv;
			for (size_t j = c; j < n; j++)
				m[i][j] = m[i][j] - f * m[c][j];
		}
	}
	return d;
}

template <class T>
std::optional<Mat<T>> inverse(const Mat<T> &a, const T &zero, const T &one)
{
	size_t n = a.size();
	Mat<T> m(n);
	for (size_t i = 0; i < n; i++) {
		m[i] = a[i];
		for (size_t j = 0; j < n; j++)
			m[i].push_back(i == j ? one : zero);
	}
	auto pivots = row_reduce(m, n);
	if (pivots.size() < n)
		return std::nullopt;
	Mat<T> r(n);
	for (size_t i = 0; i < n; i++)
		r[i].assign(m[i].begin() + n, m[i].end());
	return r;
}

} // namespace zv
