/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "matrix.hpp"
#include "rational.hpp"

#include <optional>
#include <stdexcept>

namespace zv {

using IMat = Mat<Int>;
using IVec = Vec<Int>;

inline bool is_zero(const Int &n) { return sgn(n) == 0; }

inline Mat<Rat> to_rat_mat(const IMat &m)
{
	Mat<Rat> r(m.size());
	for (size_t i = 0; i < m.size(); i++)
		for (auto &x : m[i])
			r[i].push_back(Rat(x));
	return r;
}

inline Int idet(const IMat &m)
{
	Rat d = det(to_rat_mat(m), Rat(0), Rat(1));
	return d.get_num(); /* integer input has integer determinant */
}

inline bool is_unimodular(const IMat &m)
{
	if (m.empty())
		return true;
	if (m.size() != m[0].size())
		throw std::invalid_argument("is_unimodular requires a square matrix");
	return abs(idet(m)) == 1;
}

inline IVec primitive(IVec v)
{
	Int g = 0;
	for (auto &x : v)
		g = gcd(g, x);
	if (g == 0)
		throw std::invalid_argument("primitive of zero vector");
	for (auto &x : v)
		x /= g;
	for (auto &x : v) {
		if (x != 0) {
			if (x < 0)
				for (auto &y : v)
					y = -y;
			break;
		}
	}
	return v;
}

/* Row-style Hermite normal form: echelon with positive pivots, entries above
 * each pivot reduced into [0, pivot). Zero rows sink to the bottom. */
inline IMat hnf(IMat m)
{
	if (m.empty())
		return m;
	size_t rows = m.size(), cols = m[0].size(), r = 0;
	for (size_t c = 0; c < cols && r < rows; c++) {
		/* gcd-eliminate below position (r, c) */
		for (;;) {
			size_t p = rows;
			for (size_t i = r; i < rows; i++)
				if (m[i][c] != 0 && (p == rows || abs(m[i][c]) < abs(m[p][c])))
					p = i;
			if (p == rows)
				break;
			std::swap(m[p], m[r]);
			bool done = true;
			for (size_t i = r + 1; i < rows; i++) {
				if (m[i][c] == 0)
					continue;
				Int q = floor_div(m[i][c], m[r][c]);
				for (size_t j = 0; j < cols; j++)
					m[i][j] -= q * m[r][j];
				if (m[i][c] != 0)
					done = false;
			}
			if (done)
				break;
		}
		if (m[r][c] == 0)
			continue;
		if (m[r][c] < 0)
			for (size_t j = 0; j < cols; j++)
				m[r][j] = -m[r][j];
		for (size_t i = 0; i < r; i++) {
			Int q = floor_div(m[i][c], m[r][c]);
			for (size_t j = 0; j < cols; j++)
				m[i][j] -= q * m[r][j];
		}
		r++;
	}
	return m;
}

/* Smith normal form: u * a * v = d with u, v unimodular, diagonal entries
 * non-negative with successive divisibility. */
struct Snf {
	IMat d, u, v;
	IVec diag; /* nonzero diagonal entries */
};

inline Snf snf(const IMat &a)
{
	size_t rows = a.size(), cols = rows ? a[0].size() : 0;
	Snf s;
	s.d = a;
	s.u = mat_identity<Int>(rows, 0, 1);
	s.v = mat_identity<Int>(cols, 0, 1);
	IMat &d = s.d, &u = s.u, &v = s.v;

	auto row_sub = [&](size_t i, size_t k, const Int &q) {
		for (size_t j = 0; j < cols; j++)
			d[i][j] -= q * d[k][j];
		for (size_t j = 0; j < rows; j++)
			u[i][j] -= q * u[k][j];
	};
	auto col_sub = [&](size_t j, size_t k, const Int &q) {
		for (size_t i = 0; i < rows; i++)
			d[i][j] -= q * d[i][k];
		for (size_t i = 0; i < cols; i++)
			v[i][j] -= q * v[i][k];
	};
	auto row_swap = [&](size_t i, size_t k) {
		std::swap(d[i], d[k]);
		std::swap(u[i], u[k]);
	};
	auto col_swap = [&](size_t j, size_t k) {
		for (size_t i = 0; i < rows; i++)
			std::swap(d[i][j], d[i][k]);
		for (size_t i = 0; i < cols; i++)
			std::swap(v[i][j], v[i][k]);
	};

	size_t t = 0;
	while (t < rows && t < cols) {
		/* find a pivot */
		size_t pi = rows, pj = cols;
		for (size_t i = t; i < rows; i++)
			for (size_t j = t; j < cols; j++)
				if (d[i][j] != 0 &&
				    (pi == rows || abs(d[i][j]) < abs(d[pi][pj]))) {
					pi = i;
					pj = j;
				}
		if (pi == rows)
			break;
		row_swap(t, pi);
		col_swap(t, pj);
		bool clean = true;
		for (size_t i = t + 1; i < rows; i++) {
			if (d[i][t] == 0)
				continue;
			Int q = floor_div(d[i][t], d[t][t]);
			row_sub(i, t, q);
			if (d[i][t] != 0)
				clean = false;
		}
		for (size_t j = t + 1; j < cols; j++) {
			if (d[t][j] == 0)
				continue;
			Int q = floor_div(d[t][j], d[t][t]);
			col_sub(j, t, q);
			if (d[t][j] != 0)
				clean = false;
		}
		if (!clean)
			continue;
		/* enforce divisibility d[t][t] | d[i][j] */
		bool fixed = true;
		for (size_t i = t + 1; i < rows && fixed; i++)
			for (size_t j = t + 1; j < cols && fixed; j++)
				if (d[i][j] % d[t][t] != 0) {
					/* add row i to row t and restart block */
					row_sub(t, i, Int(-1));
					fixed = false;
				}
		if (!fixed)
			continue;
		if (d[t][t] < 0) {
			for (size_t j = 0; j < cols; j++)
				d[t][j] = -d[t][j];
			for (size_t j = 0; j < rows; j++)
				u[t][j] = -u[t][j];
		}
		t++;
	}
	for (size_t i = 0; i < std::min(rows, cols); i++)
		if (d[i][i] != 0)
			s.diag.push_back(d[i][i]);
	return s;
}

/* Index of the subgroup generated by the rows inside the saturated lattice of
 * their span. nullopt means infinite (empty generators in positive ambient
 * rank, or rank-deficient when compare_full_rank is set). */
inline std::optional<Int> lattice_index(const IMat &generators, size_t ambient_rank,
                                        bool compare_full_rank = false)
{
	bool all_zero = true;
	for (auto &row : generators)
		for (auto &x : row)
			if (x != 0)
				all_zero = false;
	if (generators.empty() || all_zero)
		return ambient_rank == 0 ? std::optional<Int>(1) : std::nullopt;
	Snf s = snf(generators);
	if (compare_full_rank && s.diag.size() < ambient_rank)
		return std::nullopt;
	Int idx = 1;
	for (auto &d : s.diag)
		idx *= d;
	return idx;
}

/* Basis of span(rows) ∩ Z^n. */
inline IMat saturate(const IMat &generators)
{
	if (generators.empty())
		return {};
	Snf s = snf(generators);
	size_t r = s.diag.size(), cols = generators[0].size();
	if (r == 0)
		return {};
	/* rows(A) = rows(D V^-1) up to left-unimodular; saturation = first r
	 * rows of V^-1 */
	auto vinv_q = inverse(to_rat_mat(s.v), Rat(0), Rat(1));
	IMat basis;
	for (size_t i = 0; i < r; i++) {
		IVec row;
		for (size_t j = 0; j < cols; j++) {
			Rat q = (*vinv_q)[i][j];
			if (q.get_den() != 1)
				throw std::logic_error("saturate: non-integer inverse");
			row.push_back(q.get_num());
		}
		basis.push_back(row);
	}
	return basis;
}

} // namespace zv
