/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "lp.hpp"
#include "polytope.hpp"

#include <map>
#include <set>
#include <string>

namespace zv {

/* ---------- polyhedral complexes ---------- */

struct Cell {
	std::vector<int> vertices; /* indices into the shared point store */
	std::string label;
};

class PolyComplex {
public:
	FieldPtr F;
	std::vector<Point> points;
	std::vector<Cell> cells;

	PolyComplex() = default;
	explicit PolyComplex(FieldPtr f) : F(std::move(f)) {}

	/* index of p in the point store, inserting if absent */
	int point_id(const Point &p)
	{
		for (size_t i = 0; i < points.size(); i++)
			if (point_eq(points[i], p))
				return (int)i;
		points.push_back(p);
		return (int)points.size() - 1;
	}

	int find_point(const Point &p) const
	{
		for (size_t i = 0; i < points.size(); i++)
			if (point_eq(points[i], p))
				return (int)i;
		return -1;
	}

	void add_cell(const VPolytope &p, std::string label = "")
	{
		Cell c;
		for (auto &v : p.vertices)
			c.vertices.push_back(point_id(v));
		std::sort(c.vertices.begin(), c.vertices.end());
		c.label = std::move(label);
		cells.push_back(c);
		realized.clear();
	}

	void add_cell(std::vector<int> verts, std::string label = "")
	{
		std::sort(verts.begin(), verts.end());
		cells.push_back({std::move(verts), std::move(label)});
		realized.clear();
	}

	const VPolytope &cell_polytope(size_t i) const
	{
		if (realized.size() != cells.size()) {
			realized.clear();
			for (auto &c : cells) {
				std::vector<Point> pts;
				for (int v : c.vertices)
					pts.push_back(points.at(v));
				realized.push_back(hull(pts));
			}
		}
		return realized[i];
	}

	size_t max_dim() const
	{
		size_t d = 0;
		for (size_t i = 0; i < cells.size(); i++)
			d = std::max(d, cell_polytope(i).dim);
		return d;
	}

	/* cell indices of top dimension */
	std::vector<size_t> top_cells() const
	{
		size_t d = max_dim();
		std::vector<size_t> out;
		for (size_t i = 0; i < cells.size(); i++)
			if (cell_polytope(i).dim == d)
				out.push_back(i);
		return out;
	}

private:
	mutable std::vector<VPolytope> realized;
};

inline PolyComplex complex_of(const std::vector<VPolytope> &cells, FieldPtr F)
{
	PolyComplex x(std::move(F));
	for (auto &c : cells)
		x.add_cell(c);
	return x;
}

/* ---------- validity ---------- */

struct ComplexViolation {
	size_t cell_a, cell_b;
	std::string reason;
};

struct ComplexReport {
	std::vector<ComplexViolation> violations;
	bool ok() const { return violations.empty(); }
};

namespace detail {

/* inequality system for membership in a cell: facet halfspaces plus span
 * equalities, in the form A x <= b */
inline void cell_constraints(const VPolytope &p, Mat<Scalar> &A, Vec<Scalar> &b)
{
	const FieldPtr &F = p.F;
	for (auto &h : p.facets) {
		Vec<Scalar> row;
		for (auto &x : h.normal)
			row.push_back(-x);
		A.push_back(row);
		b.push_back(h.offset);
	}
	/* span equalities: n . (x - base) = 0 for complement functionals */
	Mat<Scalar> rows = p.span_rref;
	if (rows.empty())
		rows.push_back(Vec<Scalar>(p.ambient_dim, F->zero()));
	Mat<Scalar> comp = nullspace(rows, p.ambient_dim, F->zero(), F->one());
	for (auto &n : comp) {
		Scalar rhs = dot(Point(n.begin(), n.end()), p.base);
		A.push_back(n);
		b.push_back(rhs);
		Vec<Scalar> neg;
		for (auto &x : n)
			neg.push_back(-x);
		A.push_back(neg);
		b.push_back(-rhs);
	}
}

inline bool cells_intersect(const VPolytope &p, const VPolytope &q)
{
	/* bounding-box prefilter */
	const FieldPtr &F = p.F;
	for (size_t j = 0; j < p.ambient_dim; j++) {
		Scalar pmin = p.vertices[0][j], pmax = pmin;
		for (auto &v : p.vertices) {
			if (sign(v[j] - pmin) < 0)
				pmin = v[j];
			if (sign(v[j] - pmax) > 0)
				pmax = v[j];
		}
		Scalar qmin = q.vertices[0][j], qmax = qmin;
		for (auto &v : q.vertices) {
			if (sign(v[j] - qmin) < 0)
				qmin = v[j];
			if (sign(v[j] - qmax) > 0)
				qmax = v[j];
		}
		if (sign(qmin - pmax) > 0 || sign(pmin - qmax) > 0)
			return false;
	}
	Mat<Scalar> A;
	Vec<Scalar> b;
	cell_constraints(p, A, b);
	cell_constraints(q, A, b);
	return lp_feasible_point(A, b, F->zero(), F->one()).has_value();
}

/* max of a linear functional over the intersection of two cells */
inline Scalar max_over_intersection(const VPolytope &p, const VPolytope &q,
                                    const Point &n, const Scalar &off)
{
	const FieldPtr &F = p.F;
	Mat<Scalar> A;
	Vec<Scalar> b;
	cell_constraints(p, A, b);
	cell_constraints(q, A, b);
	Vec<Scalar> c(n.begin(), n.end());
	auto r = lp_maximize(A, b, c, F->zero(), F->one());
	if (r.status != LpStatus::optimal)
		throw std::logic_error("unbounded cell intersection");
	return r.value + off;
}

inline bool is_face_vertex_set(const VPolytope &p, const std::vector<int> &vs)
{
	for (auto &level : p.faces)
		for (auto &f : level)
			if (f == vs)
				return true;
	return false;
}

} // namespace detail

inline ComplexReport validate(const PolyComplex &x)
{
	ComplexReport rep;
	for (size_t a = 0; a < x.cells.size(); a++) {
		for (int v : x.cells[a].vertices)
			if (v < 0 || (size_t)v >= x.points.size()) {
				rep.violations.push_back({a, a, "vertex index out of range"});
				return rep;
			}
		/* cell vertex lists must name actual hull vertices */
		if (x.cell_polytope(a).vertices.size() != x.cells[a].vertices.size())
			rep.violations.push_back({a, a, "cell has non-vertex points"});
	}
	if (!rep.ok())
		return rep;
	for (size_t a = 0; a < x.cells.size(); a++) {
		for (size_t b = a + 1; b < x.cells.size(); b++) {
			if (x.cells[a].vertices == x.cells[b].vertices) {
				rep.violations.push_back({a, b, "duplicate cell"});
				continue;
			}
			const VPolytope &P = x.cell_polytope(a);
			const VPolytope &Q = x.cell_polytope(b);
			if (!detail::cells_intersect(P, Q))
				continue;
			/* common vertices, named in each cell's local indexing */
			std::vector<int> sa, sb;
			for (size_t i = 0; i < P.vertices.size(); i++)
				for (size_t j = 0; j < Q.vertices.size(); j++)
					if (point_eq(P.vertices[i], Q.vertices[j])) {
						sa.push_back((int)i);
						sb.push_back((int)j);
					}
			std::sort(sa.begin(), sa.end());
			std::sort(sb.begin(), sb.end());
			if (sa.empty()) {
				rep.violations.push_back(
				    {a, b, "cells meet but share no vertex"});
				continue;
			}
			if (!detail::is_face_vertex_set(P, sa) ||
			    !detail::is_face_vertex_set(Q, sb)) {
				rep.violations.push_back(
				    {a, b, "shared vertices are not a face"});
				continue;
			}
			/* the intersection must lie on every facet hyperplane of each
			 * cell that contains the shared face */
			bool bad = false;
			auto check_tight = [&](const VPolytope &C,
			                       const std::vector<int> &shared) {
				for (size_t f = 0; f < C.facets.size() && !bad; f++) {
					auto &fv = C.facet_verts(f);
					if (!std::includes(fv.begin(), fv.end(), shared.begin(),
					                   shared.end()))
						continue;
					/* facet value is >= 0 on C and 0 on the face; the
					 * intersection must not leave the hyperplane */
					Scalar m = detail::max_over_intersection(
					    P, Q, C.facets[f].normal, C.facets[f].offset);
					if (sign(m) != 0)
						bad = true;
				}
			};
			check_tight(P, sa);
			check_tight(Q, sb);
			if (bad)
				rep.violations.push_back(
				    {a, b, "intersection exceeds the shared face"});
		}
	}
	return rep;
}

/* ---------- refinement ---------- */

inline bool contains_polytope(const VPolytope &outer, const VPolytope &inner)
{
	for (auto &v : inner.vertices)
		if (!outer.contains(v))
			return false;
	return true;
}

inline bool refines(const PolyComplex &x2, const PolyComplex &x1)
{
	/* every cell of x2 inside some cell of x1 */
	for (size_t i = 0; i < x2.cells.size(); i++) {
		bool found = false;
		for (size_t j = 0; j < x1.cells.size() && !found; j++)
			if (contains_polytope(x1.cell_polytope(j), x2.cell_polytope(i)))
				found = true;
		if (!found)
			return false;
	}
	/* equal supports: every top cell of x1 exactly covered by the x2 cells
	 * inside it, by exact volume */
	if (x1.max_dim() != x2.max_dim())
		return false;
	size_t d = x1.max_dim();
	std::vector<bool> used(x2.cells.size(), false);
	for (size_t j : x1.top_cells()) {
		const VPolytope &C = x1.cell_polytope(j);
		Scalar total = C.F->zero();
		for (size_t i = 0; i < x2.cells.size(); i++) {
			const VPolytope &D = x2.cell_polytope(i);
			if (D.dim != d || used[i] || !contains_polytope(C, D))
				continue;
			used[i] = true;
			total = total + volume(D);
		}
		if (sign(total - volume(C)) != 0)
			return false;
	}
	/* all top cells of x2 must have been consumed */
	for (size_t i : x2.top_cells())
		if (!used[i])
			return false;
	return true;
}

/* ---------- stars ---------- */

/* minimal subcomplex of the cells having f (a point-index set) as a face */
inline PolyComplex star(const PolyComplex &x, std::vector<int> f)
{
	std::sort(f.begin(), f.end());
	PolyComplex out(x.F);
	out.points = x.points;
	bool found = false;
	for (size_t i = 0; i < x.cells.size(); i++) {
		auto &c = x.cells[i];
		if (!std::includes(c.vertices.begin(), c.vertices.end(), f.begin(),
		                   f.end()))
			continue;
		/* translate f to the cell's local vertex numbering */
		const VPolytope &P = x.cell_polytope(i);
		std::vector<int> local;
		for (int pid : f) {
			for (size_t k = 0; k < P.vertices.size(); k++)
				if (point_eq(P.vertices[k], x.points[pid]))
					local.push_back((int)k);
		}
		std::sort(local.begin(), local.end());
		if (local.size() != f.size() || !detail::is_face_vertex_set(P, local))
			continue;
		found = true;
		out.cells.push_back(c);
	}
	if (!found)
		throw std::invalid_argument("star: not a face of any cell");
	return out;
}

/* ---------- polyhedral maps ---------- */

struct PolyMap {
	Mat<Rat> A; /* rows x cols = target_dim x source_dim */
	Point v;    /* translation, in the target space */
	const PolyComplex *source = nullptr;
	const PolyComplex *target = nullptr;

	Point apply(const Point &x) const
	{
		const FieldPtr &F = v[0].F;
		Point y = v;
		for (size_t i = 0; i < A.size(); i++)
			for (size_t j = 0; j < A[i].size(); j++)
				y[i] = y[i] + A[i][j] * x[j];
		(void)F;
		return y;
	}
};

inline bool is_polyhedral_map(const PolyMap &m)
{
	for (size_t i = 0; i < m.source->cells.size(); i++) {
		const VPolytope &C = m.source->cell_polytope(i);
		std::vector<Point> img;
		for (auto &p : C.vertices)
			img.push_back(m.apply(p));
		bool found = false;
		for (size_t j = 0; j < m.target->cells.size() && !found; j++) {
			const VPolytope &D = m.target->cell_polytope(j);
			bool in = true;
			for (auto &p : img)
				if (!D.contains(p))
					in = false;
			if (in)
				found = true;
		}
		if (!found)
			return false;
	}
	return true;
}

/* ---------- hyperplane-arrangement refinement ---------- */

/* cut a polytope by the hyperplane n.x + off = 0; returns the closures of the
 * two sides, each omitted when empty or dimension-deficient */
inline std::vector<VPolytope> split_by_hyperplane(const VPolytope &p,
                                                  const Point &n,
                                                  const Scalar &off)
{
	const FieldPtr &F = p.F;
	std::vector<Point> pos, neg;
	std::vector<int> vsign;
	for (auto &v : p.vertices) {
		int s = sign(dot(n, v) + off);
		vsign.push_back(s);
		if (s >= 0)
			pos.push_back(v);
		if (s <= 0)
			neg.push_back(v);
	}
	for (auto &e : p.edges()) {
		if (e.size() != 2)
			continue;
		int su = vsign[e[0]], sv = vsign[e[1]];
		if (su * sv >= 0)
			continue;
		const Point &u = p.vertices[e[0]], &w = p.vertices[e[1]];
		Scalar hu = dot(n, u) + off, hw = dot(n, w) + off;
		Scalar t = hu / (hu - hw);
		Point cut = u + scale_point(t, w - u);
		pos.push_back(cut);
		neg.push_back(cut);
	}
	std::vector<VPolytope> out;
	for (auto *side : {&pos, &neg}) {
		if (side->empty())
			continue;
		VPolytope piece = hull(*side);
		if (piece.dim == p.dim)
			out.push_back(piece);
	}
	/* the hyperplane may contain p entirely: keep p once */
	if (out.size() == 2 && polytope_eq(out[0], out[1]))
		out.pop_back();
	(void)F;
	return out;
}

inline PolyComplex refine_by_hyperplanes(const PolyComplex &x)
{
	const FieldPtr &F = x.F;
	/* hyperplanes spanned by facets of cells, deduplicated by the canonical
	 * normalization of (normal, offset) up to sign */
	std::vector<std::pair<Point, Scalar>> planes;
	std::set<std::vector<std::vector<Rat>>> seen;
	for (size_t i = 0; i < x.cells.size(); i++) {
		const VPolytope &C = x.cell_polytope(i);
		for (auto &h : C.facets) {
			Vec<Scalar> key(h.normal.begin(), h.normal.end());
			key.push_back(h.offset);
			Scalar lead = F->zero();
			for (auto &s : key)
				if (!is_zero(s)) {
					lead = s;
					break;
				}
			std::vector<std::vector<Rat>> kc;
			for (auto &s : key)
				kc.push_back((s / lead).c);
			if (seen.insert(kc).second)
				planes.emplace_back(h.normal, h.offset);
		}
	}
	PolyComplex out(F);
	for (size_t i = 0; i < x.cells.size(); i++) {
		std::vector<VPolytope> pieces{x.cell_polytope(i)};
		for (auto &[n, off] : planes) {
			std::vector<VPolytope> next;
			for (auto &piece : pieces)
				for (auto &half : split_by_hyperplane(piece, n, off))
					next.push_back(half);
			pieces = std::move(next);
		}
		for (auto &piece : pieces)
			out.add_cell(piece, x.cells[i].label);
	}
	/* drop duplicate cells arising from shared lower faces */
	PolyComplex dedup(F);
	dedup.points = out.points;
	std::set<std::vector<int>> cset;
	for (auto &c : out.cells)
		if (cset.insert(c.vertices).second)
			dedup.cells.push_back(c);
	return dedup;
}

} // namespace zv
