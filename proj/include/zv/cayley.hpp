/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "complex.hpp"
#include "lattice.hpp"
#include "polytope.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace zv {

/* ---------- Cayley polytopes ---------- */

struct CayleyPolytope {
	std::vector<VPolytope> summands;
	size_t d = 0, r = 0;
	VPolytope poly; /* hull of the union of P_i x e_i in R^{d+r} */
};

inline Point cayley_embed(const Point &v, size_t i, size_t r)
{
	const FieldPtr &F = v[0].F;
	Point p = v;
	for (size_t k = 0; k < r; k++)
		p.push_back(k == i ? F->one() : F->zero());
	return p;
}

inline CayleyPolytope cayley(const std::vector<VPolytope> &ps)
{
	if (ps.empty())
		throw std::invalid_argument("cayley: no summands");
	CayleyPolytope c;
	c.summands = ps;
	c.d = ps[0].ambient_dim;
	c.r = ps.size();
	std::vector<Point> pts;
	for (size_t i = 0; i < c.r; i++) {
		if (ps[i].ambient_dim != c.d)
			throw std::invalid_argument("cayley: dimension mismatch");
		for (auto &v : ps[i].vertices)
			pts.push_back(cayley_embed(v, i, c.r));
	}
	c.poly = hull(pts);
	/* invariant: the embedded summand vertices are exactly the vertices */
	if (c.poly.vertices.size() != pts.size())
		throw std::logic_error("cayley: lost an embedded vertex");
	return c;
}

/* intersection of p with the hyperplane n.x + off = 0 */
inline VPolytope slice_hyperplane(const VPolytope &p, const Point &n,
                                  const Scalar &off)
{
	std::vector<Point> pts;
	std::vector<int> vsign;
	for (auto &v : p.vertices) {
		int s = sign(dot(n, v) + off);
		vsign.push_back(s);
		if (s == 0)
			pts.push_back(v);
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
		pts.push_back(u + scale_point(t, w - u));
	}
	if (pts.empty())
		throw std::invalid_argument("empty hyperplane slice");
	return hull(pts);
}

/* fiber over a rational point of the tag simplex, projected back to R^d;
 * equals lambda_1 P_1 + ... + lambda_r P_r */
inline VPolytope slice(const CayleyPolytope &c, const Vec<Rat> &lambda)
{
	const FieldPtr &F = c.poly.F;
	if (lambda.size() != c.r)
		throw std::invalid_argument("slice: wrong lambda size");
	Rat total(0);
	for (auto &l : lambda) {
		if (sgn(l) < 0)
			throw std::invalid_argument("slice: lambda outside the simplex");
		total += l;
	}
	if (total != 1)
		throw std::invalid_argument("slice: lambda outside the simplex");
	VPolytope cur = c.poly;
	for (size_t i = 0; i + 1 < c.r; i++) {
		Point n(c.d + c.r, F->zero());
		n[c.d + i] = F->one();
		cur = slice_hyperplane(cur, n, F->from_rat(-lambda[i]));
	}
	std::vector<Point> proj;
	for (auto &v : cur.vertices)
		proj.push_back(Point(v.begin(), v.begin() + c.d));
	return hull(proj);
}

/* ---------- lifts and regular subdivisions ---------- */

struct Lift {
	std::vector<Point> pts;
	std::vector<Rat> vals;

	void set(const Point &p, Rat v)
	{
		for (size_t i = 0; i < pts.size(); i++)
			if (point_eq(pts[i], p)) {
				vals[i] = std::move(v);
				return;
			}
		pts.push_back(p);
		vals.push_back(std::move(v));
	}
	std::optional<Rat> find(const Point &p) const
	{
		for (size_t i = 0; i < pts.size(); i++)
			if (point_eq(pts[i], p))
				return vals[i];
		return std::nullopt;
	}
	Rat at(const Point &p) const
	{
		auto v = find(p);
		if (!v)
			throw std::invalid_argument("lift value missing");
		return *v;
	}
};

namespace detail {

/* facet ids of the lower hull of L (last coordinate downward); nullopt when
 * the vertical direction is not in the span (flat lift) */
inline std::optional<std::vector<size_t>> lower_facet_ids(const VPolytope &L)
{
	const FieldPtr &F = L.F;
	Vec<Scalar> vert(L.ambient_dim, F->zero());
	vert[L.ambient_dim - 1] = F->one();
	Mat<Scalar> trial = L.span_rref;
	trial.push_back(vert);
	if (rank(trial) > L.span_rref.size() || L.dim == 0)
		return std::nullopt;
	std::vector<size_t> out;
	for (size_t f = 0; f < L.facets.size(); f++)
		if (sign(L.facets[f].normal[L.ambient_dim - 1]) > 0)
			out.push_back(f);
	return out;
}

/* affine combination of w in terms of affinely independent points */
inline std::optional<Vec<Scalar>> affine_combination(const std::vector<Point> &pts,
                                                     const Point &w)
{
	const FieldPtr &F = w[0].F;
	size_t n = w.size();
	Mat<Scalar> A(n + 1, Vec<Scalar>(pts.size()));
	for (size_t j = 0; j < pts.size(); j++) {
		for (size_t i = 0; i < n; i++)
			A[i][j] = pts[j][i];
		A[n][j] = F->one();
	}
	Vec<Scalar> b(w.begin(), w.end());
	b.push_back(F->one());
	return solve(A, b, F->zero());
}

/* greedy affine basis among the vertices of a cell */
inline std::vector<int> affine_basis(const VPolytope &C)
{
	std::vector<int> basis{0};
	Mat<Scalar> dirs;
	for (size_t i = 1; i < C.vertices.size(); i++) {
		Mat<Scalar> trial = dirs;
		Point d = C.vertices[i] - C.vertices[0];
		trial.push_back(Vec<Scalar>(d.begin(), d.end()));
		if (rank(trial) > dirs.size()) {
			dirs = trial;
			basis.push_back((int)i);
		}
	}
	return basis;
}

} // namespace detail

inline PolyComplex regular_subdivision(const VPolytope &p,
                                       const std::vector<Point> &s, const Lift &f)
{
	const FieldPtr &F = p.F;
	std::vector<Point> lifted;
	for (auto &q : s)
		lifted.push_back([&] {
			Point l = q;
			l.push_back(F->from_rat(f.at(q)));
			return l;
		}());
	VPolytope L = hull(lifted);
	PolyComplex out(F);
	auto label_of = [](std::vector<int> ids) {
		std::sort(ids.begin(), ids.end());
		std::string lab;
		for (int i : ids)
			lab += (lab.empty() ? "" : ",") + std::to_string(i);
		return lab;
	};
	auto lf = detail::lower_facet_ids(L);
	if (!lf) {
		std::vector<int> all(s.size());
		for (size_t i = 0; i < s.size(); i++)
			all[i] = (int)i;
		out.add_cell(p, label_of(all));
		return out;
	}
	for (size_t fi : *lf) {
		const Halfspace &h = L.facets[fi];
		std::vector<int> contrib;
		std::vector<Point> pts;
		for (size_t j = 0; j < s.size(); j++)
			if (sign(dot(h.normal, lifted[j]) + h.offset) == 0) {
				contrib.push_back((int)j);
				pts.push_back(s[j]);
			}
		out.add_cell(hull(pts), label_of(contrib));
	}
	return out;
}

inline bool is_induced_by(const PolyComplex &x, const Lift &f)
{
	for (size_t ci : x.top_cells()) {
		const VPolytope &C = x.cell_polytope(ci);
		std::vector<int> basis = detail::affine_basis(C);
		std::vector<Point> bpts;
		Vec<Rat> bvals;
		for (int b : basis) {
			auto v = f.find(C.vertices[b]);
			if (!v)
				return false;
			bpts.push_back(C.vertices[b]);
			bvals.push_back(*v);
		}
		auto ell = [&](const Point &w) -> std::optional<Scalar> {
			auto mu = detail::affine_combination(bpts, w);
			if (!mu)
				return std::nullopt;
			Scalar v = C.F->zero();
			for (size_t j = 0; j < bpts.size(); j++)
				v = v + bvals[j] * (*mu)[j];
			return v;
		};
		/* flatness on the cell's own vertices */
		for (auto &v : C.vertices) {
			auto fv = f.find(v);
			auto lv = ell(v);
			if (!fv || !lv || sign(*lv - C.F->from_rat(*fv)) != 0)
				return false;
		}
		/* every other lifted point sits weakly above, strictly when outside */
		for (size_t j = 0; j < f.pts.size(); j++) {
			const Point &w = f.pts[j];
			bool is_vertex = false;
			for (auto &v : C.vertices)
				if (point_eq(v, w))
					is_vertex = true;
			if (is_vertex)
				continue;
			auto lv = ell(w);
			if (!lv)
				continue; /* outside the affine span: unconstrained */
			int s = sign(C.F->from_rat(f.vals[j]) - *lv);
			if (C.contains(w) ? s < 0 : s <= 0)
				return false;
		}
	}
	return true;
}

inline std::optional<Lift> find_inducing_lift(const PolyComplex &x)
{
	const FieldPtr &F = x.F;
	size_t m = x.points.size();
	size_t fb = F->zero().c.size(); /* field degree */

	/* global point index of a cell vertex */
	auto global_id = [&](const VPolytope &C, int local) {
		for (size_t i = 0; i < m; i++)
			if (point_eq(x.points[i], C.vertices[local]))
				return (int)i;
		throw std::logic_error("cell vertex missing from point store");
	};

	Mat<Rat> eq;                /* rational equalities over the f-values */
	Mat<Scalar> strict;         /* strict rows: row . f >= 1 */
	for (size_t ci : x.top_cells()) {
		const VPolytope &C = x.cell_polytope(ci);
		std::vector<int> basis = detail::affine_basis(C);
		std::vector<Point> bpts;
		std::vector<int> bids;
		for (int b : basis) {
			bpts.push_back(C.vertices[b]);
			bids.push_back(global_id(C, b));
		}
		/* flatness: non-basis vertices are determined */
		for (size_t vi = 0; vi < C.vertices.size(); vi++) {
			if (std::find(basis.begin(), basis.end(), (int)vi) != basis.end())
				continue;
			auto mu = detail::affine_combination(bpts, C.vertices[vi]);
			if (!mu)
				throw std::logic_error("cell vertex outside its affine span");
			int gid = global_id(C, (int)vi);
			for (size_t t = 0; t < fb; t++) {
				Vec<Rat> row(m, Rat(0));
				for (size_t j = 0; j < bpts.size(); j++)
					row[bids[j]] += (*mu)[j].c[t];
				if (t == 0)
					row[gid] -= 1;
				bool zero = true;
				for (auto &q : row)
					if (sgn(q) != 0)
						zero = false;
				if (!zero)
					eq.push_back(row);
			}
		}
		/* strictness: points outside the cell lie above its hyperplane */
		for (size_t w = 0; w < m; w++) {
			if (C.contains(x.points[w]))
				continue;
			auto mu = detail::affine_combination(bpts, x.points[w]);
			if (!mu)
				continue;
			Vec<Scalar> row(m, F->zero());
			row[w] = F->one();
			for (size_t j = 0; j < bpts.size(); j++)
				row[bids[j]] = row[bids[j]] - (*mu)[j];
			strict.push_back(row);
		}
	}

	/* eliminate the equalities: f = N z */
	Mat<Rat> N;
	if (eq.empty()) {
		N = mat_identity<Rat>(m, Rat(0), Rat(1));
	} else {
		Mat<Rat> basis_rows = nullspace(eq, m, Rat(0), Rat(1));
		/* columns of N = basis vectors */
		N.assign(m, Vec<Rat>(basis_rows.size(), Rat(0)));
		for (size_t k = 0; k < basis_rows.size(); k++)
			for (size_t i = 0; i < m; i++)
				N[i][k] = basis_rows[k][i];
	}
	size_t nz = N.empty() ? 0 : N[0].size();
	if (strict.empty()) {
		Lift f;
		for (auto &p : x.points)
			f.set(p, Rat(0));
		return is_induced_by(x, f) ? std::optional<Lift>(f) : std::nullopt;
	}
	if (nz == 0)
		return std::nullopt;
	/* LP feasibility: for each strict row, -(row . N) z <= -1 */
	Mat<Scalar> A;
	Vec<Scalar> b;
	for (auto &row : strict) {
		Vec<Scalar> az(nz, F->zero());
		for (size_t i = 0; i < m; i++)
			for (size_t k = 0; k < nz; k++)
				az[k] = az[k] - N[i][k] * row[i];
		A.push_back(az);
		b.push_back(F->zero() - F->one());
	}
	auto z = lp_feasible_point(A, b, F->zero(), F->one());
	if (!z)
		return std::nullopt;
	for (unsigned prec = 64; prec <= (1u << 16); prec *= 2) {
		Vec<Rat> zq;
		for (auto &zi : *z) {
			auto e = F->enclosure(zi.c, prec);
			zq.push_back((e.lo + e.hi) / 2);
		}
		Lift f;
		for (size_t i = 0; i < m; i++) {
			Rat v(0);
			for (size_t k = 0; k < nz; k++)
				v += N[i][k] * zq[k];
			f.set(x.points[i], v);
		}
		if (is_induced_by(x, f))
			return f;
	}
	throw std::logic_error("find_inducing_lift: rounding failed to certify");
}

/* ---------- mixed subdivisions ---------- */

struct MixedCellLabel {
	/* per summand, the vertex ids of the face C_i */
	std::vector<std::vector<int>> parts;
};

struct MixedSubdivision {
	PolyComplex complex;
	std::vector<MixedCellLabel> labels;
	bool fine = false;
};

namespace detail {

inline bool label_is_fine(const std::vector<VPolytope> &ps,
                          const MixedCellLabel &lab, size_t cell_dim)
{
	size_t total = 0;
	for (size_t i = 0; i < ps.size(); i++) {
		auto &part = lab.parts[i];
		Mat<Scalar> dirs;
		for (size_t j = 1; j < part.size(); j++) {
			Point d = ps[i].vertices[part[j]] - ps[i].vertices[part[0]];
			dirs.push_back(Vec<Scalar>(d.begin(), d.end()));
		}
		if (!dirs.empty() && rank(dirs) != dirs.size())
			return false; /* C_i is not a simplex */
		total += part.size() - 1;
	}
	return total == cell_dim;
}

} // namespace detail

inline MixedSubdivision mixed_subdivision(const std::vector<VPolytope> &ps,
                                          const std::vector<Lift> &lifts)
{
	if (ps.empty() || ps.size() != lifts.size())
		throw std::invalid_argument("mixed_subdivision: one lift per summand");
	const FieldPtr &F = ps[0].F;
	size_t n = ps[0].ambient_dim, r = ps.size();
	std::vector<std::vector<Point>> lifted(r);
	std::vector<VPolytope> lifted_hulls;
	for (size_t i = 0; i < r; i++) {
		for (auto &v : ps[i].vertices) {
			Point l = v;
			l.push_back(F->from_rat(lifts[i].at(v)));
			lifted[i].push_back(l);
		}
		lifted_hulls.push_back(hull(lifted[i]));
	}
	VPolytope Q = minkowski_sum(lifted_hulls);
	MixedSubdivision out;
	out.complex = PolyComplex(F);

	auto faces_for = [&](const Point &outward) {
		MixedCellLabel lab;
		std::vector<Point> cellpts{Point(n, F->zero())};
		for (size_t i = 0; i < r; i++) {
			std::vector<int> arg{0};
			Scalar best = dot(outward, lifted[i][0]);
			for (size_t j = 1; j < lifted[i].size(); j++) {
				Scalar v = dot(outward, lifted[i][j]);
				int s = sign(v - best);
				if (s > 0) {
					arg = {(int)j};
					best = v;
				} else if (s == 0)
					arg.push_back((int)j);
			}
			lab.parts.push_back(arg);
			std::vector<Point> next;
			for (auto &c : cellpts)
				for (int j : arg)
					next.push_back(c + ps[i].vertices[j]);
			cellpts = next;
		}
		return std::make_pair(lab, hull(cellpts));
	};

	auto lf = detail::lower_facet_ids(Q);
	if (!lf) {
		/* flat lift: trivial mixed subdivision */
		MixedCellLabel lab;
		std::vector<VPolytope> raw(ps.begin(), ps.end());
		for (size_t i = 0; i < r; i++) {
			std::vector<int> all(ps[i].vertices.size());
			for (size_t j = 0; j < all.size(); j++)
				all[j] = (int)j;
			lab.parts.push_back(all);
		}
		VPolytope sum = minkowski_sum(raw);
		out.complex.add_cell(sum);
		out.labels.push_back(lab);
		out.fine = detail::label_is_fine(ps, lab, sum.dim);
		return out;
	}
	out.fine = true;
	for (size_t fi : *lf) {
		Point outward = scale_point(Rat(-1), Q.facets[fi].normal);
		auto [lab, cell] = faces_for(outward);
		out.complex.add_cell(cell);
		out.labels.push_back(lab);
		if (!detail::label_is_fine(ps, lab, cell.dim))
			out.fine = false;
	}
	return out;
}

/* seeded random lifts until the induced mixed subdivision is fine */
inline MixedSubdivision fine_mixed_subdivision(const std::vector<VPolytope> &ps,
                                               uint64_t seed)
{
	Rng rng(seed);
	for (int attempt = 0; attempt < 64; attempt++) {
		std::vector<Lift> lifts;
		for (auto &p : ps) {
			Lift f;
			for (auto &v : p.vertices)
				f.set(v, Rat((long)rng.below(1u << 16)) / (1 << 16));
			lifts.push_back(f);
		}
		MixedSubdivision ms = mixed_subdivision(ps, lifts);
		if (ms.fine)
			return ms;
	}
	throw std::logic_error("fine_mixed_subdivision: no generic lift found");
}

/* ---------- staircase triangulations ---------- */

/* d! simplices triangulating the parallelepiped sum [0, e_k] from base v0 */
inline std::vector<IMat> staircase_triangulation(const IMat &evecs, const IVec &v0)
{
	size_t d = evecs.size();
	if (d == 0 || rank(to_rat_mat(evecs)) != d)
		throw std::invalid_argument("staircase: dependent edge vectors");
	std::vector<size_t> perm(d);
	for (size_t i = 0; i < d; i++)
		perm[i] = i;
	std::vector<IMat> out;
	do {
		IMat simplex{v0};
		IVec cur = v0;
		for (size_t k = 0; k < d; k++) {
			for (size_t j = 0; j < cur.size(); j++)
				cur[j] += evecs[perm[k]][j];
			simplex.push_back(cur);
		}
		out.push_back(simplex);
	} while (std::next_permutation(perm.begin(), perm.end()));
	return out;
}

/* ---------- triangulations with index bookkeeping ---------- */

struct Triangulation {
	FieldPtr F;
	std::vector<Point> points;
	std::vector<std::vector<int>> cells; /* sorted point-id sets */
	std::vector<Int> indices;            /* per-cell lattice index */
	Int max_index = 0;
	std::optional<Lift> lift;
};

inline IVec ivec_of(const Point &p)
{
	IVec v;
	for (auto &x : p) {
		if (!is_rational(x))
			throw std::invalid_argument("non-rational coordinate");
		Rat q = to_rat(x);
		if (q.get_den() != 1)
			throw std::invalid_argument("non-integral coordinate");
		v.push_back(q.get_num());
	}
	return v;
}

/* index of the sublattice spanned by vertex differences inside the saturated
 * lattice of the simplex span */
inline Int simplex_index(const std::vector<IVec> &verts)
{
	IMat diffs;
	for (size_t i = 1; i < verts.size(); i++) {
		IVec d = verts[i];
		for (size_t j = 0; j < d.size(); j++)
			d[j] -= verts[0][j];
		diffs.push_back(d);
	}
	if (diffs.empty())
		return 1;
	auto idx = lattice_index(diffs, diffs[0].size());
	if (!idx)
		return 1; /* a point */
	return *idx;
}

/* ---------- the c-lex triangulation ---------- */

namespace detail {

/* monotone staircase paths from (0, 0) to (a_max, i_max) */
inline void monotone_paths(size_t a_max, size_t i_max,
                           std::vector<std::vector<std::pair<int, int>>> &out)
{
	std::vector<std::pair<int, int>> cur{{0, 0}};
	std::function<void()> rec = [&]() {
		auto [a, i] = cur.back();
		if ((size_t)a == a_max && (size_t)i == i_max) {
			out.push_back(cur);
			return;
		}
		if ((size_t)a < a_max) {
			cur.push_back({a + 1, i});
			rec();
			cur.pop_back();
		}
		if ((size_t)i < i_max) {
			cur.push_back({a, i + 1});
			rec();
			cur.pop_back();
		}
	};
	rec();
}

} // namespace detail

inline Triangulation clex_triangulation(const std::vector<VPolytope> &ps,
                                        const VPolytope &ptilde)
{
	const FieldPtr &F = ptilde.F;
	size_t d = ptilde.ambient_dim, r = ps.size();
	if (r == 0)
		throw std::invalid_argument("clex: no summands");
	if (ptilde.dim != d)
		throw std::invalid_argument("clex: dominator not full-dimensional");
	if (!is_polystable_cell(ptilde))
		throw std::invalid_argument("clex: dominator not polystable");
	auto sigmas = is_polysimplex(ptilde);
	if (!sigmas)
		throw std::invalid_argument("clex: dominator not a polysimplex");
	for (auto &p : ps) {
		if (p.ambient_dim != d)
			throw std::invalid_argument("clex: dimension mismatch");
		if (!minkowski_dominates(ptilde, p))
			throw std::invalid_argument("clex: summand not dominated");
	}

	/* vertex path: greedy rank-increasing lex-min edge walk from vertex 0 */
	IMat E; /* rows e_k */
	{
		int cur = 0;
		while (E.size() < d) {
			std::vector<IVec> cand;
			std::vector<int> cand_to;
			for (auto &e : ptilde.edges()) {
				int other = e[0] == cur ? e[1] : e[1] == cur ? e[0] : -1;
				if (other < 0)
					continue;
				IVec dir = ivec_of(ptilde.vertices[other] - ptilde.vertices[cur]);
				IMat trial = E;
				trial.push_back(dir);
				if (rank(to_rat_mat(trial)) == trial.size()) {
					cand.push_back(dir);
					cand_to.push_back(other);
				}
			}
			if (cand.empty())
				throw std::logic_error("clex: vertex path stuck");
			size_t best = 0;
			for (size_t i = 1; i < cand.size(); i++)
				if (cand[i] < cand[best])
					best = i;
			E.push_back(cand[best]);
			cur = cand_to[best];
		}
		if (abs(idet(E)) != 1)
			throw std::invalid_argument(
			    "clex: path edges do not generate the lattice");
	}

	/* factor of ptilde parallel to each path edge */
	std::vector<size_t> factor_of(d);
	for (size_t k = 0; k < d; k++) {
		bool found = false;
		for (size_t j = 0; j < sigmas->size() && !found; j++) {
			Mat<Scalar> dirs;
			for (size_t v = 1; v < (*sigmas)[j].vertices.size(); v++) {
				Point dd = (*sigmas)[j].vertices[v] - (*sigmas)[j].vertices[0];
				dirs.push_back(Vec<Scalar>(dd.begin(), dd.end()));
			}
			Mat<Scalar> trial = dirs;
			Vec<Scalar> ek;
			for (auto &x : E[k])
				ek.push_back(F->from_rat(Rat(x)));
			trial.push_back(ek);
			if (rank(trial) == dirs.size()) {
				factor_of[k] = j;
				found = true;
			}
		}
		if (!found)
			throw std::logic_error("clex: path edge matches no factor");
	}

	/* domination coefficients lambda_{ij}: P_i = sum_j lambda_{ij} sigma_j */
	Mat<Int> lambda(r, Vec<Int>(sigmas->size(), 0));
	std::vector<IVec> t(r); /* translation of each summand */
	for (size_t i = 0; i < r; i++) {
		auto taus = is_polysimplex(ps[i]);
		if (!taus)
			throw std::invalid_argument("clex: summand not a polysimplex");
		t[i] = ivec_of(ps[i].vertices[0]);
		for (auto &tau : *taus) {
			bool matched = false;
			for (size_t j = 0; j < sigmas->size() && !matched; j++) {
				if (tau.dim != (*sigmas)[j].dim)
					continue;
				/* scaling factor from a matching vertex ray */
				Point w = tau.vertices.size() > 1 ? tau.vertices[1] - tau.vertices[0]
				                                  : Point{};
				for (size_t v = 1; v < (*sigmas)[j].vertices.size() && !matched;
				     v++) {
					Point u = (*sigmas)[j].vertices[v] - (*sigmas)[j].vertices[0];
					/* w = l * u for a positive integer l? */
					size_t lead = 0;
					while (lead < u.size() && is_zero(u[lead]))
						lead++;
					if (lead == u.size() || is_zero(w[lead]))
						continue;
					Scalar l = w[lead] / u[lead];
					if (!is_rational(l))
						continue;
					Rat lq = to_rat(l);
					if (lq.get_den() != 1 || sgn(lq) <= 0)
						continue;
					if (polytope_eq(tau, dilate((*sigmas)[j], lq))) {
						if (lambda[i][j] != 0)
							throw std::invalid_argument(
							    "clex: repeated factor direction");
						lambda[i][j] = lq.get_num();
						matched = true;
					}
				}
			}
			if (!matched)
				throw std::invalid_argument("clex: summand factor not dominated");
		}
	}

	Int c_int = 1;
	for (auto &row : lambda)
		for (auto &l : row)
			c_int = std::max(c_int, l);
	long c = (long)c_int.get_si();
	Mat<Int> cik(r, Vec<Int>(d));
	for (size_t i = 0; i < r; i++)
		for (size_t k = 0; k < d; k++)
			cik[i][k] = lambda[i][factor_of[k]];

	/* staircase triangulation of c * ptilde in e-coordinates: unit alcoves of
	 * the box [0,c]^d restricted to the support */
	IVec v0 = ivec_of(ptilde.vertices[0]);
	auto to_x = [&](const IVec &alpha) {
		IVec x(d);
		for (size_t j = 0; j < d; j++) {
			x[j] = c * v0[j];
			for (size_t k = 0; k < d; k++)
				x[j] += alpha[k] * E[k][j];
		}
		return x;
	};
	VPolytope cpt = dilate(ptilde, Rat(c));
	auto in_cpt = [&](const IVec &alpha) {
		IVec x = to_x(alpha);
		Point p;
		for (auto &q : x)
			p.push_back(F->from_rat(Rat(q)));
		return cpt.contains(p);
	};
	std::vector<IMat> alcoves; /* simplices in alpha-space, lex-ordered verts */
	{
		std::vector<size_t> perm(d);
		IVec z(d, 0);
		for (;;) {
			for (size_t i = 0; i < d; i++)
				perm[i] = i;
			do {
				IMat simplex{z};
				IVec cur = z;
				for (size_t k = 0; k < d; k++) {
					cur[perm[k]] += 1;
					simplex.push_back(cur);
				}
				bool inside = true;
				for (auto &a : simplex)
					if (!in_cpt(a))
						inside = false;
				if (inside)
					alcoves.push_back(simplex);
			} while (std::next_permutation(perm.begin(), perm.end()));
			size_t k = 0;
			while (k < d && ++z[k] >= c)
				z[k++] = 0;
			if (k == d)
				break;
		}
	}
	/* restriction must tile c * ptilde exactly */
	{
		Rat total(0);
		Rat cell = Rat(abs(idet(E)));
		for (size_t k = 2; k <= d; k++)
			cell /= (long)k;
		total = cell * (long)alcoves.size();
		Scalar want = volume(cpt);
		if (sign(want - F->from_rat(total)) != 0)
			throw std::logic_error("clex: staircase restriction does not tile");
	}

	/* Cayley blocks + clipping maps */
	std::vector<std::vector<std::pair<int, int>>> paths;
	detail::monotone_paths(d, r - 1, paths);
	std::set<std::vector<IVec>> seen;
	Triangulation tri;
	tri.F = F;
	std::map<IVec, int> pid;
	auto point_of = [&](const IVec &v) {
		auto it = pid.find(v);
		if (it != pid.end())
			return it->second;
		Point p;
		for (auto &q : v)
			p.push_back(F->from_rat(Rat(q)));
		tri.points.push_back(p);
		pid[v] = (int)tri.points.size() - 1;
		return pid[v];
	};
	for (auto &alc : alcoves) {
		for (auto &path : paths) {
			std::vector<IVec> verts;
			for (auto &[a, i] : path) {
				const IVec &alpha = alc[a];
				IVec x(d);
				for (size_t j = 0; j < d; j++) {
					x[j] = t[i][j];
					for (size_t k = 0; k < d; k++)
						x[j] += std::min(Int(alpha[k]), cik[i][k]) * E[k][j];
				}
				for (size_t q = 0; q < r; q++)
					x.push_back((size_t)i == q ? 1 : 0);
				verts.push_back(x);
			}
			/* drop degenerate images */
			IMat diffs;
			for (size_t v = 1; v < verts.size(); v++) {
				IVec dd = verts[v];
				for (size_t j = 0; j < dd.size(); j++)
					dd[j] -= verts[0][j];
				diffs.push_back(dd);
			}
			if (rank(to_rat_mat(diffs)) != diffs.size())
				continue;
			std::vector<IVec> key = verts;
			std::sort(key.begin(), key.end());
			if (!seen.insert(key).second)
				continue;
			Int idx = simplex_index(verts);
			if (idx != 1)
				throw std::logic_error("clex: non-unimodular simplex");
			std::vector<int> cell;
			for (auto &v : verts)
				cell.push_back(point_of(v));
			std::sort(cell.begin(), cell.end());
			tri.cells.push_back(cell);
			tri.indices.push_back(idx);
			tri.max_index = std::max(tri.max_index, idx);
		}
	}

	/* certification: images land in the summands and tile the Cayley polytope */
	CayleyPolytope cp = cayley(ps);
	for (auto &[v, id] : pid) {
		size_t tag = r;
		for (size_t q = 0; q < r; q++)
			if (v[d + q] == 1)
				tag = q;
		Point proj;
		for (size_t j = 0; j < d; j++)
			proj.push_back(F->from_rat(Rat(v[j])));
		if (tag == r || !ps[tag].contains(proj))
			throw std::logic_error("clex: vertex outside its summand");
	}
	{
		Scalar total = F->zero();
		for (auto &cell : tri.cells) {
			std::vector<Point> pts;
			for (int id : cell)
				pts.push_back(tri.points[id]);
			total = total + volume(hull(pts));
		}
		if (sign(total - volume(cp.poly)) != 0)
			throw std::logic_error("clex: simplices do not tile the Cayley polytope");
	}
	return tri;
}

} // namespace zv
