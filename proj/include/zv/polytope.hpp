/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "field.hpp"
#include "lattice.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace zv {

using Point = Vec<Scalar>;

inline Point operator+(const Point &a, const Point &b)
{
	Point r;
	for (size_t i = 0; i < a.size(); i++)
		r.push_back(a[i] + b[i]);
	return r;
}

inline Point operator-(const Point &a, const Point &b)
{
	Point r;
	for (size_t i = 0; i < a.size(); i++)
		r.push_back(a[i] - b[i]);
	return r;
}

inline Point scale_point(const Scalar &t, const Point &a)
{
	Point r;
	for (auto &x : a)
		r.push_back(t * x);
	return r;
}

inline Point scale_point(const Rat &t, const Point &a)
{
	Point r;
	for (auto &x : a)
		r.push_back(t * x);
	return r;
}

inline Scalar dot(const Point &a, const Point &b)
{
	Scalar s = a.at(0) * b.at(0);
	for (size_t i = 1; i < a.size(); i++)
		s += a[i] * b[i];
	return s;
}

inline bool point_eq(const Point &a, const Point &b)
{
	if (a.size() != b.size())
		return false;
	for (size_t i = 0; i < a.size(); i++)
		if (a[i].c != b[i].c)
			return false;
	return true;
}

inline bool is_rational_point(const Point &p)
{
	for (auto &x : p)
		if (!is_rational(x))
			return false;
	return true;
}

inline Vec<Rat> to_rat_point(const Point &p)
{
	Vec<Rat> r;
	for (auto &x : p)
		r.push_back(to_rat(x));
	return r;
}

inline Point from_rat_point(const FieldPtr &F, const Vec<Rat> &p)
{
	Point r;
	for (auto &q : p) {
		Scalar s = F->zero();
		s.c[0] = q;
		r.push_back(s);
	}
	return r;
}

inline Point from_int_point(const FieldPtr &F, const IVec &p)
{
	Point r;
	for (auto &q : p)
		r.push_back(F->from_rat(Rat(q)));
	return r;
}

/* If v is a scalar multiple of a rational vector, return the primitive
 * integer vector with the same orientation. */
inline std::optional<IVec> rational_direction(const Point &v)
{
	size_t lead = v.size();
	for (size_t i = 0; i < v.size(); i++)
		if (!is_zero(v[i])) {
			lead = i;
			break;
		}
	if (lead == v.size())
		return std::nullopt;
	Vec<Rat> ratios;
	for (size_t i = 0; i < v.size(); i++) {
		Scalar q = v[i] / v[lead];
		if (!is_rational(q))
			return std::nullopt;
		ratios.push_back(to_rat(q));
	}
	Int den = 1;
	for (auto &q : ratios)
		den = lcm(den, q.get_den());
	IVec w;
	for (auto &q : ratios) {
		Rat s = q * Rat(den);
		w.push_back(s.get_num());
	}
	w = primitive(w);
	/* orient along v: w[lead] should have the sign of v[lead] */
	if ((w[lead] > 0) != (sign(v[lead]) > 0))
		for (auto &x : w)
			x = -x;
	return w;
}

struct Halfspace {
	Point normal;  /* ambient; normal . x + offset >= 0 on P */
	Scalar offset;
	std::optional<IVec> int_normal; /* primitive, same orientation, if rational */
};

class VPolytope {
public:
	FieldPtr F;
	size_t ambient_dim = 0;
	std::vector<Point> vertices; /* canonical: sorted lex by value */
	size_t dim = 0;
	Point base;                   /* reference vertex (lex-min) */
	Mat<Scalar> span_rref;        /* canonical basis of the direction span */
	std::vector<size_t> span_pivots;
	std::vector<Halfspace> facets;
	std::vector<std::vector<int>> facet_vertices; /* sorted index sets */
	std::vector<std::vector<std::vector<int>>> faces; /* by dimension 0..dim */

	const std::vector<int> &facet_verts(size_t f) const { return facet_vertices[f]; }

	/* coordinates of a span vector in the rref basis (reads off pivots) */
	Vec<Scalar> span_coords(const Point &v) const
	{
		Vec<Scalar> y;
		for (size_t k : span_pivots)
			y.push_back(v[k]);
		return y;
	}

	bool in_span(const Point &v) const
	{
		Vec<Scalar> y = span_coords(v);
		Point rec(ambient_dim, F->zero());
		for (size_t k = 0; k < span_rref.size(); k++)
			for (size_t j = 0; j < ambient_dim; j++)
				rec[j] += y[k] * span_rref[k][j];
		for (size_t j = 0; j < ambient_dim; j++)
			if (!is_zero(rec[j] - v[j]))
				return false;
		return true;
	}

	Vec<Scalar> vertex_coords(size_t i) const { return span_coords(vertices[i] - base); }

	bool contains(const Point &p) const
	{
		if (!in_span(p - base))
			return false;
		for (auto &h : facets) {
			Scalar v = dot(h.normal, p) + h.offset;
			if (sign(v) < 0)
				return false;
		}
		return true;
	}

	bool contains_strictly(const Point &p) const
	{
		if (dim < ambient_dim && !in_span(p - base))
			return false;
		for (auto &h : facets) {
			Scalar v = dot(h.normal, p) + h.offset;
			if (sign(v) <= 0)
				return false;
		}
		return true;
	}

	std::vector<int> argmax_face(const Point &dir) const
	{
		std::vector<int> best{0};
		Scalar bv = dot(vertices[0], dir);
		for (size_t i = 1; i < vertices.size(); i++) {
			Scalar v = dot(vertices[i], dir);
			int s = sign(v - bv);
			if (s > 0) {
				best = {(int)i};
				bv = v;
			} else if (s == 0)
				best.push_back((int)i);
		}
		return best;
	}

	const std::vector<std::vector<int>> &edges() const
	{
		return dim >= 1 ? faces[1] : faces[0];
	}

	/* facet indices whose hyperplane passes through vertex i */
	std::vector<int> facets_at_vertex(int i) const
	{
		std::vector<int> r;
		for (size_t f = 0; f < facet_vertices.size(); f++)
			if (std::binary_search(facet_vertices[f].begin(),
			                       facet_vertices[f].end(), i))
				r.push_back((int)f);
		return r;
	}

	/* oriented vertex cycle of a 2-face */
	std::vector<int> face2_cycle(const std::vector<int> &face) const;

	Point centroid() const
	{
		Point c(ambient_dim, F->zero());
		for (auto &v : vertices)
			c = c + v;
		return scale_point(Rat(1, (long)vertices.size()), c);
	}

	std::vector<std::vector<int>> triangulate() const;
};

/* ---------- hull construction ---------- */

namespace detail {

struct HullFacet {
	std::vector<int> verts; /* size D */
	Vec<Scalar> normal;     /* in span coordinates */
	Scalar offset;          /* normal . y + offset = 0 on the facet */
	bool dead = false;
};

/* hyperplane through D affinely independent coord points, oriented so that
 * `inside` is strictly negative */
inline std::pair<Vec<Scalar>, Scalar>
coord_hyperplane(const Mat<Scalar> &coords, const std::vector<int> &verts,
                 const Vec<Scalar> &inside, const FieldPtr &F)
{
	size_t D = coords[verts[0]].size();
	Mat<Scalar> edges;
	for (size_t i = 1; i < verts.size(); i++) {
		Vec<Scalar> e;
		for (size_t j = 0; j < D; j++)
			e.push_back(coords[verts[i]][j] - coords[verts[0]][j]);
		edges.push_back(e);
	}
	Mat<Scalar> ns = nullspace(edges, D, F->zero(), F->one());
	if (ns.size() != 1)
		throw std::logic_error("hull: degenerate facet candidate");
	Vec<Scalar> n = ns[0];
	Scalar off = F->zero();
	for (size_t j = 0; j < D; j++)
		off -= n[j] * coords[verts[0]][j];
	Scalar val = off;
	for (size_t j = 0; j < D; j++)
		val += n[j] * inside[j];
	int s = sign(val);
	if (s == 0)
		throw std::logic_error("hull: interior point on facet hyperplane");
	if (s > 0) {
		for (auto &x : n)
			x = -x;
		off = -off;
	}
	return {n, off};
}

} // namespace detail

inline VPolytope hull(std::vector<Point> pts)
{
	if (pts.empty())
		throw std::invalid_argument("hull of empty point set");
	VPolytope P;
	P.F = pts[0][0].F;
	P.ambient_dim = pts[0].size();
	const FieldPtr &F = P.F;
	for (auto &p : pts)
		if (p.size() != P.ambient_dim)
			throw std::invalid_argument("hull: mixed ambient dimensions");

	/* dedupe (coefficients are canonical, so syntactic equality is exact) */
	std::sort(pts.begin(), pts.end(),
	          [](const Point &a, const Point &b) { return syntactic_less(a, b); });
	pts.erase(std::unique(pts.begin(), pts.end(), point_eq), pts.end());

	/* affine span: greedy rank growth */
	P.base = pts[0];
	Mat<Scalar> dirs;
	std::vector<int> simplex{0};
	for (size_t i = 1; i < pts.size(); i++) {
		Mat<Scalar> trial = dirs;
		Point d = pts[i] - pts[0];
		trial.push_back(Vec<Scalar>(d.begin(), d.end()));
		if (rank(trial) > dirs.size()) {
			dirs = trial;
			simplex.push_back((int)i);
		}
	}
	size_t D = dirs.size();
	P.dim = D;

	/* canonical rref basis of the span */
	if (D > 0) {
		Mat<Scalar> rref = dirs;
		P.span_pivots = row_reduce(rref);
		P.span_rref = rref;
	}

	if (D == 0) {
		P.vertices = {pts[0]};
		P.faces = {{{0}}};
		return P;
	}

	/* span coordinates for all points */
	Mat<Scalar> coords;
	for (auto &p : pts)
		coords.push_back(P.span_coords(p - P.base));

	std::vector<std::vector<int>> facet_sets; /* tight point-index sets */
	Mat<Scalar> facet_normals;                /* coord-space */
	Vec<Scalar> facet_offsets;

	if (D == 1) {
		/* endpoints by coordinate value */
		size_t lo = 0, hi = 0;
		for (size_t i = 1; i < pts.size(); i++) {
			if (sign(coords[i][0] - coords[lo][0]) < 0)
				lo = i;
			if (sign(coords[i][0] - coords[hi][0]) > 0)
				hi = i;
		}
		facet_sets = {{(int)lo}, {(int)hi}};
		facet_normals = {{F->one()}, {-F->one()}};
		facet_offsets = {-coords[lo][0], coords[hi][0]};
	} else {
		/* incremental beneath-beyond over simplicial facets */
		using detail::HullFacet;
		std::vector<HullFacet> fs;
		Vec<Scalar> inside(D, F->zero());
		for (int vi : simplex)
			for (size_t j = 0; j < D; j++)
				inside[j] += coords[vi][j];
		Rat inv_cnt(1, (long)simplex.size());
		for (auto &x : inside)
			x = inv_cnt * x;

		for (size_t skip = 0; skip < simplex.size(); skip++) {
			HullFacet hf;
			for (size_t i = 0; i < simplex.size(); i++)
				if (i != skip)
					hf.verts.push_back(simplex[i]);
			auto [n, off] = detail::coord_hyperplane(coords, hf.verts, inside, F);
			hf.normal = n;
			hf.offset = off;
			fs.push_back(hf);
		}

		std::set<int> in_simplex(simplex.begin(), simplex.end());
		for (size_t p = 0; p < pts.size(); p++) {
			if (in_simplex.count((int)p))
				continue;
			/* strictly visible facets */
			std::vector<int> vis;
			for (size_t f = 0; f < fs.size(); f++) {
				if (fs[f].dead)
					continue;
				Scalar v = fs[f].offset;
				for (size_t j = 0; j < D; j++)
					v += fs[f].normal[j] * coords[p][j];
				if (sign(v) > 0)
					vis.push_back((int)f);
			}
			if (vis.empty())
				continue; /* inside current hull */
			/* horizon ridges: ridge -> incident facets */
			std::map<std::vector<int>, std::vector<int>> ridge_map;
			for (int f : vis)
				for (size_t skip = 0; skip < fs[f].verts.size(); skip++) {
					std::vector<int> ridge;
					for (size_t i = 0; i < fs[f].verts.size(); i++)
						if (i != skip)
							ridge.push_back(fs[f].verts[i]);
					std::sort(ridge.begin(), ridge.end());
					ridge_map[ridge].push_back(f);
				}
			std::set<int> vis_set(vis.begin(), vis.end());
			for (int f : vis)
				fs[f].dead = true;
			for (auto &[ridge, incident] : ridge_map) {
				if (incident.size() == 2)
					continue; /* internal to the visible region */
				HullFacet hf;
				hf.verts = ridge;
				hf.verts.push_back((int)p);
				auto [n, off] =
				    detail::coord_hyperplane(coords, hf.verts, inside, F);
				hf.normal = n;
				hf.offset = off;
				fs.push_back(hf);
			}
		}

		/* group simplicial facets by hyperplane, collect all tight points */
		std::map<std::vector<std::vector<Rat>>, std::pair<Vec<Scalar>, Scalar>>
		    planes;
		for (auto &hf : fs) {
			if (hf.dead)
				continue;
			/* canonical key: normalize so first nonzero coefficient of
			 * (normal, offset) is 1 */
			Vec<Scalar> key = hf.normal;
			key.push_back(hf.offset);
			Scalar lead = F->zero();
			for (auto &x : key)
				if (!is_zero(x)) {
					lead = x;
					break;
				}
			std::vector<std::vector<Rat>> kc;
			for (auto &x : key) {
				Scalar q = x / lead;
				kc.push_back(q.c);
			}
			planes.emplace(kc, std::make_pair(hf.normal, hf.offset));
		}
		for (auto &[key, nf] : planes) {
			auto &[n, off] = nf;
			std::vector<int> tight;
			for (size_t p = 0; p < pts.size(); p++) {
				Scalar v = off;
				for (size_t j = 0; j < D; j++)
					v += n[j] * coords[p][j];
				int s = sign(v);
				if (s > 0)
					throw std::logic_error("hull: certification failed");
				if (s == 0)
					tight.push_back((int)p);
			}
			facet_sets.push_back(tight);
			/* coord_hyperplane orients outward; store inward */
			Vec<Scalar> ni;
			for (auto &x : n)
				ni.push_back(-x);
			facet_normals.push_back(ni);
			facet_offsets.push_back(-off);
		}
	}

	/* vertices: tight facet normals span the coord space */
	std::vector<int> vert_ids;
	for (size_t p = 0; p < pts.size(); p++) {
		Mat<Scalar> ns;
		for (size_t f = 0; f < facet_sets.size(); f++)
			if (std::find(facet_sets[f].begin(), facet_sets[f].end(), (int)p) !=
			    facet_sets[f].end())
				ns.push_back(facet_normals[f]);
		if (ns.size() >= D && rank(ns) == D)
			vert_ids.push_back((int)p);
	}

	/* canonical vertex order: lex by value */
	std::sort(vert_ids.begin(), vert_ids.end(),
	          [&](int a, int b) { return lex_less(pts[a], pts[b]); });
	std::vector<int> new_id(pts.size(), -1);
	for (size_t i = 0; i < vert_ids.size(); i++) {
		new_id[vert_ids[i]] = (int)i;
		P.vertices.push_back(pts[vert_ids[i]]);
	}
	P.base = P.vertices[0];

	/* ambient halfspaces */
	for (size_t f = 0; f < facet_sets.size(); f++) {
		Halfspace h;
		/* solve span_rref^T a = normal; particular solution via solve() on
		 * the pivot structure: a = sum normal_k * rref_k works since rref
		 * rows have identity on pivot columns */
		Point a(P.ambient_dim, F->zero());
		/* We need a . (y-coords basis vector b_k) = normal_k where b_k are
		 * the rref rows. Choosing a in the row space of rref with
		 * coefficient vector t: t G = normal where G is the Gram matrix. */
		Mat<Scalar> G(D, Vec<Scalar>(D, F->zero()));
		for (size_t i = 0; i < D; i++)
			for (size_t j = 0; j < D; j++)
				G[i][j] = dot(P.span_rref[i], P.span_rref[j]);
		auto t = solve(G, facet_normals[f], F->zero());
		if (!t)
			throw std::logic_error("hull: gram system unsolvable");
		for (size_t i = 0; i < D; i++)
			for (size_t j = 0; j < P.ambient_dim; j++)
				a[j] += (*t)[i] * P.span_rref[i][j];
		h.normal = a;
		h.offset = facet_offsets[f] - dot(a, pts[0]); /* coords are relative to pts[0] */
		h.int_normal = rational_direction(a);
		if (h.int_normal) {
			/* renormalize to the primitive integer representative */
			Point ni = from_int_point(F, *h.int_normal);
			/* find scaling a = s * ni, divide offset by s */
			size_t lead = 0;
			while (is_zero(a[lead]))
				lead++;
			Scalar s = a[lead] / ni[lead];
			h.normal = ni;
			h.offset = h.offset / s;
		}
		std::vector<int> fv;
		for (int p : facet_sets[f])
			if (new_id[p] >= 0)
				fv.push_back(new_id[p]);
		std::sort(fv.begin(), fv.end());
		P.facets.push_back(h);
		P.facet_vertices.push_back(fv);
	}

	/* face lattice: close facet vertex sets under intersection */
	std::set<std::vector<int>> all_faces;
	std::vector<int> full;
	for (size_t i = 0; i < P.vertices.size(); i++)
		full.push_back((int)i);
	all_faces.insert(full);
	for (auto &fv : P.facet_vertices)
		all_faces.insert(fv);
	for (;;) {
		std::set<std::vector<int>> fresh;
		for (auto it = all_faces.begin(); it != all_faces.end(); ++it)
			for (auto jt = std::next(it); jt != all_faces.end(); ++jt) {
				std::vector<int> inter;
				std::set_intersection(it->begin(), it->end(), jt->begin(),
				                      jt->end(), std::back_inserter(inter));
				if (!inter.empty() && !all_faces.count(inter))
					fresh.insert(inter);
			}
		if (fresh.empty())
			break;
		all_faces.insert(fresh.begin(), fresh.end());
	}
	P.faces.assign(D + 1, {});
	for (auto &fc : all_faces) {
		Mat<Scalar> ds;
		for (size_t i = 1; i < fc.size(); i++) {
			Point d = P.vertices[fc[i]] - P.vertices[fc[0]];
			ds.push_back(Vec<Scalar>(d.begin(), d.end()));
		}
		size_t fd = ds.empty() ? 0 : rank(ds);
		P.faces[fd].push_back(fc);
	}
	for (auto &lvl : P.faces)
		std::sort(lvl.begin(), lvl.end());
	return P;
}

inline std::vector<int> VPolytope::face2_cycle(const std::vector<int> &face) const
{
	/* edges of P inside the face */
	std::map<int, std::vector<int>> adj;
	for (auto &e : faces[1]) {
		if (!std::includes(face.begin(), face.end(), e.begin(), e.end()))
			continue;
		adj[e[0]].push_back(e[1]);
		adj[e[1]].push_back(e[0]);
	}
	std::vector<int> cycle{face[0]};
	int prev = -1, cur = face[0];
	do {
		auto &nb = adj.at(cur);
		if (nb.size() != 2)
			throw std::logic_error("face2_cycle: not a 2-face");
		int nxt = nb[0] == prev ? nb[1] : nb[0];
		prev = cur;
		cur = nxt;
		if (cur != cycle[0])
			cycle.push_back(cur);
	} while (cur != cycle[0]);
	if (cycle.size() != face.size())
		throw std::logic_error("face2_cycle: cycle misses vertices");
	return cycle;
}

inline std::vector<std::vector<int>> VPolytope::triangulate() const
{
	/* recursive fan from the lex-min vertex of each face */
	std::map<std::vector<int>, std::vector<std::vector<int>>> memo;
	/* faces keyed by vertex sets; need dimension lookup */
	std::map<std::vector<int>, size_t> fdim;
	for (size_t k = 0; k < faces.size(); k++)
		for (auto &fc : faces[k])
			fdim[fc] = k;

	std::function<std::vector<std::vector<int>>(const std::vector<int> &)> tri =
	    [&](const std::vector<int> &face) -> std::vector<std::vector<int>> {
		auto it = memo.find(face);
		if (it != memo.end())
			return it->second;
		size_t d = fdim.at(face);
		std::vector<std::vector<int>> out;
		if (face.size() == d + 1) {
			out = {face};
		} else {
			int apex = face[0];
			/* subfaces of dimension d-1 inside this face, not containing
			 * the apex */
			for (auto &g : faces[d - 1]) {
				if (!std::includes(face.begin(), face.end(), g.begin(),
				                   g.end()))
					continue;
				if (std::binary_search(g.begin(), g.end(), apex))
					continue;
				for (auto s : tri(g)) {
					s.push_back(apex);
					std::sort(s.begin(), s.end());
					out.push_back(s);
				}
			}
		}
		memo[face] = out;
		return out;
	};
	std::vector<int> full;
	for (size_t i = 0; i < vertices.size(); i++)
		full.push_back((int)i);
	if (dim == 0)
		return {{0}};
	return tri(full);
}

/* ---------- derived operations ---------- */

inline VPolytope translate(const VPolytope &p, const Point &t)
{
	std::vector<Point> pts;
	for (auto &v : p.vertices)
		pts.push_back(v + t);
	return hull(pts);
}

inline VPolytope dilate(const VPolytope &p, const Scalar &t)
{
	std::vector<Point> pts;
	for (auto &v : p.vertices)
		pts.push_back(scale_point(t, v));
	return hull(pts);
}

inline VPolytope dilate(const VPolytope &p, const Rat &t)
{
	std::vector<Point> pts;
	for (auto &v : p.vertices)
		pts.push_back(scale_point(t, v));
	return hull(pts);
}

inline VPolytope minkowski_sum(const std::vector<VPolytope> &ps)
{
	if (ps.empty())
		throw std::invalid_argument("minkowski_sum of empty list");
	for (auto &p : ps)
		if (p.ambient_dim != ps[0].ambient_dim)
			throw std::invalid_argument("minkowski_sum: dimension mismatch");
	/* fold pairwise; the intermediate hull keeps candidate sets small */
	VPolytope acc = hull(ps[0].vertices);
	for (size_t i = 1; i < ps.size(); i++) {
		std::vector<Point> sums;
		for (auto &s : acc.vertices)
			for (auto &v : ps[i].vertices)
				sums.push_back(s + v);
		acc = hull(sums);
	}
	return acc;
}

inline bool polytope_eq(const VPolytope &a, const VPolytope &b)
{
	if (a.vertices.size() != b.vertices.size())
		return false;
	for (size_t i = 0; i < a.vertices.size(); i++)
		if (!point_eq(a.vertices[i], b.vertices[i]))
			return false;
	return true;
}

/* exact volume: Euclidean when full-dimensional, otherwise relative to the
 * canonical rref basis of the span (consistent across cells of a common span) */
inline Scalar volume(const VPolytope &p)
{
	const FieldPtr &F = p.F;
	if (p.dim == 0)
		return F->one();
	Mat<Scalar> coords;
	bool full = p.dim == p.ambient_dim;
	for (size_t i = 0; i < p.vertices.size(); i++) {
		if (full) {
			Point d = p.vertices[i] - p.base;
			coords.push_back(Vec<Scalar>(d.begin(), d.end()));
		} else
			coords.push_back(p.vertex_coords(i));
	}
	Scalar total = F->zero();
	Int fact = 1;
	for (size_t k = 2; k <= p.dim; k++)
		fact *= k;
	for (auto &simplex : p.triangulate()) {
		Mat<Scalar> edges;
		for (size_t i = 1; i < simplex.size(); i++) {
			Vec<Scalar> e;
			for (size_t j = 0; j < p.dim; j++)
				e.push_back(coords[simplex[i]][j] - coords[simplex[0]][j]);
			edges.push_back(e);
		}
		Scalar d = det(edges, F->zero(), F->one());
		if (sign(d) < 0)
			d = -d;
		total += d;
	}
	return total / Rat(fact);
}

inline bool is_zv_polytope(const VPolytope &p)
{
	for (auto &v : p.vertices)
		for (auto &x : v)
			if (!in_V(x))
				return false;
	for (auto &h : p.facets)
		if (!h.int_normal)
			return false;
	/* the span itself must be rational too (edge slopes rational) */
	for (auto &e : p.dim >= 1 ? p.faces[1] : std::vector<std::vector<int>>{})
		if (!rational_direction(p.vertices[e[1]] - p.vertices[e[0]]))
			return false;
	return true;
}

/* integer basis of the saturated lattice of the direction span; requires a
 * rational span */
inline IMat span_lattice(const VPolytope &p)
{
	IMat dirs;
	for (auto &r : p.span_rref) {
		Point v(r.begin(), r.end());
		auto d = rational_direction(v);
		if (!d)
			throw std::invalid_argument("span is not rational");
		dirs.push_back(*d);
	}
	return hnf(saturate(dirs));
}

/* facet normals of p expressed in the dual of the given span lattice basis L,
 * primitive; facet f corresponds to row f */
inline IMat facet_normals_in_lattice(const VPolytope &p, const IMat &L)
{
	IMat out;
	for (auto &h : p.facets) {
		if (!h.int_normal)
			throw std::invalid_argument("irrational facet normal");
		IVec nu;
		for (auto &row : L) {
			Int s = 0;
			for (size_t j = 0; j < row.size(); j++)
				s += (*h.int_normal)[j] * row[j];
			nu.push_back(s);
		}
		/* divide by gcd but keep the inward orientation */
		Int g = 0;
		for (auto &x : nu)
			g = gcd(g, x);
		if (g == 0)
			throw std::logic_error("zero facet normal in lattice");
		for (auto &x : nu)
			x /= g;
		out.push_back(nu);
	}
	return out;
}

inline std::optional<std::vector<VPolytope>> is_polysimplex(const VPolytope &p);
inline bool is_polystable_cell(const VPolytope &p);

/* ---------- lattice points of a rational polytope ---------- */

inline std::vector<IVec> lattice_points(const VPolytope &p)
{
	size_t n = p.ambient_dim;
	std::vector<Rat> lo(n), hi(n);
	for (size_t j = 0; j < n; j++) {
		lo[j] = to_rat(p.vertices[0][j]);
		hi[j] = lo[j];
		for (auto &v : p.vertices) {
			Rat x = to_rat(v[j]);
			if (x < lo[j])
				lo[j] = x;
			if (x > hi[j])
				hi[j] = x;
		}
	}
	std::vector<IVec> out;
	IVec cur(n);
	std::vector<long> lo_i(n), hi_i(n);
	for (size_t j = 0; j < n; j++) {
		lo_i[j] = (long)rat_ceil(lo[j]).get_si();
		hi_i[j] = (long)rat_floor(hi[j]).get_si();
		if (lo_i[j] > hi_i[j])
			return {};
		cur[j] = lo_i[j];
	}
	for (;;) {
		Point q = from_int_point(p.F, cur);
		if (p.contains(q))
			out.push_back(cur);
		size_t k = 0;
		while (k < n) {
			cur[k] = cur[k] + 1;
			if (cur[k] <= hi_i[k])
				break;
			cur[k] = lo_i[k];
			k++;
		}
		if (k == n)
			break;
	}
	return out;
}

/* ---------- predicates ---------- */

inline std::optional<std::vector<VPolytope>> is_polysimplex(const VPolytope &p)
{
	const FieldPtr &F = p.F;
	if (p.dim == 0)
		return std::vector<VPolytope>{};
	/* simplicity: every vertex on exactly dim edges */
	std::vector<int> deg(p.vertices.size(), 0);
	for (auto &e : p.faces[1]) {
		deg[e[0]]++;
		deg[e[1]]++;
	}
	for (int d : deg)
		if ((size_t)d != p.dim)
			return std::nullopt;

	/* edges at the base vertex (index 0, lex-min) */
	std::vector<int> nb;
	for (auto &e : p.faces[1]) {
		if (e[0] == 0)
			nb.push_back(e[1]);
		else if (e[1] == 0)
			nb.push_back(e[0]);
	}
	/* group: two edges belong to one simplex factor iff they span a
	 * triangular 2-face */
	size_t k = nb.size();
	std::vector<int> parent(k);
	for (size_t i = 0; i < k; i++)
		parent[i] = (int)i;
	std::function<int(int)> find = [&](int x) {
		return parent[x] == x ? x : parent[x] = find(parent[x]);
	};
	if (p.dim >= 2) {
		for (size_t i = 0; i < k; i++)
			for (size_t j = i + 1; j < k; j++) {
				/* the 2-face containing vertex 0, nb[i], nb[j] */
				for (auto &f2 : p.faces[2]) {
					if (!std::binary_search(f2.begin(), f2.end(), 0) ||
					    !std::binary_search(f2.begin(), f2.end(), nb[i]) ||
					    !std::binary_search(f2.begin(), f2.end(), nb[j]))
						continue;
					if (f2.size() == 3)
						parent[find((int)i)] = find((int)j);
					break;
				}
			}
	}
	std::map<int, std::vector<int>> groups;
	for (size_t i = 0; i < k; i++)
		groups[find((int)i)].push_back(nb[i]);

	std::vector<VPolytope> factors;
	Point origin(p.ambient_dim, F->zero());
	for (auto &[root, members] : groups) {
		std::vector<Point> pts{origin};
		for (int v : members)
			pts.push_back(p.vertices[v] - p.vertices[0]);
		VPolytope A = hull(pts);
		if (A.vertices.size() != members.size() + 1 ||
		    A.dim != members.size())
			return std::nullopt; /* not a simplex factor */
		factors.push_back(A);
	}
	VPolytope sum = minkowski_sum(factors);
	VPolytope target = translate(p, scale_point(Rat(-1), p.vertices[0]));
	if (!polytope_eq(sum, target))
		return std::nullopt;
	return factors;
}

inline bool is_polystable_cell(const VPolytope &p)
{
	if (!is_zv_polytope(p))
		return false;
	if (!is_polysimplex(p))
		return false;
	if (p.dim == 0)
		return true;
	IMat L = span_lattice(p);
	IMat nus = facet_normals_in_lattice(p, L);
	for (size_t v = 0; v < p.vertices.size(); v++) {
		IMat m;
		for (int f : p.facets_at_vertex((int)v))
			m.push_back(nus[f]);
		if (m.size() != p.dim)
			return false; /* simple cells only */
		if (!is_unimodular(m))
			return false;
	}
	return true;
}

inline bool is_semistable_polyhedron(const VPolytope &p)
{
	const FieldPtr &F = p.F;
	if (!is_zv_polytope(p))
		return false;
	if (p.dim == 0)
		return true;
	/* bounded semistable polyhedra are simplices presented by a single
	 * relation t_0 + ... + t_d = pi */
	if (p.vertices.size() != p.dim + 1)
		return false;
	size_t d = p.dim;
	IMat L = span_lattice(p);
	IMat nus = facet_normals_in_lattice(p, L); /* inward primitive */
	/* offsets: t_f(x) = nu_f . y + gamma_f >= 0 in L-coords of x - base */
	/* L-coords of vertices */
	Mat<Scalar> lcoords;
	{
		Mat<Rat> LQ = to_rat_mat(L);
		for (auto &v : p.vertices) {
			Point diff = v - p.base;
			/* solve y L = diff over Scalar: transpose system */
			Mat<Scalar> sys(p.ambient_dim, Vec<Scalar>(L.size(), F->zero()));
			for (size_t i = 0; i < L.size(); i++)
				for (size_t j = 0; j < p.ambient_dim; j++)
					sys[j][i] = F->from_rat(Rat(L[i][j]));
			Vec<Scalar> rhs(diff.begin(), diff.end());
			auto y = solve(sys, rhs, F->zero());
			if (!y)
				return false;
			lcoords.push_back(*y);
		}
	}
	size_t nf = p.facets.size();
	if (nf != d + 1)
		return false;
	Vec<Scalar> gamma;
	for (size_t f = 0; f < nf; f++) {
		/* gamma_f = - nu_f . y at any tight vertex */
		int v = p.facet_vertices[f][0];
		Scalar g = F->zero();
		for (size_t j = 0; j < d; j++)
			g -= F->from_rat(Rat(nus[f][j])) * lcoords[v][j];
		gamma.push_back(g);
		if (!in_V(g))
			return false;
	}
	/* unique positive dependency sum lambda_f nu_f = 0 */
	Mat<Rat> nuq(d, Vec<Rat>(nf));
	for (size_t f = 0; f < nf; f++)
		for (size_t j = 0; j < d; j++)
			nuq[j][f] = Rat(nus[f][j]);
	Mat<Rat> ker = nullspace(nuq, nf, Rat(0), Rat(1));
	if (ker.size() != 1)
		return false;
	Vec<Rat> lam = ker[0];
	int s0 = sgn(lam[0]);
	if (s0 == 0)
		return false;
	if (s0 < 0)
		for (auto &x : lam)
			x = -x;
	Int den = 1;
	for (auto &x : lam) {
		if (sgn(x) <= 0)
			return false;
		den = lcm(den, x.get_den());
	}
	IVec lami;
	Int g = 0;
	for (auto &x : lam) {
		Rat y = x * Rat(den);
		lami.push_back(y.get_num());
		g = gcd(g, y.get_num());
	}
	for (auto &x : lami)
		x /= g;
	/* choice of the t_0 facet */
	for (size_t j = 0; j <= d; j++) {
		IMat m;
		Int prod_lam = 1;
		for (size_t f = 0; f <= d; f++) {
			if (f == j)
				continue;
			m.push_back(nus[f]);
			prod_lam *= lami[f];
		}
		Int Dj = abs(idet(m)) * prod_lam;
		/* need rational t > 0 with t^d * Dj = 1: t = Dj^{-1/d} */
		/* Dj must be a d-th power */
		Int r = 1;
		{
			mpz_class root;
			int exact = mpz_root(root.get_mpz_t(), Dj.get_mpz_t(),
			                     (unsigned long)d);
			if (!exact)
				continue;
			r = root;
		}
		Rat t = Rat(1) / Rat(r);
		/* all t * lambda_f must be integers */
		bool ok = true;
		for (size_t f = 0; f <= d; f++) {
			Rat kf = t * Rat(lami[f]);
			if (kf.get_den() != 1)
				ok = false;
		}
		if (!ok)
			continue;
		/* pi = sum_f t lambda_f gamma_f must be strictly positive */
		Scalar pi = F->zero();
		for (size_t f = 0; f <= d; f++) {
			Rat kf = t * Rat(lami[f]);
			pi += kf * gamma[f];
		}
		if (sign(pi) > 0 && in_V(pi))
			return true;
	}
	return false;
}

/* every vertex normal cone of p lies inside a single normal cone of q */
inline bool minkowski_dominates(const VPolytope &p, const VPolytope &q)
{
	if (p.ambient_dim != q.ambient_dim)
		throw std::invalid_argument("minkowski_dominates: dimension mismatch");
	for (size_t v = 0; v < p.vertices.size(); v++) {
		std::vector<int> common;
		bool first = true;
		for (int f : p.facets_at_vertex((int)v)) {
			auto arg = q.argmax_face(scale_point(Rat(-1), p.facets[f].normal));
			std::sort(arg.begin(), arg.end());
			if (first) {
				common = arg;
				first = false;
			} else {
				std::vector<int> inter;
				std::set_intersection(common.begin(), common.end(),
				                      arg.begin(), arg.end(),
				                      std::back_inserter(inter));
				common = inter;
			}
			if (common.empty())
				return false;
		}
	}
	return true;
}

} // namespace zv
