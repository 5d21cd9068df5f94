/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "lattice.hpp"
#include "polytope.hpp"

#include <map>
#include <stdexcept>

namespace zv {

/* ---------- edge data ---------- */

struct EdgeData {
	std::vector<int> edge; /* vertex indices {u, v}, u < v */
	IVec d;                /* primitive direction, oriented u -> v */
	Scalar ell0;           /* (v - u) = ell0 * d, ell0 in V_{>0} */
	Vec<Rat> c;            /* ell0 = sum c_i beta_i, filled by decompose */
};

inline std::vector<EdgeData> edge_data(const VPolytope &p)
{
	std::vector<EdgeData> out;
	for (auto &e : p.edges()) {
		if (e.size() != 2)
			continue;
		EdgeData ed;
		ed.edge = e;
		Point diff = p.vertices[e[1]] - p.vertices[e[0]];
		auto d = rational_direction(diff);
		if (!d)
			throw std::invalid_argument("not a (Z,V)-polytope: irrational edge");
		ed.d = *d;
		size_t lead = 0;
		while (ed.d[lead] == 0)
			lead++;
		ed.ell0 = diff[lead] / Rat(ed.d[lead]);
		if (!in_V(ed.ell0) || sign(ed.ell0) <= 0)
			throw std::invalid_argument("not a (Z,V)-polytope: length outside V");
		out.push_back(ed);
	}
	return out;
}

/* ---------- positive basis selection ---------- */

/* A Q-basis beta_1..beta_r of V, each strictly positive, such that every input
 * is a strictly positive rational combination of the betas. The construction
 * is guided by rational approximations of the evaluation functional; every
 * accepted basis is certified by exact sign tests. */
inline Vec<Scalar> choose_positive_basis(const Vec<Scalar> &lengths)
{
	if (lengths.empty())
		throw std::invalid_argument("choose_positive_basis: no inputs");
	const FieldPtr &F = lengths[0].F;
	size_t r = F->vdim();
	Mat<Rat> K; /* V-coordinates of the inputs */
	for (auto &l : lengths) {
		if (sign(l) <= 0)
			throw std::invalid_argument("choose_positive_basis: non-positive input");
		auto k = F->v_coords(l);
		if (!k)
			throw std::invalid_argument("choose_positive_basis: input outside V");
		K.push_back(*k);
	}

	auto value_of = [&](const Vec<Rat> &x) { return F->from_v_coords(x); };

	for (unsigned prec = 64;; prec *= 2) {
		if (prec > (1u << 20))
			throw std::logic_error("choose_positive_basis: no convergence");
		/* rational approximation q of the evaluation functional */
		Vec<Rat> q;
		for (size_t i = 0; i < r; i++) {
			auto e = F->enclosure(F->v_scalar(i).c, prec);
			Rat mid = (e.lo + e.hi) / 2;
			q.push_back(mid);
		}
		/* slice the cone at q.x = 1 */
		bool bad = false;
		Mat<Rat> slice;
		for (auto &k : K) {
			Rat qa(0);
			for (size_t i = 0; i < r; i++)
				qa += q[i] * k[i];
			if (sgn(qa) <= 0) {
				bad = true;
				break;
			}
			Vec<Rat> s;
			for (size_t i = 0; i < r; i++)
				s.push_back(k[i] / qa);
			slice.push_back(s);
		}
		if (bad)
			continue;

		/* chart of the slice hyperplane: base point p0 = e_m / q_m, kernel
		 * basis u_i = e_i - (q_i/q_m) e_m for i != m */
		size_t m = 0;
		for (size_t i = 1; i < r; i++)
			if (abs(q[i]) > abs(q[m]))
				m = i;
		if (sgn(q[m]) == 0)
			continue;
		std::vector<size_t> free_idx;
		for (size_t i = 0; i < r; i++)
			if (i != m)
				free_idx.push_back(i);
		size_t s = r - 1; /* slice dimension */
		auto unchart = [&](const Vec<Rat> &t) {
			Vec<Rat> x(r, Rat(0));
			x[m] = Rat(1) / q[m];
			for (size_t i = 0; i < s; i++) {
				x[free_idx[i]] += t[i];
				x[m] -= q[free_idx[i]] / q[m] * t[i];
			}
			return x;
		};
		Mat<Rat> T; /* slice points in chart coordinates */
		for (auto &sp : slice) {
			Vec<Rat> t;
			for (size_t i = 0; i < s; i++)
				t.push_back(sp[free_idx[i]]);
			T.push_back(t);
		}

		/* On the slice, the exact value is 1 + (value - q)(x), uniformly close
		 * to 1 on bounded sets once q is precise; a margin-1 box-corner
		 * simplex around the slice points is certified for large precisions.
		 * The margin shrinks with the precision to keep vertices near the
		 * points. */
		Mat<Rat> simplex; /* r vertices in chart coordinates */
		if (s == 0) {
			simplex.push_back({});
		} else {
			Rat margin = prec <= 64 ? Rat(1) : Rat(1, (long)(prec / 64));
			Vec<Rat> lo = T[0], hi = T[0];
			for (auto &t : T)
				for (size_t i = 0; i < s; i++) {
					lo[i] = std::min(lo[i], t[i]);
					hi[i] = std::max(hi[i], t[i]);
				}
			Rat big = margin;
			for (size_t i = 0; i < s; i++)
				big += hi[i] - lo[i] + 2 * margin;
			Vec<Rat> v0;
			for (size_t i = 0; i < s; i++)
				v0.push_back(lo[i] - margin);
			simplex.push_back(v0);
			for (size_t k = 0; k < s; k++) {
				Vec<Rat> vk = v0;
				vk[k] += big;
				simplex.push_back(vk);
			}
		}

		/* Coarse dyadic rounding keeps the basis coordinates small; the
		 * certification below is exact, so rounding can only cost a retry.
		 * Granularity shrinks with the precision to preserve convergence. */
		unsigned grain = std::max(12u, prec / 4);
		Int scale = Int(1) << grain;
		auto dyadic = [&](const Rat &x) -> Rat {
			Rat y = x * Rat(scale);
			Int n = y.get_num() / y.get_den(); /* trunc toward zero is fine */
			return Rat(n) / Rat(scale);
		};

		/* exact certification */
		Vec<Scalar> betas;
		Mat<Rat> B; /* columns are basis coordinate vectors */
		bool ok = true;
		for (auto &t : simplex) {
			Vec<Rat> x = unchart(t);
			for (auto &xi : x)
				xi = dyadic(xi);
			Scalar beta = value_of(x);
			if (sign(beta) <= 0) {
				ok = false;
				break;
			}
			betas.push_back(beta);
			B.push_back(x);
		}
		if (!ok)
			continue;
		Mat<Rat> Bt = transpose(B);
		for (auto &k : K) {
			auto c = solve(Bt, k, Rat(0));
			if (!c) {
				ok = false;
				break;
			}
			for (auto &ci : *c)
				if (sgn(ci) <= 0)
					ok = false;
			if (!ok)
				break;
		}
		if (ok)
			return betas;
	}
}

/* ---------- 2-balanced functions ---------- */

struct BalancedFunction {
	/* positive rational weight per edge, keyed by sorted vertex pair; the
	 * weight c(e) represents eta(e) = c(e) * l(e_0), so the balancing term
	 * for the oriented edge u -> v is c(uv) * d(uv) */
	std::map<std::pair<int, int>, Rat> c;

	const Rat &at(int u, int v) const
	{
		auto it = c.find({std::min(u, v), std::max(u, v)});
		if (it == c.end())
			throw std::invalid_argument("missing edge weight");
		return it->second;
	}
	void set(int u, int v, Rat w)
	{
		c[{std::min(u, v), std::max(u, v)}] = std::move(w);
	}
};

namespace detail {

/* primitive direction of the oriented edge u -> v */
inline IVec edge_dir(const VPolytope &p, int u, int v)
{
	auto d = rational_direction(p.vertices[v] - p.vertices[u]);
	if (!d)
		throw std::invalid_argument("irrational edge direction");
	return *d;
}

} // namespace detail

inline bool is_two_balanced(const VPolytope &p, const BalancedFunction &b)
{
	if (p.dim < 2)
		return true;
	for (auto &f : p.faces[2]) {
		std::vector<int> cyc = p.face2_cycle(f);
		Vec<Rat> sum(p.ambient_dim, Rat(0));
		for (size_t i = 0; i < cyc.size(); i++) {
			int u = cyc[i], v = cyc[(i + 1) % cyc.size()];
			IVec d = detail::edge_dir(p, u, v);
			const Rat &w = b.at(u, v);
			for (size_t j = 0; j < d.size(); j++)
				sum[j] += w * Rat(d[j]);
		}
		for (auto &x : sum)
			if (sgn(x) != 0)
				return false;
	}
	return true;
}

/* the polytope P(eta): edge graph walk with psi(v) - psi(u) = c(uv) d(uv) */
inline VPolytope reconstruct(const VPolytope &p, const BalancedFunction &b)
{
	const FieldPtr &F = p.F;
	size_t n = p.vertices.size();
	std::vector<std::vector<int>> adj(n);
	for (auto &e : p.edges())
		if (e.size() == 2) {
			adj[e[0]].push_back(e[1]);
			adj[e[1]].push_back(e[0]);
		}
	std::vector<std::optional<Vec<Rat>>> psi(n);
	psi[0] = Vec<Rat>(p.ambient_dim, Rat(0)); /* vertex 0 is lex-min */
	std::vector<int> queue{0};
	while (!queue.empty()) {
		int u = queue.back();
		queue.pop_back();
		for (int v : adj[u]) {
			IVec d = detail::edge_dir(p, u, v);
			const Rat &w = b.at(u, v);
			Vec<Rat> cand = *psi[u];
			for (size_t j = 0; j < d.size(); j++)
				cand[j] += w * Rat(d[j]);
			if (!psi[v]) {
				psi[v] = cand;
				queue.push_back(v);
			} else if (*psi[v] != cand)
				throw std::invalid_argument("not 2-balanced");
		}
	}
	std::vector<Point> pts;
	for (auto &ps : psi) {
		if (!ps)
			throw std::logic_error("reconstruct: disconnected edge graph");
		pts.push_back(from_rat_point(F, *ps));
	}
	VPolytope q = hull(pts);
	/* graph isomorphism check: every psi image must survive as a vertex and
	 * the edge sets must correspond */
	if (q.vertices.size() != n)
		throw std::invalid_argument("graph mismatch");
	std::vector<int> newid(n, -1);
	for (size_t i = 0; i < n; i++) {
		for (size_t j = 0; j < n; j++)
			if (point_eq(q.vertices[j], pts[i]))
				newid[i] = (int)j;
		if (newid[i] < 0)
			throw std::invalid_argument("graph mismatch");
	}
	std::set<std::pair<int, int>> pe, qe;
	for (auto &e : p.edges())
		if (e.size() == 2)
			pe.insert({std::min(newid[e[0]], newid[e[1]]),
			           std::max(newid[e[0]], newid[e[1]])});
	for (auto &e : q.edges())
		if (e.size() == 2)
			qe.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});
	if (pe != qe)
		throw std::invalid_argument("graph mismatch");
	return q;
}

/* ---------- Minkowski decomposition ---------- */

struct Decomposition {
	Vec<Scalar> betas;
	std::vector<VPolytope> summands;
	std::vector<EdgeData> edges;
	std::vector<BalancedFunction> weights;
};

inline Decomposition minkowski_decompose(const VPolytope &p,
                                         const Vec<Scalar> &betas)
{
	const FieldPtr &F = p.F;
	Decomposition dec;
	dec.edges = edge_data(p);
	dec.betas = betas;
	if (dec.edges.empty()) {
		/* a point: every factor is the origin */
		for (size_t i = 0; i < dec.betas.size(); i++) {
			dec.summands.push_back(p);
			dec.weights.emplace_back();
		}
		return dec;
	}
	size_t r = dec.betas.size();

	/* per-edge coefficients: ell0(e) = sum c_i beta_i with c_i > 0 */
	Mat<Rat> Bt(r, Vec<Rat>(r));
	for (size_t i = 0; i < r; i++) {
		auto bc = F->v_coords(dec.betas[i]);
		for (size_t j = 0; j < r; j++)
			Bt[j][i] = (*bc)[j];
	}
	dec.weights.assign(r, BalancedFunction{});
	for (auto &e : dec.edges) {
		auto lc = F->v_coords(e.ell0);
		auto c = solve(Bt, *lc, Rat(0));
		if (!c)
			throw std::logic_error("decompose: coefficient system unsolvable");
		e.c = *c;
		for (size_t i = 0; i < r; i++) {
			if (sgn(e.c[i]) <= 0)
				throw std::logic_error("decompose: non-positive coefficient");
			dec.weights[i].set(e.edge[0], e.edge[1], e.c[i]);
		}
	}
	for (size_t i = 0; i < r; i++) {
		if (!is_two_balanced(p, dec.weights[i]))
			throw std::logic_error("decompose: weight not 2-balanced");
		dec.summands.push_back(reconstruct(p, dec.weights[i]));
	}
	/* round-trip verification: sum beta_i P_i = p up to translation */
	std::vector<VPolytope> scaled;
	for (size_t i = 0; i < r; i++)
		scaled.push_back(dilate(dec.summands[i], dec.betas[i]));
	VPolytope sum = minkowski_sum(scaled);
	VPolytope moved = translate(sum, p.vertices[0] - sum.vertices[0]);
	if (!polytope_eq(moved, p))
		throw std::logic_error("decompose: round-trip failed");
	return dec;
}

inline Decomposition minkowski_decompose(const VPolytope &p)
{
	const FieldPtr &F = p.F;
	auto edges = edge_data(p);
	Vec<Scalar> betas;
	if (edges.empty()) {
		betas = choose_positive_basis({F->one()});
	} else {
		Vec<Scalar> lengths;
		for (auto &e : edges)
			lengths.push_back(e.ell0);
		betas = choose_positive_basis(lengths);
	}
	return minkowski_decompose(p, betas);
}

/* ---------- splitting index ---------- */

inline Int splitting_index(const VPolytope &p, const std::vector<VPolytope> &summands)
{
	IMat L = span_lattice(p);
	if (L.empty())
		return 1;
	size_t rk = L.size();
	size_t dims = 0;
	IMat gens;
	Mat<Rat> Lt = transpose(to_rat_mat(L));
	for (auto &s : summands) {
		dims += s.dim;
		for (auto &row : span_lattice(s)) {
			Vec<Rat> b;
			for (auto &x : row)
				b.push_back(Rat(x));
			auto sol = solve(Lt, b, Rat(0));
			if (!sol)
				throw std::invalid_argument("not a rational splitting");
			IVec g;
			for (auto &q : *sol) {
				if (q.get_den() != 1)
					throw std::invalid_argument("not a rational splitting");
				g.push_back(q.get_num());
			}
			gens.push_back(g);
		}
	}
	if (dims != p.dim)
		throw std::invalid_argument("not a rational splitting");
	auto idx = lattice_index(gens, rk, true);
	if (!idx)
		throw std::invalid_argument("not a rational splitting");
	return *idx;
}

/* ---------- basis perturbation ---------- */

inline Vec<Scalar> perturb_basis(const Vec<Scalar> &betas, uint64_t seed,
                                 const Rat &magnitude,
                                 const Vec<Scalar> &lengths = {})
{
	if (sgn(magnitude) == 0)
		return betas;
	const FieldPtr &F = betas[0].F;
	size_t r = betas.size();
	Rng rng(seed);
	Rat mag = magnitude;
	for (;;) {
		Mat<Rat> T = mat_identity<Rat>(r, Rat(0), Rat(1));
		for (size_t i = 0; i < r; i++)
			for (size_t j = 0; j < r; j++)
				T[i][j] += mag * Rat(rng.range(-16, 16)) / 16;
		if (is_zero(det(T, Rat(0), Rat(1)))) {
			mag /= 2;
			continue;
		}
		Vec<Scalar> out;
		bool ok = true;
		for (size_t i = 0; i < r; i++) {
			Scalar b = F->zero();
			for (size_t j = 0; j < r; j++)
				b = b + T[i][j] * betas[j];
			if (sign(b) <= 0)
				ok = false;
			out.push_back(b);
		}
		if (ok && !lengths.empty()) {
			Mat<Rat> Bt(F->vdim(), Vec<Rat>(r));
			for (size_t i = 0; i < r && ok; i++) {
				auto bc = F->v_coords(out[i]);
				if (!bc) {
					ok = false;
					break;
				}
				for (size_t j = 0; j < F->vdim(); j++)
					Bt[j][i] = (*bc)[j];
			}
			for (auto &l : lengths) {
				if (!ok)
					break;
				auto lc = F->v_coords(l);
				std::optional<Vec<Rat>> c;
				if (lc)
					c = solve(Bt, *lc, Rat(0));
				if (!c) {
					ok = false;
					break;
				}
				for (auto &ci : *c)
					if (sgn(ci) <= 0)
						ok = false;
			}
		}
		if (ok)
			return out;
		mag /= 2;
	}
}

} // namespace zv
