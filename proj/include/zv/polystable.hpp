/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cayley.hpp"
#include "decompose.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace zv {

/* ---------- lattice indices of triangulations and cells ---------- */

inline Int triangulation_index(const Triangulation &t)
{
	Int mx = 1;
	for (auto &cell : t.cells) {
		std::vector<IVec> verts;
		for (int id : cell)
			verts.push_back(ivec_of(t.points.at(id)));
		IMat diffs;
		for (size_t i = 1; i < verts.size(); i++) {
			IVec d = verts[i];
			for (size_t j = 0; j < d.size(); j++)
				d[j] -= verts[0][j];
			diffs.push_back(d);
		}
		if (!diffs.empty() && rank(to_rat_mat(diffs)) != diffs.size())
			throw std::invalid_argument("triangulation_index: non-simplex cell");
		Int ix = simplex_index(verts);
		if (ix > mx)
			mx = ix;
	}
	return mx;
}

namespace detail {

/* largest rational g with every entry an integer multiple of g */
inline Rat rat_content(const Mat<Rat> &rows)
{
	Int den = 1;
	for (auto &row : rows)
		for (auto &x : row)
			den = lcm(den, x.get_den());
	Int num = 0;
	for (auto &row : rows)
		for (auto &x : row)
			num = gcd(num, x.get_num() * (den / x.get_den()));
	if (num == 0)
		return Rat(1);
	return Rat(num) / Rat(den);
}

inline Rat rat_gcd(const Rat &a, const Rat &b)
{
	if (sgn(a) == 0)
		return abs(b);
	if (sgn(b) == 0)
		return abs(a);
	Int den = lcm(a.get_den(), b.get_den());
	Int num = gcd(a.get_num() * (den / a.get_den()), b.get_num() * (den / b.get_den()));
	return Rat(num) / Rat(den);
}

} // namespace detail

/* The intrinsic lattice index of a polysimplex: each simplex factor is scaled
 * down to its minimal integer model, the models are placed in the Cayley
 * ambient with one tag direction per extra factor, and the index of the row
 * span inside its saturation is taken. Index one characterises polystable
 * cells among polysimplices. */
inline Int cell_index(const VPolytope &p)
{
	auto factors = is_polysimplex(p);
	if (!factors)
		throw std::invalid_argument("cell_index: not a polysimplex");
	if (p.dim == 0)
		return 1;
	size_t d = p.ambient_dim, r = factors->size();
	IMat rows;
	for (size_t j = 0; j < r; j++) {
		const VPolytope &s = (*factors)[j];
		Mat<Rat> qrows;
		std::optional<Scalar> ell1;
		for (size_t i = 1; i < s.vertices.size(); i++) {
			Point w = s.vertices[i] - s.vertices[0];
			auto dk = rational_direction(w);
			if (!dk)
				throw std::invalid_argument("cell_index: irrational edge");
			size_t lead = 0;
			while ((*dk)[lead] == 0)
				lead++;
			Scalar ell = w[lead] / Rat((*dk)[lead]);
			if (!ell1)
				ell1 = ell;
			Scalar ratio = ell / *ell1;
			if (!is_rational(ratio))
				throw std::invalid_argument("cell_index: incommensurable factor");
			Rat q = to_rat(ratio);
			Vec<Rat> row;
			for (size_t k = 0; k < d; k++)
				row.push_back(q * Rat((*dk)[k]));
			qrows.push_back(row);
		}
		Rat g = detail::rat_content(qrows);
		for (auto &row : qrows) {
			IVec irow;
			for (auto &x : row) {
				Rat v = x / g;
				irow.push_back(v.get_num());
			}
			for (size_t k = 1; k < r; k++)
				irow.push_back(0);
			rows.push_back(irow);
		}
	}
	for (size_t j = 1; j < r; j++) {
		IVec row(d + r - 1, 0);
		row[d + j - 1] = 1;
		rows.push_back(row);
	}
	auto ix = lattice_index(rows, d + r - 1);
	return ix ? *ix : Int(1);
}

/* ---------- small positive bases and seeded heights ---------- */

namespace detail {

inline Rat rat_round(const Rat &q, const Int &den)
{
	Int fl = rat_floor(q * Rat(den) + Rat(1, 2));
	return Rat(fl) / Rat(den);
}

/* Round a certified positive basis to small denominators. The certified
 * region of choose_positive_basis is open with unit margins, so a nearby
 * dyadic basis almost always passes the same exact certificates; the precise
 * basis is kept as a fallback. */
inline Vec<Scalar> small_positive_basis(const Vec<Scalar> &lengths)
{
	Vec<Scalar> b0 = choose_positive_basis(lengths);
	const FieldPtr &F = b0[0].F;
	Mat<Rat> K, X;
	for (auto &l : lengths)
		K.push_back(*F->v_coords(l));
	for (auto &b : b0)
		X.push_back(*F->v_coords(b));
	for (Int den = 1; den <= (Int(1) << 24); den *= 2) {
		Mat<Rat> Xr;
		Vec<Scalar> betas;
		bool ok = true;
		for (auto &x : X) {
			Vec<Rat> row;
			for (auto &q : x)
				row.push_back(rat_round(q, den));
			Scalar beta = F->from_v_coords(row);
			if (sign(beta) <= 0) {
				ok = false;
				break;
			}
			Xr.push_back(row);
			betas.push_back(beta);
		}
		if (!ok)
			continue;
		if (!inverse(Xr, Rat(0), Rat(1)))
			continue;
		Mat<Rat> Bt = transpose(Xr);
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
	return b0;
}

inline std::uint64_t mix64(std::uint64_t x)
{
	x += 0x9e3779b97f4a7c15ull;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
	return x ^ (x >> 31);
}

/* deterministic key of a summand point; identical across neighbouring cells
 * once the models are anchored, which keeps seeded lifts compatible */
inline std::uint64_t point_key(std::uint64_t seed, size_t summand, const IVec &q)
{
	std::uint64_t h = mix64(seed ^ 0x5bf03635ull);
	h = mix64(h ^ (std::uint64_t)(summand + 1));
	std::hash<std::string> hs;
	for (auto &x : q)
		h = mix64(h ^ (std::uint64_t)hs(x.get_str()));
	return h;
}

/* ---------- summand models of a (Z,V)-cell ---------- */

/* P = t + sum gamma_i * M_i with M_i a content-one lattice polytope and the
 * gamma_i positive and rationally independent. Translations are anchored:
 * the integer parts of the gamma-coordinates of t are absorbed into the
 * models, so cells sharing a facet see the same absolute model points. */
struct CellStructure {
	Vec<Scalar> betas;
	Vec<Scalar> gammas;
	Vec<Rat> deltas;
	std::vector<VPolytope> models;
	Point t;
};

inline CellStructure cell_structure(const VPolytope &p,
                                    const std::optional<Vec<Scalar>> &shared_betas,
                                    const std::optional<Vec<Rat>> &shared_deltas)
{
	const FieldPtr &F = p.F;
	Vec<Scalar> betas;
	if (shared_betas) {
		betas = *shared_betas;
	} else {
		Vec<Scalar> lengths;
		for (auto &e : edge_data(p))
			lengths.push_back(e.ell0);
		if (lengths.empty())
			lengths.push_back(F->one());
		betas = small_positive_basis(lengths);
	}
	Decomposition dec = minkowski_decompose(p, betas);
	size_t r = betas.size(), d = p.ambient_dim;
	CellStructure cs;
	cs.betas = betas;
	for (size_t i = 0; i < r; i++) {
		const VPolytope &S = dec.summands[i];
		Mat<Rat> diffs;
		for (auto &v : S.vertices)
			diffs.push_back(to_rat_point(v - S.vertices[0]));
		Rat delta = shared_deltas ? (*shared_deltas)[i] : rat_content(diffs);
		std::vector<Point> mp;
		for (auto &row : diffs) {
			Vec<Rat> q;
			for (auto &x : row) {
				Rat y = x / delta;
				if (y.get_den() != 1)
					throw std::logic_error("cell_structure: non-integral model");
				q.push_back(y);
			}
			mp.push_back(from_rat_point(F, q));
		}
		cs.models.push_back(hull(mp));
		cs.deltas.push_back(delta);
		cs.gammas.push_back(delta * betas[i]);
	}
	auto reassemble = [&]() {
		std::vector<VPolytope> scaled;
		for (size_t i = 0; i < r; i++)
			scaled.push_back(dilate(cs.models[i], cs.gammas[i]));
		VPolytope msum = minkowski_sum(scaled);
		cs.t = p.vertices[0] - msum.vertices[0];
		return msum;
	};
	VPolytope msum = reassemble();

	/* anchoring */
	Mat<Rat> Bt(r, Vec<Rat>(r));
	for (size_t i = 0; i < r; i++) {
		auto bc = F->v_coords(betas[i]);
		for (size_t j = 0; j < r; j++)
			Bt[j][i] = (*bc)[j];
	}
	IMat z(r, IVec(d, 0));
	for (size_t j = 0; j < d; j++) {
		auto tc = F->v_coords(cs.t[j]);
		if (!tc)
			throw std::invalid_argument("cell_structure: translation outside V");
		auto tau = solve(Bt, *tc, Rat(0));
		if (!tau)
			throw std::logic_error("cell_structure: translation solve failed");
		for (size_t i = 0; i < r; i++)
			z[i][j] = rat_floor((*tau)[i] / cs.deltas[i]);
	}
	for (size_t i = 0; i < r; i++)
		cs.models[i] = translate(cs.models[i], from_int_point(F, z[i]));
	msum = reassemble();
	if (!polytope_eq(translate(msum, cs.t), p))
		throw std::logic_error("cell_structure: reassembly failed");
	return cs;
}

/* ---------- the slicing engine ---------- */

struct SlicedOptions {
	long c = 1;                 /* model dilation */
	bool vertices_only = false; /* skip interior lattice points, jitter lift */
	IMat protected_normals;     /* outward normals of facets kept whole */
	std::uint64_t seed = 0;
};

/* Regular mixed subdivision of P from seeded lifts on the dilated summand
 * models. Points on a protected face stay flat at zero while every other
 * point hangs strictly below on a jittered paraboloid, so protected facets
 * survive as faces of the output cells. */
inline std::vector<VPolytope> sliced_cells(const VPolytope &p, const CellStructure &cs,
                                           const SlicedOptions &opt)
{
	const FieldPtr &F = p.F;
	size_t d = p.ambient_dim, r = cs.models.size();
	std::vector<std::vector<IVec>> cfg(r);
	for (size_t i = 0; i < r; i++) {
		VPolytope big = dilate(cs.models[i], Rat(opt.c));
		if (opt.vertices_only)
			for (auto &v : big.vertices)
				cfg[i].push_back(ivec_of(v));
		else
			cfg[i] = lattice_points(big);
	}
	std::vector<Vec<Rat>> h(r);
	for (size_t i = 0; i < r; i++) {
		size_t n = cfg[i].size();
		if (opt.vertices_only) {
			for (auto &q : cfg[i])
				h[i].push_back(Rat((long)(point_key(opt.seed, i, q) %
				                          (1ull << 30))) /
				               Rat(Int(1) << 30));
			continue;
		}
		std::vector<bool> flat(n, false);
		for (auto &nu : opt.protected_normals) {
			std::vector<Int> val(n, 0);
			Int best = 0;
			for (size_t k = 0; k < n; k++) {
				for (size_t j = 0; j < d; j++)
					val[k] += nu[j] * cfg[i][k][j];
				if (k == 0 || val[k] > best)
					best = val[k];
			}
			for (size_t k = 0; k < n; k++)
				if (val[k] == best)
					flat[k] = true;
		}
		Vec<Rat> cen(d, Rat(0));
		for (auto &q : cfg[i])
			for (size_t j = 0; j < d; j++)
				cen[j] += Rat(q[j]);
		for (size_t j = 0; j < d; j++)
			cen[j] /= (long)n;
		Rat M(1);
		std::vector<Rat> dist2(n, Rat(0));
		for (size_t k = 0; k < n; k++) {
			for (size_t j = 0; j < d; j++) {
				Rat diff = Rat(cfg[i][k][j]) - cen[j];
				dist2[k] += diff * diff;
			}
			if (dist2[k] > M)
				M = dist2[k];
		}
		M += 1;
		for (size_t k = 0; k < n; k++) {
			if (flat[k]) {
				h[i].push_back(Rat(0));
				continue;
			}
			Rat jit = Rat((long)(point_key(opt.seed, i, cfg[i][k]) %
			                     (1ull << 20))) /
			          Rat(Int(1) << 48);
			h[i].push_back(Rat(-2) + dist2[k] / M + jit);
		}
	}

	/* lifted Cayley configuration in dimension d + r + 1 */
	std::vector<Point> lifted;
	std::vector<std::pair<size_t, size_t>> who;
	for (size_t i = 0; i < r; i++)
		for (size_t k = 0; k < cfg[i].size(); k++) {
			Point q = from_int_point(F, cfg[i][k]);
			for (size_t j = 0; j < r; j++)
				q.push_back(i == j ? F->one() : F->zero());
			q.push_back(F->from_rat(h[i][k]));
			lifted.push_back(q);
			who.push_back({i, k});
		}
	VPolytope L = hull(lifted);
	auto lf = lower_facet_ids(L);
	if (!lf)
		return {p};
	std::vector<VPolytope> out;
	for (size_t fi : *lf) {
		const Halfspace &hs = L.facets[fi];
		std::vector<std::vector<Point>> parts(r);
		for (size_t k = 0; k < lifted.size(); k++)
			if (sign(dot(hs.normal, lifted[k]) + hs.offset) == 0)
				parts[who[k].first].push_back(
				    from_int_point(F, cfg[who[k].first][who[k].second]));
		std::vector<VPolytope> pieces;
		for (size_t i = 0; i < r; i++) {
			if (parts[i].empty())
				throw std::logic_error("sliced_cells: empty summand part");
			pieces.push_back(dilate(hull(parts[i]), cs.gammas[i] / Rat(opt.c)));
		}
		VPolytope cell = translate(minkowski_sum(pieces), cs.t);
		if (cell.dim == d)
			out.push_back(cell);
	}
	return out;
}

} // namespace detail

/* ---------- index reduction on a Cayley configuration ---------- */

/* Dilate mutually co-compact lattice polysimplices by c, restrict the lattice
 * points of the dilates to the coset lattice refined by a class vector m of
 * maximal order, and triangulate the Cayley polytope regularly; every simplex
 * of the certified output has index strictly below the input index. */
inline std::pair<Int, Triangulation> reduce_index(const std::vector<VPolytope> &ps,
                                                  std::uint64_t seed = 0)
{
	if (ps.empty())
		throw std::invalid_argument("reduce_index: no summands");
	const FieldPtr &F = ps[0].F;
	size_t d = ps[0].ambient_dim, r = ps.size();
	long c = 1;
	for (auto &s : ps) {
		auto factors = is_polysimplex(s);
		if (!factors)
			throw std::invalid_argument("reduce_index: summand not a polysimplex");
		for (auto &f : *factors)
			c *= (long)f.dim + 1;
		for (auto &v : s.vertices)
			(void)ivec_of(v);
	}
	for (size_t i = 0; i < r; i++)
		for (size_t j = i + 1; j < r; j++)
			if (!minkowski_dominates(ps[i], ps[j]) ||
			    !minkowski_dominates(ps[j], ps[i]))
				throw std::invalid_argument("reduce_index: summands not co-compact");
	VPolytope P = minkowski_sum(ps);
	for (auto &s : ps)
		/* co-compact summands share the normal fan of the sum */
		if (s.vertices.size() != P.vertices.size())
			throw std::invalid_argument("reduce_index: summands not co-compact");
	if (P.dim != d)
		throw std::invalid_argument("reduce_index: dominator not full-dimensional");
	if (!is_polysimplex(P))
		throw std::invalid_argument("reduce_index: dominator not a polysimplex");
	if (is_polystable_cell(P))
		throw std::invalid_argument("reduce_index: dominator already polystable");
	for (size_t f = 0; f < P.facets.size(); f++) {
		std::vector<Point> fv;
		for (int v : P.facet_vertices[f])
			fv.push_back(P.vertices[v]);
		if (!is_polystable_cell(hull(fv)))
			throw std::invalid_argument("reduce_index: facet not polystable");
	}

	/* edge lattice of the summands and the Cayley index N */
	IMat lat, rows;
	std::vector<IVec> bases;
	for (size_t i = 0; i < r; i++) {
		bases.push_back(ivec_of(ps[i].vertices[0]));
		for (auto &v : ps[i].vertices) {
			IVec diff = ivec_of(v);
			bool zero = true;
			for (size_t j = 0; j < d; j++) {
				diff[j] -= bases[i][j];
				if (diff[j] != 0)
					zero = false;
			}
			if (zero)
				continue;
			lat.push_back(diff);
			IVec row = diff;
			for (size_t j = 1; j < r; j++)
				row.push_back(0);
			rows.push_back(row);
		}
	}
	for (size_t j = 1; j < r; j++) {
		IVec row(d + r - 1, 0);
		row[d + j - 1] = 1;
		rows.push_back(row);
	}
	auto Nopt = lattice_index(rows, d + r - 1, true);
	if (!Nopt || *Nopt <= 1)
		throw std::invalid_argument("reduce_index: index already one");
	Int N = *Nopt;

	/* class vector m of maximal invariant order */
	Snf s = snf(lat);
	size_t cols = d;
	size_t jj = cols;
	for (size_t i = 0; i < s.d.size() && i < cols; i++)
		if (s.d[i][i] > 1)
			jj = i;
	if (jj == cols)
		throw std::logic_error("reduce_index: no nontrivial invariant factor");
	auto vinv = inverse(to_rat_mat(s.v), Rat(0), Rat(1));
	if (!vinv)
		throw std::logic_error("reduce_index: singular Smith transform");
	IVec m;
	for (size_t k = 0; k < cols; k++)
		m.push_back((*vinv)[jj][k].get_num());

	IMat gen = lat;
	gen.push_back(m);
	IMat H = hnf(gen);
	Mat<Rat> Ht = transpose(to_rat_mat(H));
	auto in_refined = [&](const IVec &y) {
		Vec<Rat> b;
		for (auto &x : y)
			b.push_back(Rat(x));
		auto sol = solve(Ht, b, Rat(0));
		if (!sol)
			return false;
		for (auto &q : *sol)
			if (q.get_den() != 1)
				return false;
		return true;
	};

	/* coset-restricted configurations of the dilates */
	std::vector<std::vector<IVec>> cfg(r);
	std::vector<VPolytope> dilated;
	for (size_t i = 0; i < r; i++) {
		dilated.push_back(dilate(ps[i], Rat(c)));
		for (auto &q : lattice_points(dilated[i])) {
			IVec diff = q;
			for (size_t j = 0; j < d; j++)
				diff[j] -= c * bases[i][j];
			if (in_refined(diff))
				cfg[i].push_back(q);
		}
	}
	Scalar target = volume(cayley(dilated).poly);

	for (int attempt = 0; attempt < 32; attempt++) {
		std::uint64_t sd = seed + 0x9e37ull * (std::uint64_t)attempt;
		std::vector<Point> lifted;
		std::vector<Point> cay;
		std::vector<std::pair<size_t, size_t>> who;
		Lift used;
		for (size_t i = 0; i < r; i++) {
			Vec<Rat> cen(d, Rat(0));
			for (auto &q : cfg[i])
				for (size_t j = 0; j < d; j++)
					cen[j] += Rat(q[j]);
			for (size_t j = 0; j < d; j++)
				cen[j] /= (long)cfg[i].size();
			for (auto &q : cfg[i]) {
				Rat dist2(0);
				for (size_t j = 0; j < d; j++) {
					Rat diff = Rat(q[j]) - cen[j];
					dist2 += diff * diff;
				}
				Rat jit = Rat((long)(detail::point_key(sd, i, q) %
				                     (1ull << 20))) /
				          Rat(Int(1) << 48);
				Point e = cayley_embed(from_int_point(F, q), i, r);
				Point l = e;
				l.push_back(F->from_rat(dist2 + jit));
				cay.push_back(e);
				lifted.push_back(l);
				used.set(e, dist2 + jit);
				who.push_back({i, cay.size() - 1});
			}
		}
		VPolytope L = hull(lifted);
		auto lf = detail::lower_facet_ids(L);
		if (!lf)
			continue;
		Triangulation tri;
		tri.F = F;
		std::map<std::vector<Rat>, int> pid;
		auto point_id = [&](const Point &q) {
			std::vector<Rat> key;
			for (auto &x : q)
				key.push_back(to_rat(x));
			auto it = pid.find(key);
			if (it != pid.end())
				return it->second;
			tri.points.push_back(q);
			pid[key] = (int)tri.points.size() - 1;
			return (int)tri.points.size() - 1;
		};
		bool ok = true;
		Scalar total = F->zero();
		tri.max_index = 1;
		for (size_t fi : *lf) {
			const Halfspace &hs = L.facets[fi];
			std::vector<int> ids;
			std::vector<IVec> verts;
			std::vector<Point> pts;
			for (size_t k = 0; k < lifted.size(); k++)
				if (sign(dot(hs.normal, lifted[k]) + hs.offset) == 0) {
					ids.push_back(point_id(cay[k]));
					verts.push_back(ivec_of(cay[k]));
					pts.push_back(cay[k]);
				}
			if (ids.size() != d + r) {
				ok = false;
				break;
			}
			Int ix = simplex_index(verts);
			if (ix >= N) {
				ok = false;
				break;
			}
			VPolytope S = hull(pts);
			if (S.dim != d + r - 1) {
				ok = false;
				break;
			}
			total += volume(S);
			std::sort(ids.begin(), ids.end());
			tri.cells.push_back(ids);
			tri.indices.push_back(ix);
			if (ix > tri.max_index)
				tri.max_index = ix;
		}
		if (!ok || sign(total - target) != 0)
			continue;
		tri.lift = used;
		return {Int(c), tri};
	}
	throw std::logic_error("reduce_index: no certified triangulation found");
}

/* ---------- in-complex refinement ---------- */

inline PolyComplex polysimplicial_subdivide(const VPolytope &p, std::uint64_t seed = 0)
{
	PolyComplex single(p.F);
	single.add_cell(p);
	if (p.dim <= 1 || is_polysimplex(p))
		return single;
	if (!is_zv_polytope(p))
		throw std::invalid_argument("polysimplicial_subdivide: not a (Z,V)-polytope");
	detail::CellStructure cs = detail::cell_structure(p, std::nullopt, std::nullopt);
	for (int attempt = 0; attempt < 64; attempt++) {
		detail::SlicedOptions opt;
		opt.vertices_only = true;
		opt.seed = seed + 0x9e37ull * (std::uint64_t)attempt;
		auto cells = detail::sliced_cells(p, cs, opt);
		bool ok = !cells.empty();
		for (auto &c : cells)
			if (!is_polysimplex(c))
				ok = false;
		if (!ok)
			continue;
		PolyComplex out = complex_of(cells, p.F);
		if (!validate(out).ok() || !refines(out, single))
			continue;
		return out;
	}
	throw std::logic_error("polysimplicial_subdivide: no generic slicing found");
}

/* Replace cell ci by a certified refinement of strictly smaller index; the
 * facets shared with the rest of the complex are protected, so the ambient
 * complex stays valid. Returns the model dilation used and the new complex. */
inline std::pair<Int, PolyComplex> reduce_index_in_complex(const PolyComplex &x,
                                                           size_t ci,
                                                           std::uint64_t seed = 0)
{
	const VPolytope &CF = x.cell_polytope(ci);
	if (is_polystable_cell(CF))
		return {1, x};
	Int base_index = cell_index(CF);
	IMat prot;
	for (size_t f = 0; f < CF.facets.size(); f++) {
		bool shared = false;
		for (size_t cj = 0; cj < x.cells.size() && !shared; cj++) {
			if (cj == ci)
				continue;
			const VPolytope &O = x.cell_polytope(cj);
			bool all = true;
			for (int v : CF.facet_vertices[f])
				if (!O.contains(CF.vertices[v]))
					all = false;
			shared = all;
		}
		if (!shared)
			continue;
		if (!CF.facets[f].int_normal)
			throw std::invalid_argument("reduce_index_in_complex: irrational facet");
		IVec outward;
		for (auto &y : *CF.facets[f].int_normal)
			outward.push_back(-y);
		prot.push_back(outward);
	}
	detail::CellStructure cs =
	    detail::cell_structure(CF, std::nullopt, std::nullopt);
	long c0 = 1;
	if (auto factors = is_polysimplex(CF))
		for (auto &f : *factors)
			c0 *= (long)f.dim + 1;
	std::vector<long> cands{1, 2, c0};
	std::sort(cands.begin(), cands.end());
	cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
	for (long c : cands)
		for (int attempt = 0; attempt < 24; attempt++) {
			detail::SlicedOptions opt;
			opt.c = c;
			opt.protected_normals = prot;
			opt.seed = seed + 0x9e37ull * (std::uint64_t)attempt;
			std::vector<VPolytope> cells;
			try {
				cells = detail::sliced_cells(CF, cs, opt);
			} catch (const std::logic_error &) {
				continue;
			}
			if (cells.size() < 2)
				continue;
			bool ok = true;
			for (auto &cp : cells) {
				auto fac = is_polysimplex(cp);
				if (!fac || cell_index(cp) >= base_index) {
					ok = false;
					break;
				}
			}
			if (!ok)
				continue;
			PolyComplex nx(x.F);
			for (size_t cj = 0; cj < x.cells.size(); cj++) {
				if (cj == ci)
					continue;
				nx.add_cell(x.cell_polytope(cj), x.cells[cj].label);
			}
			for (auto &cp : cells)
				nx.add_cell(cp);
			if (!validate(nx).ok() || !refines(nx, x))
				continue;
			return {Int(c), nx};
		}
	throw std::logic_error("reduce_index_in_complex: no certified refinement");
}

struct BudgetExhausted : std::runtime_error {
	PolyComplex best;
	Int max_index;
	BudgetExhausted(PolyComplex b, Int m)
	    : std::runtime_error("polystable sweep budget exhausted"),
	      best(std::move(b)), max_index(std::move(m))
	{
	}
};

namespace detail {

inline PolyComplex sweep_to_polystable(PolyComplex x, std::uint64_t seed, int max_sweeps)
{
	for (int sweep = 0; sweep < max_sweeps; sweep++) {
		std::optional<size_t> bad;
		for (size_t ci : x.top_cells())
			if (!is_polystable_cell(x.cell_polytope(ci))) {
				bad = ci;
				break;
			}
		if (!bad)
			return x;
		x = reduce_index_in_complex(x, *bad, seed + 131 * (std::uint64_t)(sweep + 1))
		        .second;
	}
	Int mx = 1;
	for (size_t ci : x.top_cells())
		if (!is_polystable_cell(x.cell_polytope(ci)))
			try {
				Int ix = cell_index(x.cell_polytope(ci));
				if (ix > mx)
					mx = ix;
			} catch (const std::invalid_argument &) {
			}
	throw BudgetExhausted(std::move(x), mx);
}

} // namespace detail

inline PolyComplex polystable_subdivide(const VPolytope &p, std::uint64_t seed = 0,
                                        int max_sweeps = 32)
{
	PolyComplex single(p.F);
	single.add_cell(p);
	if (p.dim <= 1 || is_polystable_cell(p))
		return single;
	PolyComplex x = polysimplicial_subdivide(p, seed);
	return detail::sweep_to_polystable(std::move(x), seed, max_sweeps);
}

/* Refine every top cell of a valid complex to polystable cells. All cells
 * share one positive basis and one set of model scales; anchored models plus
 * lifts keyed on absolute model points make the per-cell subdivisions agree
 * on shared facets. */
inline PolyComplex polystable_refine_complex(const PolyComplex &x, std::uint64_t seed = 0,
                                             int max_sweeps = 32)
{
	auto tops = x.top_cells();
	bool all_ok = true;
	for (size_t ci : tops)
		if (!is_polystable_cell(x.cell_polytope(ci)))
			all_ok = false;
	if (all_ok)
		return x;
	/* Cells that are translates of a common prototype can reuse one
	 * subdivision: model cuts are global hyperplanes in the cell frame, so
	 * opposite-facet traces match and translated copies glue. The checks
	 * below certify the result; the symmetry is only a search heuristic. */
	{
		std::vector<VPolytope> shapes;
		std::vector<PolyComplex> subs;
		PolyComplex nx(x.F);
		bool built = true;
		for (size_t ci : tops) {
			VPolytope cp = x.cell_polytope(ci);
			const PolyComplex *sub = nullptr;
			Point shift(cp.ambient_dim, x.F->zero());
			for (size_t s = 0; s < shapes.size() && !sub; s++) {
				if (shapes[s].vertices.size() != cp.vertices.size())
					continue;
				Point d = cp.vertices[0] - shapes[s].vertices[0];
				if (polytope_eq(translate(shapes[s], d), cp)) {
					sub = &subs[s];
					shift = d;
				}
			}
			if (!sub) {
				try {
					subs.push_back(polystable_subdivide(cp, seed, max_sweeps));
				} catch (const std::exception &) {
					built = false;
					break;
				}
				shapes.push_back(cp);
				sub = &subs.back();
			}
			for (size_t sj : sub->top_cells())
				nx.add_cell(translate(sub->cell_polytope(sj), shift));
		}
		if (built && validate(nx).ok() && refines(nx, x)) {
			bool ps = true;
			for (size_t cj : nx.top_cells())
				if (!is_polystable_cell(nx.cell_polytope(cj)))
					ps = false;
			if (ps)
				return nx;
		}
	}
	/* If every top cell is already a polysimplex, keep the cells whole and
	 * reduce indices in place. Slicing first can create protected facets of
	 * lattice length > 1 whose cells can never reach index 1. */
	bool all_ps = true;
	for (size_t ci : tops)
		if (!is_polysimplex(x.cell_polytope(ci)))
			all_ps = false;
	if (all_ps) {
		std::optional<BudgetExhausted> worst;
		for (int attempt = 0; attempt < 8; attempt++)
			try {
				return detail::sweep_to_polystable(
				    x, seed + 0x51edull * (std::uint64_t)attempt, max_sweeps);
			} catch (const BudgetExhausted &e) {
				worst = e;
			} catch (const std::logic_error &) {
			}
		if (worst)
			throw *worst;
		throw std::logic_error("polystable_refine_complex: no compatible refinement");
	}
	const FieldPtr &F = x.F;
	Vec<Scalar> lengths;
	for (size_t ci : tops)
		for (auto &e : edge_data(x.cell_polytope(ci)))
			lengths.push_back(e.ell0);
	if (lengths.empty())
		lengths.push_back(F->one());
	Vec<Scalar> betas = detail::small_positive_basis(lengths);
	size_t r = betas.size();
	Vec<Rat> deltas(r, Rat(0));
	for (size_t ci : tops) {
		detail::CellStructure cs =
		    detail::cell_structure(x.cell_polytope(ci), betas, std::nullopt);
		for (size_t i = 0; i < r; i++)
			deltas[i] = detail::rat_gcd(deltas[i], cs.deltas[i]);
	}
	std::vector<detail::CellStructure> css;
	for (size_t ci : tops)
		css.push_back(detail::cell_structure(x.cell_polytope(ci), betas, deltas));

	for (int attempt = 0; attempt < 32; attempt++) {
		std::uint64_t sd = seed + 0x9e37ull * (std::uint64_t)attempt;
		PolyComplex nx(F);
		bool ok = true;
		for (size_t k = 0; k < tops.size() && ok; k++) {
			detail::SlicedOptions opt;
			opt.vertices_only = true;
			opt.seed = sd;
			std::vector<VPolytope> cells;
			try {
				cells = detail::sliced_cells(x.cell_polytope(tops[k]),
				                             css[k], opt);
			} catch (const std::logic_error &) {
				ok = false;
				break;
			}
			for (auto &cp : cells) {
				if (!is_polysimplex(cp)) {
					ok = false;
					break;
				}
				nx.add_cell(cp);
			}
		}
		if (!ok || !validate(nx).ok() || !refines(nx, x))
			continue;
		try {
			return detail::sweep_to_polystable(std::move(nx), sd + 1, max_sweeps);
		} catch (const std::logic_error &) {
			continue;
		}
	}
	throw std::logic_error("polystable_refine_complex: no compatible refinement");
}

/* ---------- scalar lifts and regular refinements ---------- */

struct ScalarLift {
	std::vector<Point> pts;
	Vec<Scalar> vals;

	void set(const Point &p, Scalar v)
	{
		for (size_t i = 0; i < pts.size(); i++)
			if (point_eq(pts[i], p)) {
				vals[i] = std::move(v);
				return;
			}
		pts.push_back(p);
		vals.push_back(std::move(v));
	}
	std::optional<Scalar> find(const Point &p) const
	{
		for (size_t i = 0; i < pts.size(); i++)
			if (point_eq(pts[i], p))
				return vals[i];
		return std::nullopt;
	}
	Scalar at(const Point &p) const
	{
		auto v = find(p);
		if (!v)
			throw std::invalid_argument("lift value missing");
		return *v;
	}
};

inline bool is_induced_by(const PolyComplex &x, const ScalarLift &f)
{
	for (size_t ci : x.top_cells()) {
		const VPolytope &C = x.cell_polytope(ci);
		std::vector<int> basis = detail::affine_basis(C);
		std::vector<Point> bpts;
		Vec<Scalar> bvals;
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
		for (auto &v : C.vertices) {
			auto fv = f.find(v);
			auto lv = ell(v);
			if (!fv || !lv || sign(*lv - *fv) != 0)
				return false;
		}
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
				continue;
			int s = sign(f.vals[j] - *lv);
			if (C.contains(w) ? s < 0 : s <= 0)
				return false;
		}
	}
	return true;
}

/* Convex piecewise linear lift with values in V inducing the complex and
 * keeping every lifted cell edge on a rational direction: each edge gets a
 * rational slope unknown against its primitive direction, the V-components of
 * the lift are rational unknowns, and a feasible point of the resulting exact
 * LP is rounded and certified. */
inline std::optional<ScalarLift> find_zv_inducing_lift(const PolyComplex &x)
{
	const FieldPtr &F = x.F;
	size_t m = x.points.size();
	size_t r = F->vdim();
	size_t fb = F->zero().c.size();

	auto global_id = [&](const VPolytope &C, int local) {
		for (size_t i = 0; i < m; i++)
			if (point_eq(x.points[i], C.vertices[local]))
				return (int)i;
		throw std::logic_error("cell vertex missing from point store");
	};

	/* undirected edges of the top cells with their length coordinates */
	std::map<std::pair<int, int>, size_t> edge_id;
	std::vector<Vec<Rat>> edge_c;
	for (size_t ci : x.top_cells()) {
		const VPolytope &C = x.cell_polytope(ci);
		for (auto &e : C.edges()) {
			if (e.size() != 2)
				continue;
			int u = global_id(C, e[0]), v = global_id(C, e[1]);
			std::pair<int, int> key{std::min(u, v), std::max(u, v)};
			if (edge_id.count(key))
				continue;
			Point diff = x.points[key.second] - x.points[key.first];
			auto dvec = rational_direction(diff);
			if (!dvec)
				return std::nullopt;
			size_t lead = 0;
			while ((*dvec)[lead] == 0)
				lead++;
			Scalar ell0 = diff[lead] / Rat((*dvec)[lead]);
			auto cc = F->v_coords(ell0);
			if (!cc)
				return std::nullopt;
			edge_id[key] = edge_c.size();
			edge_c.push_back(*cc);
		}
	}
	size_t nE = edge_c.size();
	size_t nu = r * m + nE; /* unknowns: f_i(p), then one slope per edge */

	Mat<Rat> eq;
	Mat<Scalar> strict;
	/* edge rows: f_i(v) - f_i(u) = c_i(e) q_e */
	for (auto &[key, eid] : edge_id)
		for (size_t i = 0; i < r; i++) {
			Vec<Rat> row(nu, Rat(0));
			row[i * m + key.second] += 1;
			row[i * m + key.first] -= 1;
			row[r * m + eid] -= edge_c[eid][i];
			eq.push_back(row);
		}
	for (size_t ci : x.top_cells()) {
		const VPolytope &C = x.cell_polytope(ci);
		std::vector<int> basis = detail::affine_basis(C);
		std::vector<Point> bpts;
		std::vector<int> bids;
		for (int b : basis) {
			bpts.push_back(C.vertices[b]);
			bids.push_back(global_id(C, b));
		}
		/* componentwise flatness of non-basis vertices */
		for (size_t vi = 0; vi < C.vertices.size(); vi++) {
			if (std::find(basis.begin(), basis.end(), (int)vi) != basis.end())
				continue;
			auto mu = detail::affine_combination(bpts, C.vertices[vi]);
			if (!mu)
				throw std::logic_error("cell vertex outside its affine span");
			int gid = global_id(C, (int)vi);
			for (size_t i = 0; i < r; i++)
				for (size_t t = 0; t < fb; t++) {
					Vec<Rat> row(nu, Rat(0));
					for (size_t j = 0; j < bpts.size(); j++)
						row[i * m + bids[j]] += (*mu)[j].c[t];
					if (t == 0)
						row[i * m + gid] -= 1;
					bool zero = true;
					for (auto &q : row)
						if (sgn(q) != 0)
							zero = false;
					if (!zero)
						eq.push_back(row);
				}
		}
		/* strictness of the full lift at points outside the cell */
		for (size_t w = 0; w < m; w++) {
			if (C.contains(x.points[w]))
				continue;
			auto mu = detail::affine_combination(bpts, x.points[w]);
			if (!mu)
				continue;
			Vec<Scalar> row(nu, F->zero());
			for (size_t i = 0; i < r; i++) {
				row[i * m + w] = F->v_scalar(i);
				for (size_t j = 0; j < bpts.size(); j++)
					row[i * m + bids[j]] =
					    row[i * m + bids[j]] - F->v_scalar(i) * (*mu)[j];
			}
			strict.push_back(row);
		}
	}

	Mat<Rat> N;
	if (eq.empty()) {
		N = mat_identity<Rat>(nu, Rat(0), Rat(1));
	} else {
		Mat<Rat> basis_rows = nullspace(eq, nu, Rat(0), Rat(1));
		N.assign(nu, Vec<Rat>(basis_rows.size(), Rat(0)));
		for (size_t k = 0; k < basis_rows.size(); k++)
			for (size_t i = 0; i < nu; i++)
				N[i][k] = basis_rows[k][i];
	}
	size_t nz = N.empty() ? 0 : N[0].size();

	auto lift_of = [&](const Vec<Rat> &fvals) {
		ScalarLift f;
		for (size_t p = 0; p < m; p++) {
			Vec<Rat> comps;
			for (size_t i = 0; i < r; i++)
				comps.push_back(fvals[i * m + p]);
			f.set(x.points[p], F->from_v_coords(comps));
		}
		return f;
	};
	auto certify = [&](const ScalarLift &f) {
		if (!is_induced_by(x, f))
			return false;
		for (size_t ci : x.top_cells()) {
			const VPolytope &C = x.cell_polytope(ci);
			for (auto &e : C.edges()) {
				if (e.size() != 2)
					continue;
				Point l = C.vertices[e[1]] - C.vertices[e[0]];
				l.push_back(f.at(C.vertices[e[1]]) - f.at(C.vertices[e[0]]));
				if (!rational_direction(l))
					return false;
			}
		}
		return true;
	};

	if (strict.empty()) {
		ScalarLift f = lift_of(Vec<Rat>(nu, Rat(0)));
		return certify(f) ? std::optional<ScalarLift>(f) : std::nullopt;
	}
	if (nz == 0)
		return std::nullopt;
	Mat<Scalar> A;
	Vec<Scalar> b;
	for (auto &row : strict) {
		Vec<Scalar> az(nz, F->zero());
		for (size_t i = 0; i < nu; i++)
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
		Vec<Rat> fvals(nu, Rat(0));
		for (size_t i = 0; i < nu; i++)
			for (size_t k = 0; k < nz; k++)
				fvals[i] += N[i][k] * zq[k];
		ScalarLift f = lift_of(fvals);
		if (certify(f))
			return f;
	}
	throw std::logic_error("find_zv_inducing_lift: rounding failed to certify");
}

inline std::pair<PolyComplex, ScalarLift>
regular_polystable_refinement(const PolyComplex &x, std::uint64_t seed = 0)
{
	for (int attempt = 0; attempt < 8; attempt++) {
		PolyComplex rx = polystable_refine_complex(x, seed + 977 * (std::uint64_t)attempt);
		auto f = find_zv_inducing_lift(rx);
		if (f)
			return {rx, *f};
	}
	throw std::logic_error("regular_polystable_refinement: no inducing lift found");
}

/* Polystable refinements X', Y' of the source and target of m with m still
 * polyhedral from X' to Y': the target is refined first and the source cells
 * are clipped along the preimages of the refined target cells. */
inline std::pair<PolyComplex, PolyComplex> subdivide_along_map(const PolyMap &m,
                                                               std::uint64_t seed = 0)
{
	const PolyComplex &X = *m.source;
	const FieldPtr &F = X.F;
	PolyComplex Yp = regular_polystable_refinement(*m.target, seed).first;
	size_t dx = X.points.empty() ? 0 : X.points[0].size();
	PolyComplex pieces(F);
	for (size_t ci : X.top_cells()) {
		const VPolytope &D = X.cell_polytope(ci);
		for (size_t cj : Yp.top_cells()) {
			const VPolytope &C = Yp.cell_polytope(cj);
			VPolytope cur = D;
			bool alive = true;
			for (auto &h : C.facets) {
				/* pull back nu . y + o >= 0 along y = A x + v */
				Point n(dx, F->zero());
				for (size_t k = 0; k < h.normal.size(); k++)
					for (size_t j = 0; j < dx; j++)
						n[j] += m.A[k][j] * h.normal[k];
				Scalar off = dot(h.normal, m.v) + h.offset;
				auto parts = split_by_hyperplane(cur, n, off);
				bool found = false;
				for (auto &part : parts)
					if (sign(dot(n, part.centroid()) + off) >= 0) {
						cur = part;
						found = true;
						break;
					}
				if (!found) {
					alive = false;
					break;
				}
			}
			if (alive && cur.dim == D.dim)
				pieces.add_cell(cur);
		}
	}
	if (!validate(pieces).ok() || !refines(pieces, X))
		throw std::logic_error("subdivide_along_map: clipping failed");
	PolyComplex Xp = regular_polystable_refinement(pieces, seed + 1).first;
	PolyMap check{m.A, m.v, &Xp, &Yp};
	if (!is_polyhedral_map(check))
		throw std::logic_error("subdivide_along_map: map not polyhedral on output");
	return {Xp, Yp};
}

/* True when every edge length is a rational multiple of the first one, i.e.
 * the polytope is a dilate of a rational polytope and admits a triangulation
 * with rational vertices. */
inline bool rational_triangulation_obstruction(const VPolytope &p)
{
	auto ed = edge_data(p);
	if (ed.empty())
		return true;
	for (auto &e : ed)
		if (!is_rational(e.ell0 / ed[0].ell0))
			return false;
	return true;
}

} // namespace zv
