/* SPDX-License-Identifier: Apache-2.0 */

#include <zv/cayley.hpp>

#include "helpers.hpp"

#include <catch_amalgamated.hpp>

using namespace zv;
using zvt::pt;

namespace {

VPolytope unit_square(const FieldPtr &f)
{
	return hull({pt(f, {0, 0}), pt(f, {1, 0}), pt(f, {0, 1}), pt(f, {1, 1})});
}

VPolytope seg1(const FieldPtr &f, const Scalar &a, const Scalar &b)
{
	return hull({Point{a}, Point{b}});
}

VPolytope iseg1(const FieldPtr &f, long a, long b)
{
	return hull({pt(f, {a}), pt(f, {b})});
}

} // namespace

TEST_CASE("cayley polytope basics", "[cayley]")
{
	auto f = zvt::qq();
	VPolytope sq = unit_square(f);

	/* r = 1: the Cayley polytope is P x {1} */
	CayleyPolytope c1 = cayley({sq});
	CHECK(c1.poly.ambient_dim == 3);
	CHECK(c1.poly.dim == 2);
	CHECK(c1.poly.vertices.size() == 4);
	for (auto &v : c1.poly.vertices)
		CHECK(sign(v[2] - f->one()) == 0);

	/* two unit squares: 8 vertices, dimension d + r - 1 = 3 in R^4 */
	CayleyPolytope c2 = cayley({sq, sq});
	CHECK(c2.poly.ambient_dim == 4);
	CHECK(c2.poly.dim == 3);
	CHECK(c2.poly.vertices.size() == 8);

	/* the two tilted-rectangle decomposition segments */
	VPolytope s1 = hull({pt(f, {0, 0}), pt(f, {2, 1})});
	VPolytope s2 = hull({pt(f, {0, 0}), pt(f, {-1, 2})});
	CayleyPolytope c3 = cayley({s1, s2});
	CHECK(c3.poly.vertices.size() == 4);
	CHECK(c3.poly.dim == 3);

	CHECK_THROWS_AS(cayley({}), std::invalid_argument);
	CHECK_THROWS_AS(cayley({sq, iseg1(f, 0, 1)}), std::invalid_argument);
}

TEST_CASE("slice recovers weighted Minkowski sums", "[cayley]")
{
	auto f = zvt::qq();
	VPolytope sq = unit_square(f);
	VPolytope tri = hull({pt(f, {0, 0}), pt(f, {2, 0}), pt(f, {0, 2})});
	CayleyPolytope c = cayley({sq, tri});

	/* lambda = e_1 gives back the first summand */
	CHECK(polytope_eq(slice(c, {Rat(1), Rat(0)}), sq));
	CHECK(polytope_eq(slice(c, {Rat(0), Rat(1)}), tri));

	auto weighted = [&](const std::vector<VPolytope> &ps, const Vec<Rat> &lam) {
		std::vector<VPolytope> parts;
		for (size_t i = 0; i < ps.size(); i++)
			parts.push_back(dilate(ps[i], lam[i]));
		return minkowski_sum(parts);
	};
	CHECK(polytope_eq(slice(c, {Rat(1, 2), Rat(1, 2)}),
	                  weighted({sq, tri}, {Rat(1, 2), Rat(1, 2)})));
	CHECK(polytope_eq(slice(c, {Rat(1, 3), Rat(2, 3)}),
	                  weighted({sq, tri}, {Rat(1, 3), Rat(2, 3)})));

	CHECK_THROWS_AS(slice(c, {Rat(1, 2), Rat(1, 4)}), std::invalid_argument);
	CHECK_THROWS_AS(slice(c, {Rat(3, 2), Rat(-1, 2)}), std::invalid_argument);

	/* randomized agreement over a three-summand family */
	auto f2 = zvt::q2();
	std::vector<VPolytope> segs{iseg1(f2, 0, 1), iseg1(f2, 0, 2),
	                            seg1(f2, f2->zero(), f2->sqrt_of(2))};
	CayleyPolytope c3 = cayley(segs);
	Rng rng(7);
	for (int it = 0; it < 50; it++) {
		long a = rng.range(0, 8), b = rng.range(0, 8), d = rng.range(0, 8);
		long tot = a + b + d;
		if (tot == 0)
			continue;
		Vec<Rat> lam{Rat(a) / tot, Rat(b) / tot, Rat(d) / tot};
		CHECK(polytope_eq(slice(c3, lam), weighted(segs, lam)));
	}
}

TEST_CASE("regular subdivisions of a segment", "[cayley]")
{
	auto f = zvt::qq();
	VPolytope p = iseg1(f, 0, 2);
	std::vector<Point> s{pt(f, {0}), pt(f, {1}), pt(f, {2})};

	Lift zero;
	for (auto &q : s)
		zero.set(q, Rat(0));
	PolyComplex triv = regular_subdivision(p, s, zero);
	REQUIRE(triv.cells.size() == 1);
	CHECK(triv.cells[0].label == "0,1,2");
	CHECK(validate(triv).ok());

	/* pulling the right endpoint up splits at the midpoint */
	Lift up;
	up.set(s[0], Rat(0));
	up.set(s[1], Rat(0));
	up.set(s[2], Rat(1));
	PolyComplex split = regular_subdivision(p, s, up);
	REQUIRE(split.cells.size() == 2);
	CHECK(validate(split).ok());
	PolyComplex whole(f);
	whole.add_cell(p);
	CHECK(refines(split, whole));

	/* a lift dipping in the middle keeps a single cell without the midpoint */
	Lift bridge;
	bridge.set(s[0], Rat(0));
	bridge.set(s[1], Rat(1));
	bridge.set(s[2], Rat(0));
	PolyComplex single = regular_subdivision(p, s, bridge);
	REQUIRE(single.cells.size() == 1);
	CHECK(single.cells[0].label == "0,2");
}

TEST_CASE("regular subdivision of a square", "[cayley]")
{
	auto f = zvt::qq();
	VPolytope sq = unit_square(f);
	std::vector<Point> s = sq.vertices;
	Lift lf;
	for (auto &v : s)
		lf.set(v, Rat(0));
	lf.set(pt(f, {1, 1}), Rat(1));
	PolyComplex x = regular_subdivision(sq, s, lf);
	REQUIRE(x.cells.size() == 2);
	CHECK(validate(x).ok());
	PolyComplex whole(f);
	whole.add_cell(sq);
	CHECK(refines(x, whole));
	CHECK(is_induced_by(x, lf));
}

TEST_CASE("is_induced_by", "[cayley]")
{
	auto f = zvt::qq();
	PolyComplex whole(f);
	whole.add_cell(iseg1(f, 0, 2));
	PolyComplex halves(f);
	halves.add_cell(iseg1(f, 0, 1));
	halves.add_cell(iseg1(f, 1, 2));

	Lift zero;
	zero.set(pt(f, {0}), Rat(0));
	zero.set(pt(f, {1}), Rat(0));
	zero.set(pt(f, {2}), Rat(0));
	CHECK(is_induced_by(whole, zero));
	CHECK(!is_induced_by(halves, zero));

	Lift bend;
	bend.set(pt(f, {0}), Rat(0));
	bend.set(pt(f, {1}), Rat(0));
	bend.set(pt(f, {2}), Rat(1));
	CHECK(is_induced_by(halves, bend));
	CHECK(!is_induced_by(whole, bend));

	/* missing values make nothing induced */
	Lift partial;
	partial.set(pt(f, {0}), Rat(0));
	CHECK(!is_induced_by(whole, partial));
}

TEST_CASE("find_inducing_lift on regular subdivisions", "[cayley]")
{
	auto f = zvt::qq();
	PolyComplex halves(f);
	halves.add_cell(iseg1(f, 0, 1));
	halves.add_cell(iseg1(f, 1, 2));
	auto lf = find_inducing_lift(halves);
	REQUIRE(lf.has_value());
	CHECK(is_induced_by(halves, *lf));

	/* round trip through regular_subdivision */
	std::vector<Point> s{pt(f, {0}), pt(f, {1}), pt(f, {2})};
	PolyComplex again = regular_subdivision(iseg1(f, 0, 2), s, *lf);
	CHECK(refines(again, halves));
	CHECK(refines(halves, again));

	/* trivial complexes always admit the zero lift */
	PolyComplex whole(f);
	whole.add_cell(iseg1(f, 0, 2));
	auto lw = find_inducing_lift(whole);
	REQUIRE(lw.has_value());
	CHECK(is_induced_by(whole, *lw));

	/* diagonally cut square */
	VPolytope t1 = hull({pt(f, {0, 0}), pt(f, {1, 0}), pt(f, {1, 1})});
	VPolytope t2 = hull({pt(f, {0, 0}), pt(f, {0, 1}), pt(f, {1, 1})});
	PolyComplex tris = complex_of({t1, t2}, f);
	auto lt = find_inducing_lift(tris);
	REQUIRE(lt.has_value());
	CHECK(is_induced_by(tris, *lt));
}

TEST_CASE("find_inducing_lift detects the non-regular whirl", "[cayley]")
{
	auto f = zvt::qq();
	Point A = pt(f, {0, 0}), B = pt(f, {4, 0}), C = pt(f, {0, 4});
	Point a = pt(f, {1, 1}), b = pt(f, {2, 1}), c = pt(f, {1, 2});

	/* the classic non-regular triangulation of two nested triangles */
	std::vector<VPolytope> cells{
	    hull({a, b, c}),
	    hull({A, B, b}), hull({A, b, a}),
	    hull({B, C, c}), hull({B, c, b}),
	    hull({C, A, a}), hull({C, a, c}),
	};
	PolyComplex whirl = complex_of(cells, f);
	REQUIRE(validate(whirl).ok());
	{
		Scalar total = f->zero();
		for (size_t i = 0; i < whirl.cells.size(); i++)
			total = total + volume(whirl.cell_polytope(i));
		CHECK(sign(total - volume(hull({A, B, C}))) == 0);
	}
	CHECK(!find_inducing_lift(whirl).has_value());

	/* a regular triangulation of the same six points is recognized */
	Lift pull;
	for (auto &q : {A, B, C})
		pull.set(q, Rat(2));
	for (auto &q : {a, b, c})
		pull.set(q, Rat(0));
	PolyComplex reg =
	    regular_subdivision(hull({A, B, C}), {A, B, C, a, b, c}, pull);
	REQUIRE(validate(reg).ok());
	auto lr = find_inducing_lift(reg);
	REQUIRE(lr.has_value());
	CHECK(is_induced_by(reg, *lr));
}

TEST_CASE("mixed subdivision of a doubled segment", "[cayley]")
{
	auto f = zvt::q2();
	Scalar a0 = f->zero(), a1 = f->sqrt_of(2);
	VPolytope seg = seg1(f, a0, a1);

	Lift f1, f2;
	f1.set(Point{a0}, Rat(0));
	f1.set(Point{a1}, Rat(1));
	f2.set(Point{a0}, Rat(1));
	f2.set(Point{a1}, Rat(0));
	MixedSubdivision ms = mixed_subdivision({seg, seg}, {f1, f2});
	REQUIRE(ms.complex.cells.size() == 2);
	CHECK(ms.fine);
	CHECK(validate(ms.complex).ok());
	PolyComplex whole(f);
	whole.add_cell(seg1(f, a0 + a0, a1 + a1));
	CHECK(refines(ms.complex, whole));
	/* each cell is the Minkowski sum of the faces in its label */
	for (size_t i = 0; i < ms.labels.size(); i++) {
		std::vector<VPolytope> parts;
		const std::vector<VPolytope> ps{seg, seg};
		for (size_t j = 0; j < 2; j++) {
			std::vector<Point> pv;
			for (int id : ms.labels[i].parts[j])
				pv.push_back(ps[j].vertices[id]);
			parts.push_back(hull(pv));
		}
		CHECK(polytope_eq(ms.complex.cell_polytope(i), minkowski_sum(parts)));
	}

	/* zero lifts give the trivial, non-fine subdivision */
	Lift z1, z2;
	z1.set(Point{a0}, Rat(0));
	z1.set(Point{a1}, Rat(0));
	z2 = z1;
	MixedSubdivision triv = mixed_subdivision({seg, seg}, {z1, z2});
	REQUIRE(triv.complex.cells.size() == 1);
	CHECK(!triv.fine);
	CHECK(polytope_eq(triv.complex.cell_polytope(0), seg1(f, a0 + a0, a1 + a1)));

	/* orthogonal segments: the trivial subdivision is already fine */
	auto fq = zvt::qq();
	VPolytope e1 = hull({pt(fq, {0, 0}), pt(fq, {1, 0})});
	VPolytope e2 = hull({pt(fq, {0, 0}), pt(fq, {0, 1})});
	Lift w1, w2;
	for (auto &v : e1.vertices)
		w1.set(v, Rat(0));
	for (auto &v : e2.vertices)
		w2.set(v, Rat(0));
	MixedSubdivision box = mixed_subdivision({e1, e2}, {w1, w2});
	REQUIRE(box.complex.cells.size() == 1);
	CHECK(box.fine);
	CHECK(polytope_eq(box.complex.cell_polytope(0), unit_square(fq)));
}

TEST_CASE("fine_mixed_subdivision is seeded and fine", "[cayley]")
{
	auto f = zvt::qq();
	VPolytope s1 = hull({pt(f, {0, 0}), pt(f, {1, 0})});
	VPolytope s2 = hull({pt(f, {0, 0}), pt(f, {1, 0})});
	MixedSubdivision a = fine_mixed_subdivision({s1, s2}, 11);
	CHECK(a.fine);
	CHECK(a.complex.cells.size() == 2);
	MixedSubdivision b = fine_mixed_subdivision({s1, s2}, 11);
	REQUIRE(a.complex.cells.size() == b.complex.cells.size());
	for (size_t i = 0; i < a.complex.cells.size(); i++)
		CHECK(polytope_eq(a.complex.cell_polytope(i), b.complex.cell_polytope(i)));

	/* square plus segment */
	MixedSubdivision c = fine_mixed_subdivision({unit_square(f), s1}, 3);
	CHECK(c.fine);
	CHECK(validate(c.complex).ok());
	PolyComplex whole(f);
	whole.add_cell(minkowski_sum({unit_square(f), s1}));
	CHECK(refines(c.complex, whole));
}

TEST_CASE("staircase triangulations", "[cayley]")
{
	auto count_and_volume = [](const std::vector<IMat> &tris) {
		Rat vol(0);
		for (auto &t : tris) {
			IMat diffs;
			for (size_t i = 1; i < t.size(); i++) {
				IVec d = t[i];
				for (size_t j = 0; j < d.size(); j++)
					d[j] -= t[0][j];
				diffs.push_back(d);
			}
			Rat v = Rat(abs(idet(diffs)));
			for (size_t k = 2; k <= diffs.size(); k++)
				v /= (long)k;
			vol += v;
		}
		return vol;
	};

	auto d1 = staircase_triangulation({{1}}, {0});
	REQUIRE(d1.size() == 1);
	CHECK(count_and_volume(d1) == Rat(1));

	auto d2 = staircase_triangulation({{1, 0}, {0, 1}}, {0, 0});
	REQUIRE(d2.size() == 2);
	CHECK(count_and_volume(d2) == Rat(1));
	for (auto &t : d2)
		CHECK(simplex_index(t) == 1);

	auto d3 = staircase_triangulation({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {0, 0, 0});
	REQUIRE(d3.size() == 6);
	CHECK(count_and_volume(d3) == Rat(1));

	/* skew generators: volume matches the determinant */
	auto skew = staircase_triangulation({{1, 0}, {1, 2}}, {3, 5});
	REQUIRE(skew.size() == 2);
	CHECK(count_and_volume(skew) == Rat(2));

	CHECK_THROWS_AS(staircase_triangulation({{1, 0}, {2, 0}}, {0, 0}),
	                std::invalid_argument);
}

TEST_CASE("clex triangulation: squares and segments", "[cayley]")
{
	auto f = zvt::qq();

	/* r = 1: the unit square against itself gives two unimodular triangles */
	VPolytope sq = unit_square(f);
	Triangulation t1 = clex_triangulation({sq}, sq);
	CHECK(t1.cells.size() == 2);
	CHECK(t1.max_index == 1);
	for (auto &c : t1.cells)
		CHECK(c.size() == 3); /* d + r vertices in R^{d+r} */

	/* r = 2 equal unit segments: the Cayley square splits into two */
	VPolytope u = iseg1(f, 0, 1);
	Triangulation t2 = clex_triangulation({u, u}, u);
	CHECK(t2.cells.size() == 2);
	CHECK(t2.max_index == 1);

	/* r = 2, [0,2] and [0,1]: three triangles in the Cayley trapezoid */
	Triangulation t3 = clex_triangulation({iseg1(f, 0, 2), u}, u);
	CHECK(t3.cells.size() == 3);
	CHECK(t3.max_index == 1);
}

TEST_CASE("clex triangulation invariants", "[cayley]")
{
	auto f = zvt::qq();
	VPolytope tri = hull({pt(f, {0, 0}), pt(f, {1, 0}), pt(f, {0, 1})});
	VPolytope tri2 = hull({pt(f, {0, 0}), pt(f, {2, 0}), pt(f, {0, 2})});
	VPolytope sq = unit_square(f);
	VPolytope rect = hull({pt(f, {0, 0}), pt(f, {2, 0}), pt(f, {0, 1}), pt(f, {2, 1})});

	struct Case {
		std::vector<VPolytope> ps;
		VPolytope dom;
	};
	std::vector<Case> cases{
	    {{tri2, tri}, tri},
	    {{rect, sq}, sq},
	    {{sq, sq, sq}, sq},
	};
	for (auto &cs : cases) {
		Triangulation t = clex_triangulation(cs.ps, cs.dom);
		size_t d = cs.dom.ambient_dim, r = cs.ps.size();
		CHECK(t.max_index == 1);
		REQUIRE(!t.cells.empty());
		/* every cell is a full simplex of the Cayley polytope */
		Scalar ref = f->zero();
		for (auto &cell : t.cells) {
			REQUIRE(cell.size() == d + r);
			std::vector<IVec> verts;
			for (int id : cell)
				verts.push_back(ivec_of(t.points[id]));
			/* independent unimodularity check through Smith normal form */
			IMat diffs;
			for (size_t i = 1; i < verts.size(); i++) {
				IVec dd = verts[i];
				for (size_t j = 0; j < dd.size(); j++)
					dd[j] -= verts[0][j];
				diffs.push_back(dd);
			}
			Snf s = snf(diffs);
			Int prod = 1;
			for (auto &x : s.diag)
				prod *= x;
			CHECK(abs(prod) == 1);
			/* equal volumes across cells: all are unimodular in one lattice */
			std::vector<Point> pts;
			for (int id : cell)
				pts.push_back(t.points[id]);
			Scalar v = volume(hull(pts));
			if (sign(ref) == 0)
				ref = v;
			CHECK(sign(v - ref) == 0);
		}
		/* every point carries exactly one tag and lies in its summand */
		for (auto &p : t.points) {
			int tags = 0;
			size_t tag = 0;
			for (size_t q = 0; q < r; q++)
				if (sign(p[d + q] - f->one()) == 0) {
					tags++;
					tag = q;
				}
			REQUIRE(tags == 1);
			Point proj(p.begin(), p.begin() + d);
			CHECK(cs.ps[tag].contains(proj));
		}
	}
}

TEST_CASE("clex triangulation rejects bad input", "[cayley]")
{
	auto f = zvt::qq();
	VPolytope sq = unit_square(f);
	VPolytope tri = hull({pt(f, {0, 0}), pt(f, {1, 0}), pt(f, {0, 1})});
	/* the triangle's normal fan is not refined by the square's */
	CHECK_THROWS_AS(clex_triangulation({tri}, sq), std::invalid_argument);
	/* a lower-dimensional dominator is rejected */
	CHECK_THROWS_AS(clex_triangulation({iseg1(f, 0, 1)},
	                                   hull({pt(f, {0, 0}), pt(f, {1, 0})})),
	                std::invalid_argument);
	CHECK_THROWS_AS(clex_triangulation({}, sq), std::invalid_argument);
}
