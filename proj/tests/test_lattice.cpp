/* SPDX-License-Identifier: Apache-2.0 */

#include <zv/lattice.hpp>

#include <catch_amalgamated.hpp>

using namespace zv;

static bool mat_eq(const IMat &a, const IMat &b) { return a == b; }

static void check_snf(const IMat &a)
{
	Snf s = snf(a);
	CHECK(is_unimodular(s.u));
	CHECK(is_unimodular(s.v));
	CHECK(mat_eq(mat_mul(mat_mul(s.u, a), s.v), s.d));
	for (size_t i = 0; i + 1 < s.diag.size(); i++)
		CHECK(s.diag[i + 1] % s.diag[i] == 0);
	for (size_t i = 0; i < s.d.size(); i++)
		for (size_t j = 0; j < s.d[i].size(); j++)
			if (i != j)
				CHECK(s.d[i][j] == 0);
}

TEST_CASE("snf basics", "[lattice]")
{
	IMat a = {{1, 1}, {1, -1}};
	Snf s = snf(a);
	CHECK(s.diag == IVec{1, 2});
	check_snf(a);

	IMat id = {{1, 0}, {0, 1}};
	CHECK(snf(id).diag == IVec{1, 1});

	check_snf({{2, 4, 4}, {-6, 6, 12}, {10, 4, 16}});
	CHECK(snf(IMat{{2, 4, 4}, {-6, 6, 12}, {10, 4, 16}}).diag == IVec{2, 2, 156});
}

TEST_CASE("snf randomized certificates", "[lattice]")
{
	Rng rng(3);
	for (int it = 0; it < 200; it++) {
		size_t rows = 1 + rng.below(4), cols = 1 + rng.below(4);
		IMat a(rows, IVec(cols));
		for (auto &row : a)
			for (auto &x : row)
				x = rng.range(-6, 6);
		check_snf(a);
	}
}

TEST_CASE("hnf", "[lattice]")
{
	IMat a = {{2, 0}, {0, 3}};
	CHECK(mat_eq(hnf(a), a));
	IMat b = hnf({{2, 1}, {0, 0}, {1, 2}});
	CHECK(mat_eq(b, {{1, 2}, {0, 3}, {0, 0}}));
	/* row lattice is preserved: det of nonzero part matches */
	IMat c = {{4, 6}, {2, 5}};
	IMat h = hnf(c);
	CHECK(abs(idet(c)) == abs(idet(h)));
}

TEST_CASE("lattice_index", "[lattice]")
{
	CHECK(lattice_index({{1, 1}, {1, -1}}, 2) == Int(2));
	CHECK(lattice_index({{1, 0}, {0, 1}}, 2) == Int(1));
	CHECK(lattice_index({{2, 0}, {0, 2}}, 2) == Int(4));
	CHECK(!lattice_index({}, 2).has_value());
	CHECK(lattice_index({{2, 2}}, 2) == Int(2)); /* saturation-relative */
	CHECK(lattice_index({{2, 2}}, 2, true) == std::nullopt);
	CHECK(lattice_index({{0, 3}, {3, 0}, {1, 1}}, 2) == Int(3));
}

TEST_CASE("lattice_index against fundamental-domain oracle", "[lattice]")
{
	Rng rng(5);
	int tried = 0;
	while (tried < 60) {
		size_t d = 2 + rng.below(2);
		IMat a(d, IVec(d));
		for (auto &row : a)
			for (auto &x : row)
				x = rng.range(-3, 3);
		Int dt = abs(idet(a));
		if (dt == 0 || dt > 12)
			continue;
		tried++;
		/* count integer points p with p = x a, x in [0,1)^d */
		auto ainv = inverse(to_rat_mat(a), Rat(0), Rat(1));
		long bound = 10;
		long count = 0;
		std::vector<long> p(d, -bound);
		for (;;) {
			Vec<Rat> pq;
			for (long v : p)
				pq.push_back(Rat(v));
			Vec<Rat> x = mat_vec(transpose(*ainv), pq);
			bool in = true;
			for (auto &q : x)
				if (q < 0 || q >= 1)
					in = false;
			if (in)
				count++;
			size_t k = 0;
			while (k < d && ++p[k] > bound)
				p[k++] = -bound;
			if (k == d)
				break;
		}
		CHECK(Int(count) == *lattice_index(a, d));
	}
}

TEST_CASE("primitive", "[lattice]")
{
	CHECK(primitive({2, -4}) == IVec{1, -2});
	CHECK(primitive({0, 3, 6}) == IVec{0, 1, 2});
	CHECK(primitive({5, 0}) == IVec{1, 0});
	CHECK(primitive({-2, 4}) == IVec{1, -2});
	CHECK_THROWS(primitive({0, 0}));
}

TEST_CASE("is_unimodular", "[lattice]")
{
	CHECK(is_unimodular({{1, 0}, {0, 1}}));
	CHECK(!is_unimodular({{1, 1}, {1, -1}}));
	CHECK(is_unimodular({{1, 1}, {0, 1}}));
	CHECK_THROWS(is_unimodular({{1, 0, 0}, {0, 1, 0}}));
}

TEST_CASE("saturate", "[lattice]")
{
	IMat s1 = saturate({{2, 2}});
	REQUIRE(s1.size() == 1);
	CHECK((s1[0] == IVec{1, 1} || s1[0] == IVec{-1, -1}));

	IMat s2 = saturate({{1, 1}, {1, -1}});
	REQUIRE(s2.size() == 2);
	CHECK(is_unimodular(s2));

	CHECK(saturate({}).empty());

	/* idempotence and self-index-1 on random inputs */
	Rng rng(9);
	for (int it = 0; it < 100; it++) {
		size_t rows = 1 + rng.below(3), cols = 2 + rng.below(2);
		IMat a(rows, IVec(cols));
		for (auto &row : a)
			for (auto &x : row)
				x = rng.range(-4, 4);
		IMat s = saturate(a);
		if (s.empty())
			continue;
		IMat ss = saturate(s);
		/* same lattice: each basis saturated and of index 1 */
		CHECK(*lattice_index(s, cols) == 1);
		CHECK(*lattice_index(ss, cols) == 1);
		CHECK(rank(to_rat_mat(s)) == rank(to_rat_mat(ss)));
		/* rows of a lie in the saturation */
		for (auto &row : a) {
			Mat<Rat> sys = transpose(to_rat_mat(s));
			Vec<Rat> b;
			for (auto &x : row)
				b.push_back(Rat(x));
			auto sol = solve(sys, b, Rat(0));
			bool in_lattice = sol.has_value();
			if (sol)
				for (auto &q : *sol)
					if (q.get_den() != 1)
						in_lattice = false;
			CHECK(in_lattice);
		}
	}
}
