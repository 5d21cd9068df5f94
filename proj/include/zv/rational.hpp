/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace zv {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat rat(long num, long den = 1)
{
	Rat q(num, den);
	q.canonicalize();
	return q;
}

inline Rat rat_from_string(const std::string &s)
{
	Rat q;
	if (q.set_str(s, 10) != 0)
		throw std::invalid_argument("bad rational literal: " + s);
	q.canonicalize();
	return q;
}

inline std::string rat_to_string(const Rat &q)
{
	if (q.get_den() == 1)
		return q.get_num().get_str();
	return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Int floor_div(const Int &a, const Int &b)
{
	Int q;
	mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
	return q;
}

inline Int rat_floor(const Rat &q)
{
	return floor_div(q.get_num(), q.get_den());
}

inline Int rat_ceil(const Rat &q)
{
	return -rat_floor(-q);
}

inline Int isqrt(const Int &n)
{
	Int r;
	mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
	return r;
}

inline bool is_square(const Int &n, Int *root = nullptr)
{
	if (n < 0)
		return false;
	Int r = isqrt(n);
	if (root)
		*root = r;
	return r * r == n;
}

/* Deterministic splittable RNG (splitmix64) used for every seeded choice. */
struct Rng {
	std::uint64_t state;

	explicit Rng(std::uint64_t seed) : state(seed) {}

	std::uint64_t next()
	{
		std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
		return z ^ (z >> 31);
	}

	/* uniform in [0, n) */
	std::uint64_t below(std::uint64_t n) { return next() % n; }

	long range(long lo, long hi) /* inclusive */
	{
		return lo + (long)below((std::uint64_t)(hi - lo + 1));
	}

	Rng split() { return Rng(next() ^ 0xd1b54a32d192ed03ull); }
};

} // namespace zv
