/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include <zv/field.hpp>

namespace zvt {

using namespace zv;

/* Q(sqrt2, sqrt3), basis 1, sqrt2, sqrt3, sqrt6, with V spanned by 1, sqrt2, sqrt3. */
inline FieldPtr q23()
{
	Mat<Rat> vb = {{Rat(1), Rat(0), Rat(0), Rat(0)},
	               {Rat(0), Rat(1), Rat(0), Rat(0)},
	               {Rat(0), Rat(0), Rat(1), Rat(0)}};
	return Field::make_multiquadratic({2, 3}, vb);
}

/* Q(sqrt2) with V = the whole field. */
inline FieldPtr q2()
{
	Mat<Rat> vb = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
	return Field::make_multiquadratic({2}, vb);
}

/* Q with V = Q. */
inline FieldPtr qq()
{
	Mat<Rat> vb = {{Rat(1)}};
	return Field::make_multiquadratic({}, vb);
}

inline Scalar sc(const FieldPtr &f, long q) { return f->from_rat(Rat(q)); }

inline Vec<Scalar> pt(const FieldPtr &f, std::vector<long> coords)
{
	Vec<Scalar> p;
	for (long x : coords)
		p.push_back(f->from_rat(Rat(x)));
	return p;
}

} // namespace zvt
