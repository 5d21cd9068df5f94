/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "matrix.hpp"
#include "rational.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace zv {

/* Polynomials over Q, coefficients low-to-high. */
using Poly = std::vector<Rat>;

inline void poly_trim(Poly &p)
{
	while (!p.empty() && sgn(p.back()) == 0)
		p.pop_back();
}

inline Rat poly_eval(const Poly &p, const Rat &x)
{
	Rat r = 0;
	for (size_t i = p.size(); i-- > 0;)
		r = r * x + p[i];
	return r;
}

inline Poly poly_deriv(const Poly &p)
{
	Poly d;
	for (size_t i = 1; i < p.size(); i++)
		d.push_back(Rat((long)i) * p[i]);
	return d;
}

/* Remainder of a by b (b nonzero). */
inline Poly poly_rem(Poly a, const Poly &b)
{
	poly_trim(a);
	while (a.size() >= b.size() && !a.empty()) {
		Rat f = a.back() / b.back();
		size_t off = a.size() - b.size();
		for (size_t i = 0; i < b.size(); i++)
			a[off + i] -= f * b[i];
		poly_trim(a);
	}
	return a;
}

inline Poly poly_gcd(Poly a, Poly b)
{
	poly_trim(a);
	poly_trim(b);
	while (!b.empty()) {
		Poly r = poly_rem(a, b);
		a = std::move(b);
		b = std::move(r);
	}
	if (!a.empty()) {
		Rat lead = a.back();
		for (auto &c : a)
			c /= lead;
	}
	return a;
}

/* Number of distinct real roots of squarefree p in the open interval (a, b). */
inline int sturm_count(const Poly &p, const Rat &a, const Rat &b)
{
	std::vector<Poly> seq{p, poly_deriv(p)};
	poly_trim(seq[0]);
	poly_trim(seq[1]);
	while (!seq.back().empty()) {
		Poly r = poly_rem(seq[seq.size() - 2], seq.back());
		for (auto &c : r)
			c = -c;
		poly_trim(r);
		seq.push_back(std::move(r));
	}
	seq.pop_back();
	auto changes = [&](const Rat &x) {
		int n = 0, prev = 0;
		for (const auto &q : seq) {
			int s = sgn(poly_eval(q, x));
			if (s == 0)
				continue;
			if (prev != 0 && s != prev)
				n++;
			prev = s;
		}
		return n;
	};
	return changes(a) - changes(b);
}

inline Int squarefree_kernel(Int n)
{
	if (n <= 0)
		throw std::invalid_argument("kernel of non-positive integer");
	Int k = 1;
	for (Int p = 2; p * p <= n; p++) {
		int e = 0;
		while (n % p == 0) {
			n /= p;
			e++;
		}
		if (e & 1)
			k *= p;
	}
	return k * n;
}

class Field;
using FieldPtr = std::shared_ptr<const Field>;

struct Scalar {
	FieldPtr F;
	Vec<Rat> c; /* coefficients over the canonical Q-basis of F */

	Scalar() = default;
	Scalar(FieldPtr f, Vec<Rat> coeffs) : F(std::move(f)), c(std::move(coeffs)) {}
};

enum class FieldKind { multiquadratic, algebraic };

class Field : public std::enable_shared_from_this<Field> {
public:
	FieldKind kind;
	size_t degree;

	/* multiquadratic */
	std::vector<long> radicands;
	std::vector<Int> basis_kernel;   /* squarefree kernel per basis element */
	std::vector<Int> basis_product;  /* subset product (canonical sort key) */
	std::vector<unsigned> basis_mask;

	/* algebraic */
	Poly minpoly;
	Rat iso_lo, iso_hi;

	/* designated subspace V */
	Mat<Rat> v_basis; /* rows = coefficient vectors */

	static FieldPtr make_multiquadratic(std::vector<long> rads, Mat<Rat> vb)
	{
		auto f = std::shared_ptr<Field>(new Field());
		f->kind = FieldKind::multiquadratic;
		f->radicands = rads;
		for (long d : rads) {
			if (d < 2 || squarefree_kernel(Int(d)) != d)
				throw std::invalid_argument("radicands must be square-free and >= 2");
		}
		size_t k = rads.size();
		if (k > 20)
			throw std::invalid_argument("too many radicands");
		std::vector<std::pair<Int, unsigned>> subsets;
		for (unsigned m = 0; m < (1u << k); m++) {
			Int prod = 1;
			for (size_t i = 0; i < k; i++)
				if (m & (1u << i))
					prod *= rads[i];
			subsets.push_back({prod, m});
		}
		std::sort(subsets.begin(), subsets.end());
		f->degree = subsets.size();
		std::map<Int, int> seen;
		for (auto &[prod, m] : subsets) {
			Int ker = squarefree_kernel(prod);
			if (seen.count(ker))
				throw std::invalid_argument(
				    "radicands are not multiplicatively independent");
			seen[ker] = (int)f->basis_kernel.size();
			f->basis_kernel.push_back(ker);
			f->basis_product.push_back(prod);
			f->basis_mask.push_back(m);
		}
		f->kernel_index = std::move(seen);
		/* multiplication table over the kernel basis */
		f->mul_idx.resize(f->degree * f->degree);
		f->mul_fac.resize(f->degree * f->degree);
		for (size_t i = 0; i < f->degree; i++)
			for (size_t j = 0; j < f->degree; j++) {
				Int prod = f->basis_kernel[i] * f->basis_kernel[j];
				Int ker = squarefree_kernel(prod);
				f->mul_idx[i * f->degree + j] = f->kernel_index.at(ker);
				f->mul_fac[i * f->degree + j] = Rat(isqrt(prod / ker));
			}
		f->set_v_basis(std::move(vb));
		return f;
	}

	static FieldPtr make_algebraic(std::vector<Int> mp, Rat lo, Rat hi, Mat<Rat> vb)
	{
		auto f = std::shared_ptr<Field>(new Field());
		f->kind = FieldKind::algebraic;
		Poly p;
		for (auto &a : mp)
			p.push_back(Rat(a));
		poly_trim(p);
		if (p.size() < 2)
			throw std::invalid_argument("minimal polynomial must have degree >= 1");
		f->minpoly = p;
		f->degree = p.size() - 1;
		Poly g = poly_gcd(p, poly_deriv(p));
		if (g.size() > 1)
			throw std::invalid_argument("minimal polynomial is not squarefree");
		if (!(lo < hi) || sgn(poly_eval(p, lo)) == 0 || sgn(poly_eval(p, hi)) == 0)
			throw std::invalid_argument("bad isolating interval");
		if (sturm_count(p, lo, hi) != 1)
			throw std::invalid_argument(
			    "isolating interval must contain exactly one root");
		f->iso_lo = f->cur_lo = lo;
		f->iso_hi = f->cur_hi = hi;
		/* theta^(degree+i) over the power basis, i = 0 .. degree-2 */
		Rat lead = p.back();
		Vec<Rat> red(f->degree);
		for (size_t j = 0; j < f->degree; j++)
			red[j] = -p[j] / lead;
		f->pow_red.push_back(red);
		for (size_t i = 1; i + 1 < f->degree; i++) {
			Vec<Rat> prev = f->pow_red.back(), nxt(f->degree, Rat(0));
			/* multiply by theta */
			Rat top = prev.back();
			for (size_t j = f->degree - 1; j > 0; j--)
				nxt[j] = prev[j - 1] + top * red[j];
			nxt[0] = top * red[0];
			f->pow_red.push_back(nxt);
		}
		f->set_v_basis(std::move(vb));
		return f;
	}

	/* ----- scalar constructors ----- */

	Scalar zero() const { return Scalar(shared_from_this(), Vec<Rat>(degree, Rat(0))); }

	Scalar from_rat(const Rat &q) const
	{
		Scalar s = zero();
		s.c[0] = q; /* basis element 0 is 1 in both kinds */
		return s;
	}

	Scalar one() const { return from_rat(Rat(1)); }

	Scalar basis_scalar(size_t i) const
	{
		Scalar s = zero();
		s.c.at(i) = 1;
		return s;
	}

	/* sqrt(d) for positive integer d, multiquadratic fields only. */
	Scalar sqrt_of(long d) const
	{
		if (kind != FieldKind::multiquadratic)
			throw std::invalid_argument("sqrt_of requires a multiquadratic field");
		Int ker = squarefree_kernel(Int(d));
		auto it = kernel_index.find(ker);
		if (it == kernel_index.end())
			throw std::invalid_argument("sqrt not contained in field");
		Scalar s = zero();
		s.c[it->second] = Rat(isqrt(Int(d) / ker));
		return s;
	}

	size_t vdim() const { return v_basis.size(); }

	Scalar v_scalar(size_t i) const { return Scalar(shared_from_this(), v_basis.at(i)); }

	Scalar from_v_coords(const Vec<Rat> &coords) const
	{
		Scalar s = zero();
		for (size_t i = 0; i < coords.size(); i++)
			for (size_t j = 0; j < degree; j++)
				s.c[j] += coords[i] * v_basis.at(i)[j];
		return s;
	}

	/* coordinates over v_basis, or nullopt if a is outside V */
	std::optional<Vec<Rat>> v_coords(const Scalar &a) const
	{
		Mat<Rat> sys(degree, Vec<Rat>(vdim()));
		for (size_t i = 0; i < vdim(); i++)
			for (size_t j = 0; j < degree; j++)
				sys[j][i] = v_basis[i][j];
		return solve(sys, a.c, Rat(0));
	}

	/* ----- arithmetic on coefficient vectors ----- */

	Vec<Rat> mul(const Vec<Rat> &a, const Vec<Rat> &b) const
	{
		if (kind == FieldKind::multiquadratic) {
			Vec<Rat> r(degree, Rat(0));
			for (size_t i = 0; i < degree; i++) {
				if (sgn(a[i]) == 0)
					continue;
				for (size_t j = 0; j < degree; j++) {
					if (sgn(b[j]) == 0)
						continue;
					size_t t = i * degree + j;
					r[mul_idx[t]] += a[i] * b[j] * mul_fac[t];
				}
			}
			return r;
		}
		Vec<Rat> conv(2 * degree - 1, Rat(0));
		for (size_t i = 0; i < degree; i++)
			for (size_t j = 0; j < degree; j++)
				conv[i + j] += a[i] * b[j];
		Vec<Rat> r(conv.begin(), conv.begin() + degree);
		for (size_t i = degree; i < conv.size(); i++) {
			if (sgn(conv[i]) == 0)
				continue;
			const Vec<Rat> &red = pow_red[i - degree];
			for (size_t j = 0; j < degree; j++)
				r[j] += conv[i] * red[j];
		}
		return r;
	}

	std::optional<Vec<Rat>> inv(const Vec<Rat> &a) const
	{
		/* multiplication-by-a operator M: solve M x = e_0 */
		Mat<Rat> m(degree, Vec<Rat>(degree));
		for (size_t j = 0; j < degree; j++) {
			Vec<Rat> ej(degree, Rat(0));
			ej[j] = 1;
			Vec<Rat> col = mul(a, ej);
			for (size_t i = 0; i < degree; i++)
				m[i][j] = col[i];
		}
		Vec<Rat> e0(degree, Rat(0));
		e0[0] = 1;
		return solve(m, e0, Rat(0));
	}

	/* ----- sign via adaptive rational interval enclosures ----- */

	struct Interval {
		Rat lo, hi;
		Interval operator+(const Interval &o) const { return {lo + o.lo, hi + o.hi}; }
		Interval operator*(const Interval &o) const
		{
			Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
			return {std::min(std::min(a, b), std::min(c, d)),
			        std::max(std::max(a, b), std::max(c, d))};
		}
		Interval scale(const Rat &q) const
		{
			return sgn(q) >= 0 ? Interval{lo * q, hi * q} : Interval{hi * q, lo * q};
		}
	};

	/* enclosures of the basis values at >= prec fractional bits, cached per
	 * precision (enclosures only shrink, so cached values stay valid) */
	const std::vector<Interval> &basis_enclosures(unsigned prec) const
	{
		{
			std::lock_guard<std::mutex> lk(enc_mutex);
			auto it = enc_cache.find(prec);
			if (it != enc_cache.end())
				return it->second;
		}
		std::vector<Interval> enc;
		if (kind == FieldKind::multiquadratic) {
			Int scale = Int(1) << prec;
			for (size_t i = 0; i < degree; i++) {
				Int s = isqrt(basis_kernel[i] * scale * scale);
				enc.push_back({Rat(s) / Rat(scale), Rat(s + 1) / Rat(scale)});
			}
		} else {
			Interval th = theta_enclosure(prec + (unsigned)(2 * degree));
			enc.push_back({Rat(1), Rat(1)});
			for (size_t i = 1; i < degree; i++)
				enc.push_back(enc.back() * th);
		}
		std::lock_guard<std::mutex> lk(enc_mutex);
		return enc_cache.emplace(prec, std::move(enc)).first->second;
	}

	Interval enclosure(const Vec<Rat> &a, unsigned prec) const
	{
		const auto &enc = basis_enclosures(prec);
		Interval r{Rat(0), Rat(0)};
		for (size_t i = 0; i < degree; i++)
			if (sgn(a[i]) != 0)
				r = r + enc[i].scale(a[i]);
		return r;
	}

	int sign(const Vec<Rat> &a) const
	{
		bool z = true;
		for (auto &q : a)
			if (sgn(q) != 0)
				z = false;
		if (z)
			return 0;
		for (unsigned prec = 64;; prec *= 2) {
			Interval e = enclosure(a, prec);
			if (sgn(e.lo) > 0)
				return 1;
			if (sgn(e.hi) < 0)
				return -1;
		}
	}

	double to_double(const Vec<Rat> &a) const
	{
		Interval e = enclosure(a, 64);
		Rat mid = (e.lo + e.hi) / 2;
		return mid.get_d();
	}

private:
	Field() = default;

	std::map<Int, int> kernel_index;
	Mat<Rat> pow_red; /* algebraic: theta^(degree+i) over the power basis */
	mutable std::mutex iso_mutex;
	mutable Rat cur_lo, cur_hi;
	std::vector<int> mul_idx; /* multiquadratic multiplication table */
	std::vector<Rat> mul_fac;
	mutable std::mutex enc_mutex;
	mutable std::map<unsigned, std::vector<Interval>> enc_cache;

	void set_v_basis(Mat<Rat> vb)
	{
		for (auto &row : vb)
			if (row.size() != degree)
				throw std::invalid_argument("v_basis coefficient length mismatch");
		if (!vb.empty() && rank(vb) != vb.size())
			throw std::invalid_argument("v_basis not linearly independent");
		v_basis = std::move(vb);
	}

	Interval theta_enclosure(unsigned prec) const
	{
		std::lock_guard<std::mutex> g(iso_mutex);
		Rat width_target = Rat(1) / Rat(Int(1) << prec);
		int slo = sgn(poly_eval(minpoly, cur_lo));
		while (cur_hi - cur_lo >= width_target) {
			Rat mid = (cur_lo + cur_hi) / 2;
			int sm = sgn(poly_eval(minpoly, mid));
			if (sm == 0) {
				/* rational root: only possible for degree 1 */
				cur_lo = mid - width_target / 2;
				cur_hi = mid + width_target / 2;
				break;
			}
			if (sm == slo)
				cur_lo = mid;
			else
				cur_hi = mid;
		}
		return {cur_lo, cur_hi};
	}
};

/* ----- Scalar operators ----- */

inline const FieldPtr &common_field(const Scalar &a, const Scalar &b)
{
	if (a.F != b.F)
		throw std::invalid_argument("scalars from different fields");
	return a.F;
}

inline bool is_zero(const Scalar &a)
{
	for (auto &q : a.c)
		if (sgn(q) != 0)
			return false;
	return true;
}

inline int sign(const Scalar &a) { return a.F->sign(a.c); }

inline Scalar operator+(const Scalar &a, const Scalar &b)
{
	const FieldPtr &f = common_field(a, b);
	Vec<Rat> c(a.c);
	for (size_t i = 0; i < c.size(); i++)
		c[i] += b.c[i];
	return Scalar(f, std::move(c));
}

inline Scalar operator-(const Scalar &a)
{
	Vec<Rat> c(a.c);
	for (auto &q : c)
		q = -q;
	return Scalar(a.F, std::move(c));
}

inline Scalar operator-(const Scalar &a, const Scalar &b) { return a + (-b); }

inline Scalar operator*(const Scalar &a, const Scalar &b)
{
	const FieldPtr &f = common_field(a, b);
	return Scalar(f, f->mul(a.c, b.c));
}

inline Scalar operator*(const Rat &q, const Scalar &a)
{
	Vec<Rat> c(a.c);
	for (auto &x : c)
		x *= q;
	return Scalar(a.F, std::move(c));
}

inline Scalar operator/(const Scalar &a, const Scalar &b)
{
	const FieldPtr &f = common_field(a, b);
	if (is_zero(b))
		throw std::domain_error("division by zero");
	auto bi = f->inv(b.c);
	if (!bi)
		throw std::domain_error("division by zero");
	return Scalar(f, f->mul(a.c, *bi));
}

inline Scalar operator/(const Scalar &a, const Rat &q)
{
	if (sgn(q) == 0)
		throw std::domain_error("division by zero");
	return (1 / q) * a;
}

inline Scalar inv(const Scalar &a) { return a.F->one() / a; }

inline Scalar &operator+=(Scalar &a, const Scalar &b) { return a = a + b; }
inline Scalar &operator-=(Scalar &a, const Scalar &b) { return a = a - b; }
inline Scalar &operator*=(Scalar &a, const Scalar &b) { return a = a * b; }

inline bool operator==(const Scalar &a, const Scalar &b) { return is_zero(a - b); }
inline bool operator!=(const Scalar &a, const Scalar &b) { return !(a == b); }
inline bool operator<(const Scalar &a, const Scalar &b) { return sign(a - b) < 0; }
inline bool operator>(const Scalar &a, const Scalar &b) { return sign(a - b) > 0; }
inline bool operator<=(const Scalar &a, const Scalar &b) { return sign(a - b) <= 0; }
inline bool operator>=(const Scalar &a, const Scalar &b) { return sign(a - b) >= 0; }

inline bool in_V(const Scalar &a) { return a.F->v_coords(a).has_value(); }

inline bool is_rational(const Scalar &a)
{
	for (size_t i = 1; i < a.c.size(); i++)
		if (sgn(a.c[i]) != 0)
			return false;
	return true;
}

inline Rat to_rat(const Scalar &a)
{
	if (!is_rational(a))
		throw std::domain_error("scalar is not rational");
	return a.c[0];
}

inline double to_double(const Scalar &a) { return a.F->to_double(a.c); }

/* Syntactic total order on coefficient vectors, for use as map keys. */
inline bool syntactic_less(const Scalar &a, const Scalar &b)
{
	return std::lexicographical_compare(a.c.begin(), a.c.end(), b.c.begin(),
	                                    b.c.end());
}

inline bool syntactic_less(const Vec<Scalar> &a, const Vec<Scalar> &b)
{
	for (size_t i = 0; i < std::min(a.size(), b.size()); i++) {
		if (syntactic_less(a[i], b[i]))
			return true;
		if (syntactic_less(b[i], a[i]))
			return false;
	}
	return a.size() < b.size();
}

/* Lexicographic order by true value. */
inline bool lex_less(const Vec<Scalar> &a, const Vec<Scalar> &b)
{
	for (size_t i = 0; i < std::min(a.size(), b.size()); i++) {
		int s = sign(a[i] - b[i]);
		if (s < 0)
			return true;
		if (s > 0)
			return false;
	}
	return a.size() < b.size();
}

} // namespace zv
