/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "complex.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace zv {

namespace detail {

/* double within 1e-9 relative error, via exact interval refinement */
inline double scalar_to_double(const Scalar &s)
{
	for (unsigned prec = 64; prec <= 4096; prec *= 2) {
		auto e = s.F->enclosure(s.c, prec);
		Rat width = e.hi - e.lo;
		Rat mag = abs(e.lo) + abs(e.hi);
		if (width * Rat(2000000000) <= mag || sgn(width) == 0) {
			Rat mid = (e.lo + e.hi) / 2;
			return mid.get_d();
		}
	}
	throw std::runtime_error("svg: enclosure failed to converge");
}

inline std::string fmt(double v)
{
	std::ostringstream os;
	os.precision(12);
	os << v;
	return os.str();
}

} // namespace detail

/* SVG 1.1 drawing of a complex with ambient_dim <= 2. Segments and points get
 * stroked paths; 2-cells get filled polygons, green when polystable. */
inline std::string plot_svg(const PolyComplex &x)
{
	size_t n = x.points.empty() ? 0 : x.points[0].size();
	if (n > 2)
		throw std::invalid_argument("plot supports ambient_dim <= 2");
	double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
	std::vector<std::pair<double, double>> coords;
	for (size_t i = 0; i < x.points.size(); i++) {
		double px = n >= 1 ? detail::scalar_to_double(x.points[i][0]) : 0;
		double py = n >= 2 ? detail::scalar_to_double(x.points[i][1]) : 0;
		coords.push_back({px, py});
		if (i == 0) {
			xmin = xmax = px;
			ymin = ymax = py;
		} else {
			xmin = std::min(xmin, px);
			xmax = std::max(xmax, px);
			ymin = std::min(ymin, py);
			ymax = std::max(ymax, py);
		}
	}
	double w = std::max(xmax - xmin, 1e-9), h = std::max(ymax - ymin, 1e-9);
	double scale = 400.0 / std::max(w, h), margin = 20;
	auto X = [&](double v) { return margin + (v - xmin) * scale; };
	auto Y = [&](double v) { return margin + (ymax - v) * scale; };

	std::ostringstream os;
	os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
	   << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
	   << detail::fmt(w * scale + 2 * margin) << "\" height=\""
	   << detail::fmt(h * scale + 2 * margin) << "\">\n";
	for (size_t ci = 0; ci < x.cells.size(); ci++) {
		const VPolytope &p = x.cell_polytope(ci);
		/* boundary walk for 2-cells: order vertices by angle about centroid */
		std::vector<int> ids = x.cells[ci].vertices;
		if (p.dim == 2) {
			double cx = 0, cy = 0;
			for (int id : ids) {
				cx += coords[id].first;
				cy += coords[id].second;
			}
			cx /= ids.size();
			cy /= ids.size();
			std::sort(ids.begin(), ids.end(), [&](int a, int b) {
				return std::atan2(coords[a].second - cy, coords[a].first - cx) <
				       std::atan2(coords[b].second - cy, coords[b].first - cx);
			});
		}
		std::string fill = p.dim < 2               ? "none"
		                   : is_polystable_cell(p) ? "#7cc47c"
		                                           : "#e08080";
		os << "<path d=\"";
		for (size_t k = 0; k < ids.size(); k++)
			os << (k == 0 ? "M " : "L ") << detail::fmt(X(coords[ids[k]].first))
			   << " " << detail::fmt(Y(coords[ids[k]].second)) << " ";
		os << "Z\" fill=\"" << fill
		   << "\" stroke=\"#222222\" stroke-width=\"1.5\"/>\n";
	}
	os << "</svg>\n";
	return os.str();
}

} // namespace zv
