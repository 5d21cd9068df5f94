/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "cayley.hpp"
#include "complex.hpp"
#include "decompose.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace zv {

using Json = nlohmann::ordered_json;

struct JsonError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

/* ---------- rationals ---------- */

inline Rat rat_from_json(const Json &j)
{
	if (j.is_number_integer())
		return Rat((long)j.get<long long>());
	if (!j.is_string())
		throw JsonError("expected rational string");
	return rat_from_string(j.get<std::string>());
}

/* ---------- fields ---------- */

inline Json field_to_json(const FieldPtr &F)
{
	Json j;
	Json vb = Json::array();
	for (auto &row : F->v_basis) {
		Json r = Json::array();
		for (auto &q : row)
			r.push_back(rat_to_string(q));
		vb.push_back(r);
	}
	if (F->kind == FieldKind::multiquadratic) {
		j["kind"] = "multiquadratic";
		j["radicands"] = F->radicands;
	} else {
		j["kind"] = "algebraic";
		Json mp = Json::array();
		for (auto &q : F->minpoly)
			mp.push_back(rat_to_string(q));
		j["minpoly"] = mp;
		j["interval"] = {rat_to_string(F->iso_lo), rat_to_string(F->iso_hi)};
	}
	j["v_basis"] = vb;
	return j;
}

inline FieldPtr field_from_json(const Json &j)
{
	if (!j.is_object() || !j.contains("kind"))
		throw JsonError("field spec must be an object with a \"kind\"");
	Mat<Rat> vb;
	if (!j.contains("v_basis") || !j["v_basis"].is_array())
		throw JsonError("field spec missing \"v_basis\"");
	for (auto &row : j["v_basis"]) {
		Vec<Rat> r;
		for (auto &q : row)
			r.push_back(rat_from_json(q));
		vb.push_back(r);
	}
	std::string kind = j["kind"].get<std::string>();
	if (kind == "multiquadratic") {
		std::vector<long> rads;
		if (j.contains("radicands"))
			for (auto &r : j["radicands"])
				rads.push_back(r.get<long>());
		return Field::make_multiquadratic(rads, vb);
	}
	if (kind == "algebraic") {
		if (!j.contains("minpoly") || !j.contains("interval"))
			throw JsonError("algebraic field spec needs \"minpoly\" and \"interval\"");
		std::vector<Int> mp;
		for (auto &q : j["minpoly"]) {
			Rat r = rat_from_json(q);
			if (r.get_den() != 1)
				throw JsonError("minpoly coefficients must be integers");
			mp.push_back(r.get_num());
		}
		Rat lo = rat_from_json(j["interval"].at(0));
		Rat hi = rat_from_json(j["interval"].at(1));
		return Field::make_algebraic(mp, lo, hi, vb);
	}
	throw JsonError("unknown field kind: " + kind);
}

/* ---------- scalars and points ---------- */

inline Json scalar_to_json(const Scalar &s)
{
	Json j = Json::array();
	for (auto &q : s.c)
		j.push_back(rat_to_string(q));
	return j;
}

inline Scalar scalar_from_json(const Json &j, const FieldPtr &F)
{
	if (!j.is_array())
		throw JsonError("scalar must be a list of rational strings");
	Vec<Rat> c;
	for (auto &q : j)
		c.push_back(rat_from_json(q));
	if (c.size() != F->degree)
		throw JsonError("scalar coefficient count does not match field degree");
	return Scalar(F, c);
}

inline Json point_to_json(const Point &p)
{
	Json j = Json::array();
	for (auto &s : p)
		j.push_back(scalar_to_json(s));
	return j;
}

inline Point point_from_json(const Json &j, const FieldPtr &F)
{
	if (!j.is_array())
		throw JsonError("point must be a list of scalars");
	Point p;
	for (auto &s : j)
		p.push_back(scalar_from_json(s, F));
	return p;
}

/* ---------- polytopes ---------- */

inline Json polytope_to_json(const VPolytope &p, bool with_field = true)
{
	Json j;
	if (with_field)
		j["field"] = field_to_json(p.F);
	j["ambient_dim"] = p.ambient_dim;
	Json vs = Json::array();
	for (auto &v : p.vertices)
		vs.push_back(point_to_json(v));
	j["vertices"] = vs;
	return j;
}

/* `fallback` supplies the field when the object does not embed one. */
inline VPolytope polytope_from_json(const Json &j, FieldPtr fallback = nullptr)
{
	if (!j.is_object() || !j.contains("vertices"))
		throw JsonError("polytope must be an object with \"vertices\"");
	FieldPtr F = j.contains("field") ? field_from_json(j["field"]) : fallback;
	if (!F)
		throw JsonError("polytope has no embedded field and no --field was given");
	std::vector<Point> pts;
	for (auto &v : j["vertices"])
		pts.push_back(point_from_json(v, F));
	if (pts.empty())
		throw JsonError("polytope needs at least one vertex");
	size_t n = j.contains("ambient_dim") ? j["ambient_dim"].get<size_t>()
	                                     : pts[0].size();
	for (auto &p : pts)
		if (p.size() != n)
			throw JsonError("vertex length does not match ambient_dim");
	return hull(pts);
}

/* ---------- complexes ---------- */

inline Json complex_to_json(const PolyComplex &x)
{
	Json j;
	j["field"] = field_to_json(x.F);
	Json pts = Json::array();
	for (auto &p : x.points)
		pts.push_back(point_to_json(p));
	j["points"] = pts;
	Json cells = Json::array();
	for (auto &c : x.cells) {
		Json jc;
		jc["vertices"] = c.vertices;
		if (!c.label.empty())
			jc["label"] = c.label;
		cells.push_back(jc);
	}
	j["cells"] = cells;
	return j;
}

inline PolyComplex complex_from_json(const Json &j, FieldPtr fallback = nullptr)
{
	if (!j.is_object() || !j.contains("points") || !j.contains("cells"))
		throw JsonError("complex must be an object with \"points\" and \"cells\"");
	FieldPtr F = j.contains("field") ? field_from_json(j["field"]) : fallback;
	if (!F)
		throw JsonError("complex has no embedded field and no --field was given");
	PolyComplex x(F);
	for (auto &p : j["points"])
		x.points.push_back(point_from_json(p, F));
	for (auto &c : j["cells"]) {
		std::vector<int> verts;
		for (auto &v : c.at("vertices")) {
			int id = v.get<int>();
			if (id < 0 || (size_t)id >= x.points.size())
				throw JsonError("cell vertex id out of range");
			verts.push_back(id);
		}
		std::string label = c.contains("label") ? c["label"].get<std::string>() : "";
		x.add_cell(std::move(verts), std::move(label));
	}
	return x;
}

/* ---------- triangulations and decompositions ---------- */

inline Json triangulation_to_json(const Triangulation &t)
{
	Json j;
	j["field"] = field_to_json(t.F);
	Json pts = Json::array();
	for (auto &p : t.points)
		pts.push_back(point_to_json(p));
	j["points"] = pts;
	Json cells = Json::array();
	for (size_t i = 0; i < t.cells.size(); i++) {
		Json jc;
		jc["vertices"] = t.cells[i];
		jc["index"] = t.indices[i].get_str();
		cells.push_back(jc);
	}
	j["cells"] = cells;
	j["max_index"] = t.max_index.get_str();
	if (t.lift) {
		Json jl;
		Json lp = Json::array(), lv = Json::array();
		for (size_t i = 0; i < t.lift->pts.size(); i++) {
			lp.push_back(point_to_json(t.lift->pts[i]));
			lv.push_back(rat_to_string(t.lift->vals[i]));
		}
		jl["points"] = lp;
		jl["values"] = lv;
		j["lift"] = jl;
	}
	return j;
}

inline Json decomposition_to_json(const Decomposition &dec, const Int &index)
{
	Json j;
	Json betas = Json::array();
	for (auto &b : dec.betas)
		betas.push_back(scalar_to_json(b));
	j["betas"] = betas;
	Json summands = Json::array();
	for (auto &s : dec.summands)
		summands.push_back(polytope_to_json(s, false));
	j["summands"] = summands;
	j["index"] = index.get_str();
	return j;
}

} // namespace zv
