/* SPDX-License-Identifier: Apache-2.0 */

#include <zv/json_io.hpp>
#include <zv/polystable.hpp>
#include <zv/svg.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace zv;

namespace {

Json read_json(const std::string &path)
{
	std::ifstream in(path);
	if (!in)
		throw JsonError("cannot open " + path);
	try {
		return Json::parse(in);
	} catch (const nlohmann::json::parse_error &e) {
		throw JsonError(path + ": " + e.what());
	}
}

void write_text(const std::string &path, const std::string &body)
{
	std::ofstream out(path);
	if (!out)
		throw JsonError("cannot write " + path);
	out << body;
}

void write_json(const std::string &path, const Json &j)
{
	write_text(path, j.dump(2) + "\n");
}

FieldPtr load_field(const std::string &path)
{
	if (path.empty())
		return nullptr;
	return field_from_json(read_json(path));
}

/* All scalars in one run must share a single Field instance. The first file
 * seen (or --field) fixes it; later files may embed the same spec but are
 * re-read against the shared instance. */
Json strip_field(Json j, FieldPtr &F)
{
	if (j.contains("field")) {
		if (!F)
			F = field_from_json(j["field"]);
		else if (field_to_json(F) != j["field"])
			throw JsonError("inputs use different field specs");
		j.erase("field");
	}
	return j;
}

VPolytope load_polytope(const std::string &path, FieldPtr &F)
{
	Json j = strip_field(read_json(path), F);
	return polytope_from_json(j, F);
}

/* Either an embedded polytope or a whole complex, normalized to a complex. */
PolyComplex load_complex(const std::string &path, FieldPtr &F)
{
	Json j = strip_field(read_json(path), F);
	if (j.contains("cells"))
		return complex_from_json(j, F);
	VPolytope p = polytope_from_json(j, F);
	PolyComplex x(p.F);
	x.add_cell(p);
	return x;
}

Json cell_report(const PolyComplex &x)
{
	Json cells = Json::array();
	for (size_t i = 0; i < x.cells.size(); i++) {
		const VPolytope &p = x.cell_polytope(i);
		Json jc;
		jc["vertices"] = (int)p.vertices.size();
		jc["dim"] = p.dim;
		jc["polystable"] = is_polystable_cell(p);
		try {
			jc["index"] = cell_index(p).get_str();
		} catch (const std::invalid_argument &) {
			jc["index"] = nullptr;
		}
		cells.push_back(jc);
	}
	return cells;
}

Int max_cell_index(const PolyComplex &x)
{
	Int mx = 1;
	for (size_t i : x.top_cells())
		try {
			Int ix = cell_index(x.cell_polytope(i));
			if (ix > mx)
				mx = ix;
		} catch (const std::invalid_argument &) {
		}
	return mx;
}

struct CheckFailed : std::runtime_error {
	using std::runtime_error::runtime_error;
};

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"exact (Z,V)-polytope decomposition and subdivision toolkit"};
	app.require_subcommand(1);
	app.fallthrough();

	std::string field_path, report_path;
	std::uint64_t seed = 0;
	int max_sweeps = 32;
	app.add_option("--field", field_path, "field spec JSON used when inputs omit one");
	app.add_option("--seed", seed, "seed for all pseudo-random choices");
	app.add_option("--max-sweeps", max_sweeps, "index-reduction sweep budget");
	app.add_option("--report", report_path, "write a machine-readable report here");

	std::string in_path, out_path, against_path, mode = "polystable", tri = "";
	std::vector<std::string> in_paths, checks;
	bool regular = false;

	auto *dec = app.add_subcommand("decompose", "rational Minkowski decomposition");
	dec->add_option("--input", in_path)->required();
	dec->add_option("--output", out_path)->required();

	auto *sub = app.add_subcommand("subdivide", "subdivide one polytope");
	sub->add_option("--input", in_path)->required();
	sub->add_option("--mode", mode)->check(CLI::IsMember({"polysimplicial", "polystable"}));
	sub->add_flag("--regular", regular, "also certify a regular inducing lift");
	sub->add_option("--output", out_path)->required();

	auto *ref = app.add_subcommand("refine", "refine a complex to polystable cells");
	ref->add_option("--input", in_path)->required();
	ref->add_flag("--regular", regular, "also certify a regular inducing lift");
	ref->add_option("--output", out_path)->required();

	auto *cay = app.add_subcommand("cayley", "Cayley polytope and triangulations");
	cay->add_option("--inputs", in_paths)->required()->expected(-1);
	cay->add_option("--triangulate", tri)->check(CLI::IsMember({"clex"}));
	cay->add_option("--output", out_path)->required();

	auto *ver = app.add_subcommand("verify", "re-check a produced artifact");
	ver->add_option("--input", in_path)->required();
	ver->add_option("--against", against_path);
	ver->add_option("--check", checks)->delimiter(',')->expected(-1);

	auto *plt = app.add_subcommand("plot", "SVG rendering, ambient_dim <= 2");
	plt->add_option("--input", in_path)->required();
	plt->add_option("--output", out_path)->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		int r = app.exit(e);
		return r == 0 ? 0 : 2;
	}

	Json report;
	report["seed"] = seed;
	auto t0 = std::chrono::steady_clock::now();
	int code = 0;
	try {
		FieldPtr F = load_field(field_path);

		if (dec->parsed()) {
			VPolytope p = load_polytope(in_path, F);
			Decomposition d = minkowski_decompose(p);
			for (auto &s : d.summands)
				for (auto &v : s.vertices)
					for (auto &c : v)
						if (!p.F->v_coords(c))
							throw CheckFailed("summand not in V");
			std::vector<VPolytope> parts;
			for (size_t i = 0; i < d.summands.size(); i++)
				parts.push_back(dilate(d.summands[i], d.betas[i]));
			VPolytope back = parts.empty() ? p : minkowski_sum(parts);
			bool same = back.vertices.size() == p.vertices.size();
			for (size_t i = 0; same && i < p.vertices.size(); i++)
				same = point_eq(back.vertices[i], p.vertices[i]);
			if (!same)
				throw CheckFailed("decomposition does not recompose");
			Int idx;
			try {
				idx = splitting_index(p, d.summands);
			} catch (const std::invalid_argument &) {
				/* not a genuine splitting: index of the joint summand
				 * direction lattice in the lattice of p */
				IMat gens;
				for (auto &s : d.summands)
					for (auto &row : span_lattice(s))
						gens.push_back(row);
				auto j = lattice_index(gens, p.ambient_dim, false);
				idx = j ? *j : Int(0);
			}
			write_json(out_path, decomposition_to_json(d, idx));
			report["summands"] = (int)d.summands.size();
			report["index"] = idx.get_str();
			std::cout << "decomposed into " << d.summands.size()
			          << " rational summands, splitting index " << idx << "\n";
		} else if (sub->parsed() || ref->parsed()) {
			PolyComplex x = load_complex(in_path, F);
			Int before = max_cell_index(x);
			PolyComplex y = sub->parsed() && mode == "polysimplicial"
			                    ? polysimplicial_subdivide(x.cell_polytope(0), seed)
			                    : polystable_refine_complex(x, seed, max_sweeps);
			std::optional<ScalarLift> lift;
			if (regular) {
				auto rr = regular_polystable_refinement(x, seed);
				y = rr.first;
				lift = rr.second;
			}
			/* re-verify the output before claiming success */
			if (!validate(y).ok())
				throw CheckFailed("output failed complex validation");
			if (!refines(y, x))
				throw CheckFailed("output does not refine the input");
			if ((ref->parsed() || mode == "polystable") && !regular)
				for (size_t i : y.top_cells())
					if (!is_polystable_cell(y.cell_polytope(i)))
						throw CheckFailed("non-polystable output cell");
			if (lift && !is_induced_by(y, *lift))
				throw CheckFailed("lift does not induce the output");
			write_json(out_path, complex_to_json(y));
			report["cells"] = cell_report(y);
			report["index_trajectory"] = {before.get_str(),
			                              max_cell_index(y).get_str()};
			std::cout << "produced " << y.cells.size() << " cells, max index "
			          << before << " -> " << max_cell_index(y) << "\n";
		} else if (cay->parsed()) {
			std::vector<VPolytope> ps;
			for (auto &path : in_paths) {
				ps.push_back(load_polytope(path, F));
			}
			if (ps.empty())
				throw JsonError("cayley needs at least one input");
			if (tri == "clex") {
				Triangulation t = clex_triangulation(ps, minkowski_sum(ps));
				write_json(out_path, triangulation_to_json(t));
				report["cells"] = (int)t.cells.size();
				report["max_index"] = t.max_index.get_str();
				std::cout << "clex triangulation: " << t.cells.size()
				          << " cells, max index " << t.max_index << "\n";
			} else {
				VPolytope c = cayley(ps).poly;
				write_json(out_path, polytope_to_json(c));
				std::cout << "Cayley polytope with " << c.vertices.size()
				          << " vertices\n";
			}
		} else if (ver->parsed()) {
			PolyComplex x = load_complex(in_path, F);
			if (checks.empty())
				checks = {"subdivision"};
			Json results;
			for (auto &ck : checks) {
				bool ok;
				if (ck == "subdivision") {
					ok = validate(x).ok();
					if (ok && !against_path.empty())
						ok = refines(x, load_complex(against_path, F));
				} else if (ck == "polystable") {
					ok = true;
					for (size_t i : x.top_cells())
						ok = ok && is_polystable_cell(x.cell_polytope(i));
				} else if (ck == "regular") {
					ok = find_zv_inducing_lift(x).has_value();
				} else {
					throw JsonError("unknown check: " + ck);
				}
				results[ck] = ok;
				std::cout << ck << ": " << (ok ? "pass" : "fail") << "\n";
				if (!ok)
					code = 1;
			}
			report["checks"] = results;
		} else if (plt->parsed()) {
			PolyComplex x = load_complex(in_path, F);
			write_text(out_path, plot_svg(x));
			std::cout << "wrote " << out_path << "\n";
		}
	} catch (const CheckFailed &e) {
		std::cerr << "check failed: " << e.what() << "\n";
		code = 1;
	} catch (const BudgetExhausted &e) {
		std::cerr << "sweep budget exhausted, best max index " << e.max_index << "\n";
		code = 1;
	} catch (const JsonError &e) {
		std::cerr << "input error: " << e.what() << "\n";
		code = 2;
	} catch (const std::invalid_argument &e) {
		std::cerr << "input error: " << e.what() << "\n";
		code = 2;
	} catch (const std::exception &e) {
		std::cerr << "error: " << e.what() << "\n";
		code = 1;
	}

	auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
	              std::chrono::steady_clock::now() - t0)
	              .count();
	report["exit_code"] = code;
	report["elapsed_ms"] = ms;
	if (!report_path.empty())
		write_json(report_path, report);
	std::cout << "done in " << ms << " ms, exit " << code << "\n";
	return code;
}
