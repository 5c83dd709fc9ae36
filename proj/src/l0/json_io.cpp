#include "json_io.hpp"

#include <charconv>
#include <random>

#include <json.hpp>

#include "project.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace l0::io {

std::string fmt_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

const json& need(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(path, std::string("missing field '") + key + "'");
    return j.at(key);
}

std::string need_string(const json& j, const char* key, const std::string& path) {
    const json& v = need(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Rat parse_rat(const json& j, Arith mode, const std::string& path) {
    if (j.is_number_integer()) return Rat(j.get<long>());
    if (j.is_string()) {
        try {
            return rat_from_string(j.get<std::string>());
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }
    if (j.is_number_float()) {
        if (mode == Arith::rational)
            fail(path, "raw float under rational arithmetic; write it as \"p/q\" or select the float backend");
        return rat_from_double(j.get<double>());
    }
    fail(path, "expected a number or a \"p/q\" string");
}

double parse_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

/// Per-atom point list: one row of dim coordinates per atom.
Vector<Rat> parse_l0vector(const json& j, const SpacePtr& sp, std::size_t dim, Arith mode,
                           const std::string& path) {
    const std::size_t K = sp->atom_count();
    if (!j.is_array() || j.size() != K)
        fail(path, "expected one coordinate row per atom (" + std::to_string(K) + " rows)");
    std::size_t d = dim;
    std::vector<Rat> data;
    for (std::size_t a = 0; a < K; ++a) {
        const json& row = j[a];
        if (!row.is_array() || row.empty()) fail(path + "[" + std::to_string(a) + "]", "expected a coordinate array");
        if (d == 0) d = row.size();
        if (row.size() != d)
            fail(path + "[" + std::to_string(a) + "]", "expected " + std::to_string(d) + " coordinates");
        for (std::size_t i = 0; i < d; ++i)
            data.push_back(parse_rat(row[i], mode, path + "[" + std::to_string(a) + "][" + std::to_string(i) + "]"));
    }
    return Vector<Rat>(sp, d, std::move(data));
}

/// Per-atom scalar: a bare value broadcasts to every atom.
Scalar<Rat> parse_l0scalar(const json& j, const SpacePtr& sp, Arith mode, const std::string& path) {
    const std::size_t K = sp->atom_count();
    std::vector<Rat> v;
    if (j.is_array()) {
        if (j.size() != K) fail(path, "expected one value per atom (" + std::to_string(K) + ")");
        for (std::size_t a = 0; a < K; ++a) v.push_back(parse_rat(j[a], mode, path + "[" + std::to_string(a) + "]"));
    } else {
        v.assign(K, parse_rat(j, mode, path));
    }
    return Scalar<Rat>(sp, std::move(v));
}

SpacePtr parse_space(const json& problem, Arith mode) {
    const json& sp = need(problem, "space", "problem");
    const json& w = need(sp, "weights", "space");
    if (!w.is_array() || w.empty()) fail("space.weights", "expected a nonempty array");
    std::vector<Rat> weights;
    for (std::size_t i = 0; i < w.size(); ++i)
        weights.push_back(parse_rat(w[i], mode, "space.weights[" + std::to_string(i) + "]"));
    return Space::make(std::move(weights), mode == Arith::rational);
}

Domain parse_domain(const json& problem, const SpacePtr& sp, Arith mode) {
    const json& d = need(problem, "domain", "problem");
    std::string type = need_string(d, "type", "domain");
    if (type == "simplex") {
        const json& vs = need(d, "vertices", "domain");
        if (!vs.is_array() || vs.empty()) fail("domain.vertices", "expected a nonempty vertex array");
        std::vector<Vector<Rat>> verts;
        std::size_t dim = 0;
        for (std::size_t jv = 0; jv < vs.size(); ++jv) {
            verts.push_back(parse_l0vector(vs[jv], sp, dim, mode, "domain.vertices[" + std::to_string(jv) + "]"));
            dim = verts.back().dim();
        }
        return Domain::simplex(Simplex::make(std::move(verts)));
    }
    if (type == "ball") {
        Vector<Rat> center = parse_l0vector(need(d, "center", "domain"), sp, 0, mode, "domain.center");
        Scalar<Rat> radius = parse_l0scalar(need(d, "radius", "domain"), sp, mode, "domain.radius");
        return Domain::ball(Ball(std::move(center), std::move(radius)));
    }
    fail("domain.type", "expected 'simplex' or 'ball'");
}

AtomwiseMap parse_map(const json& problem, Domain domain, Arith mode) {
    const json& m = need(problem, "map", "problem");
    std::string family = need_string(m, "family", "map");
    const SpacePtr& sp = domain.space();
    const std::size_t K = sp->atom_count();
    const std::size_t d = domain.dim();

    if (family == "constant")
        return AtomwiseMap::constant(std::move(domain),
                                     parse_l0vector(need(m, "value", "map"), sp, d, mode, "map.value"));

    if (family == "affine") {
        const json& mats = need(m, "matrix", "map");
        if (!mats.is_array() || mats.size() != K) fail("map.matrix", "expected one matrix per atom");
        std::vector<Mat<Rat>> matrix;
        for (std::size_t a = 0; a < K; ++a) {
            const json& ma = mats[a];
            std::string pa = "map.matrix[" + std::to_string(a) + "]";
            if (!ma.is_array() || ma.size() != d) fail(pa, "expected " + std::to_string(d) + " rows");
            Mat<Rat> A(d, d);
            for (std::size_t r = 0; r < d; ++r) {
                if (!ma[r].is_array() || ma[r].size() != d)
                    fail(pa + "[" + std::to_string(r) + "]", "expected " + std::to_string(d) + " entries");
                for (std::size_t c = 0; c < d; ++c)
                    A.at(r, c) = parse_rat(ma[r][c], mode,
                                           pa + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
            }
            matrix.push_back(std::move(A));
        }
        Vector<Rat> offset = parse_l0vector(need(m, "offset", "map"), sp, d, mode, "map.offset");
        return AtomwiseMap::affine(std::move(domain), std::move(matrix), std::move(offset));
    }

    if (family == "contraction-to-point") {
        Scalar<Rat> t = parse_l0scalar(need(m, "t", "map"), sp, mode, "map.t");
        Vector<Rat> target = parse_l0vector(need(m, "target", "map"), sp, d, mode, "map.target");
        return AtomwiseMap::contraction_to_point(std::move(domain), std::move(t), std::move(target));
    }

    if (family == "rotation") {
        const json& ang = need(m, "angle", "map");
        std::vector<double> angle;
        if (ang.is_array()) {
            if (ang.size() != K) fail("map.angle", "expected one angle per atom");
            for (std::size_t a = 0; a < K; ++a)
                angle.push_back(parse_double(ang[a], "map.angle[" + std::to_string(a) + "]"));
        } else {
            angle.assign(K, parse_double(ang, "map.angle"));
        }
        return AtomwiseMap::rotation(std::move(domain), std::move(angle));
    }

    if (family == "coordinate-permutation") {
        const json& p = need(m, "perm", "map");
        if (!p.is_array() || p.empty()) fail("map.perm", "expected a permutation array");
        std::vector<std::vector<int>> perm;
        auto one = [&](const json& row, const std::string& pa) {
            if (!row.is_array() || row.empty()) fail(pa, "expected an array of 1-based indices");
            std::vector<int> out;
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (!row[i].is_number_integer()) fail(pa + "[" + std::to_string(i) + "]", "expected an integer");
                out.push_back(row[i].get<int>());
            }
            return out;
        };
        if (p[0].is_array()) {
            if (p.size() != K) fail("map.perm", "expected one permutation per atom");
            for (std::size_t a = 0; a < K; ++a) perm.push_back(one(p[a], "map.perm[" + std::to_string(a) + "]"));
        } else {
            perm.assign(K, one(p, "map.perm"));
        }
        return AtomwiseMap::coordinate_permutation(std::move(domain), std::move(perm));
    }

    fail("map.family", "unknown family '" + family + "'");
}

struct Config {
    Arith mode = Arith::rational;
    double epsilon = 1e-4;
    std::size_t max_iter = 256;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    bool want_trace = false;
    int depth = 1;
    bool enumerate_all = false;
    std::size_t verify_samples = 0;
};

Arith parse_arith(const std::string& s, const std::string& path) {
    if (s == "rational") return Arith::rational;
    if (s == "float") return Arith::floating;
    fail(path, "expected 'rational' or 'float'");
}

template <class T>
T parse_uint_string(const std::string& s, const std::string& path) {
    T out{};
    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(path, "expected a nonnegative integer");
    return out;
}

double parse_double_string(const std::string& s, const std::string& path) {
    double out = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) fail(path, "expected a number");
    return out;
}

bool parse_bool_string(const std::string& s, const std::string& path) {
    if (s == "1" || s == "true" || s == "on") return true;
    if (s == "0" || s == "false" || s == "off") return false;
    fail(path, "expected a boolean");
}

Config read_config(const json& problem, const std::map<std::string, std::string>& overrides) {
    Config c;
    if (problem.contains("solver")) {
        const json& s = problem.at("solver");
        if (!s.is_object()) fail("solver", "expected an object");
        if (s.contains("arithmetic")) c.mode = parse_arith(s.at("arithmetic").get<std::string>(), "solver.arithmetic");
        if (s.contains("epsilon")) c.epsilon = parse_double(s.at("epsilon"), "solver.epsilon");
        if (s.contains("max_iter")) {
            if (!s.at("max_iter").is_number_integer() || s.at("max_iter").get<long>() < 0)
                fail("solver.max_iter", "expected a nonnegative integer");
            c.max_iter = s.at("max_iter").get<std::size_t>();
        }
        if (s.contains("threads")) c.threads = s.at("threads").get<unsigned>();
        if (s.contains("seed")) c.seed = s.at("seed").get<std::uint64_t>();
        if (s.contains("depth")) c.depth = s.at("depth").get<int>();
    }
    for (const auto& [key, value] : overrides) {
        if (key == "arith")
            c.mode = parse_arith(value, "arith");
        else if (key == "epsilon")
            c.epsilon = parse_double_string(value, "epsilon");
        else if (key == "max-iter")
            c.max_iter = parse_uint_string<std::size_t>(value, "max-iter");
        else if (key == "threads")
            c.threads = parse_uint_string<unsigned>(value, "threads");
        else if (key == "seed")
            c.seed = parse_uint_string<std::uint64_t>(value, "seed");
        else if (key == "trace")
            c.want_trace = parse_bool_string(value, "trace");
        else if (key == "depth")
            c.depth = static_cast<int>(parse_uint_string<unsigned>(value, "depth"));
        else if (key == "enumerate-all")
            c.enumerate_all = parse_bool_string(value, "enumerate-all");
        else if (key == "verify-samples")
            c.verify_samples = parse_uint_string<std::size_t>(value, "verify-samples");
        else
            fail(key, "unknown option");
    }
    return c;
}

std::string render_rat(const Rat& r, Arith mode) {
    return mode == Arith::rational ? rat_to_string(r) : fmt_double(rat_to_double(r));
}

ordered_json render_vector(const Vector<Rat>& v, Arith mode) {
    ordered_json out = ordered_json::array();
    for (std::size_t a = 0; a < v.atom_count(); ++a) {
        ordered_json row = ordered_json::array();
        for (std::size_t i = 0; i < v.dim(); ++i) row.push_back(render_rat(v.at(a, i), mode));
        out.push_back(std::move(row));
    }
    return out;
}

ordered_json render_scalar(const Scalar<Rat>& s, Arith mode) {
    ordered_json out = ordered_json::array();
    for (std::size_t a = 0; a < s.atom_count(); ++a) out.push_back(render_rat(s.at(a), mode));
    return out;
}

ordered_json render_simplex(const Simplex& s, Arith mode) {
    ordered_json out = ordered_json::array();
    for (std::size_t j = 0; j < s.order(); ++j) out.push_back(render_vector(s.vertex(j), mode));
    return out;
}

TaskResult run_solve_task(const json& problem, const Config& cfg) {
    SpacePtr sp = parse_space(problem, cfg.mode);
    Domain dom = parse_domain(problem, sp, cfg.mode);
    bool is_ball = dom.is_ball();
    AtomwiseMap f = parse_map(problem, dom, cfg.mode);
    SolveOptions opts{cfg.epsilon, cfg.max_iter, cfg.mode, cfg.threads, cfg.want_trace};
    SolveOutcome out = is_ball ? solve_on_convex(f.domain().as_ball(), f, opts)
                               : solve_on_simplex(f.domain().as_simplex(), f, opts);

    const std::size_t K = sp->atom_count();
    ordered_json rep;
    rep["schema"] = 1;
    rep["task"] = "solve";
    rep["arithmetic"] = arith_name(cfg.mode);
    rep["status"] = out.converged ? "converged" : "max-iter";
    rep["epsilon"] = fmt_double(cfg.epsilon);
    rep["max_iter"] = cfg.max_iter;
    rep["atoms"] = K;
    rep["domain"] = is_ball ? "ball" : "simplex";
    rep["map"] = f.family();
    rep["fixed_point"] = render_vector(out.fixed_point, cfg.mode);
    {
        ordered_json res = ordered_json::array();
        for (std::size_t a = 0; a < K; ++a) res.push_back(fmt_double(out.residual.at(a)));
        rep["residual"] = std::move(res);
    }
    if (out.residual_sq) rep["residual_sq"] = render_scalar(*out.residual_sq, Arith::rational);
    rep["iterations"] = out.iterations;
    {
        ordered_json conv = ordered_json::array();
        for (std::uint8_t c : out.converged_atoms) conv.push_back(c != 0);
        rep["converged_atoms"] = std::move(conv);
    }
    {
        Scalar<double> dia = out.final_simplex.diameter();
        ordered_json fd = ordered_json::array();
        for (std::size_t a = 0; a < K; ++a) fd.push_back(fmt_double(dia.at(a)));
        rep["final_diameter"] = std::move(fd);
    }

    TaskResult result;
    result.hit_max_iter = !out.converged;
    if (cfg.want_trace) {
        ordered_json tr;
        tr["schema"] = 1;
        tr["task"] = "solve-trace";
        tr["arithmetic"] = arith_name(cfg.mode);
        ordered_json levels = ordered_json::array();
        for (const TraceLevel& lv : out.trace.levels) {
            ordered_json l;
            l["diameter_sq"] = render_scalar(lv.diameter_sq, cfg.mode);
            l["cells"] = lv.cell_of_atom;
            l["simplex"] = render_simplex(lv.simplex, cfg.mode);
            levels.push_back(std::move(l));
        }
        tr["levels"] = std::move(levels);
        tr["final_simplex"] = render_simplex(out.final_simplex, cfg.mode);
        result.trace = tr.dump(2) + "\n";
    }
    result.report = rep.dump(2) + "\n";
    return result;
}

TaskResult run_sperner_task(const json& problem, const Config& cfg) {
    SpacePtr sp = parse_space(problem, cfg.mode);
    Domain dom = parse_domain(problem, sp, cfg.mode);
    if (!dom.is_simplex()) throw ValidationError("sperner tasks need a simplex domain");
    const Simplex& s = dom.as_simplex();

    std::string kind = "barycentric";
    if (problem.contains("subdivision")) {
        const json& sd = problem.at("subdivision");
        if (sd.contains("kind")) kind = sd.at("kind").get<std::string>();
    }
    SubdivisionPtr sub;
    if (kind == "barycentric")
        sub = barycentric_subdivision(s);
    else if (kind == "midpoint")
        sub = midpoint_subdivision(s);
    else
        fail("subdivision.kind", "expected 'barycentric' or 'midpoint'");

    const std::size_t n = sub->order();
    const std::size_t R = sub->registry_size();
    const std::size_t K = sp->atom_count();

    ordered_json rep;
    rep["schema"] = 1;
    rep["task"] = "sperner";
    rep["atoms"] = K;
    rep["order"] = n;
    rep["subdivision"] = {{"kind", kind}, {"cells", sub->cell_count()}, {"registry", R}};

    if (cfg.enumerate_all) {
        if (n > 3) throw ValidationError("enumerate-all supports at most 3 vertices");
        std::vector<std::vector<int>> choices(R);
        for (std::uint32_t vid = 0; vid < R; ++vid) choices[vid] = sub->chi(vid);
        std::vector<std::size_t> idx(R, 0);
        std::vector<int> labels(R);
        std::size_t total = 0;
        std::map<std::size_t, std::size_t> histogram;
        bool all_odd = true;
        bool done = false;
        while (!done) {
            for (std::uint32_t vid = 0; vid < R; ++vid) labels[vid] = choices[vid][idx[vid]];
            std::size_t count = completely_labeled_cells(*sub, labels).size();
            ++histogram[count];
            ++total;
            if (count % 2 == 0) all_odd = false;
            std::size_t pos = 0;
            while (pos < R && ++idx[pos] == choices[pos].size()) {
                idx[pos] = 0;
                ++pos;
            }
            done = pos == R;
        }
        rep["mode"] = "enumerate-all";
        rep["labelings"] = total;
        rep["all_odd"] = all_odd;
        ordered_json hist;
        for (const auto& [count, times] : histogram) hist[std::to_string(count)] = times;
        rep["completely_labeled_histogram"] = std::move(hist);
        return TaskResult{rep.dump(2) + "\n", std::nullopt, false};
    }

    const json& lab = need(problem, "labeling", "problem");
    const json& entries = need(lab, "labels", "labeling");
    if (!entries.is_object()) fail("labeling.labels", "expected an object keyed by registry vertex id");
    std::vector<std::vector<int>> labels(R, std::vector<int>(K, 0));
    std::vector<bool> seen(R, false);
    for (const auto& [key, value] : entries.items()) {
        std::size_t vid = 0;
        auto r = std::from_chars(key.data(), key.data() + key.size(), vid);
        if (r.ec != std::errc() || r.ptr != key.data() + key.size() || vid >= R)
            fail("labeling.labels", "key '" + key + "' is not a registry vertex id");
        if (!value.is_array() || value.size() != K)
            fail("labeling.labels." + key, "expected one label per atom (" + std::to_string(K) + ")");
        for (std::size_t a = 0; a < K; ++a) {
            if (!value[a].is_number_integer()) fail("labeling.labels." + key, "labels must be integers");
            labels[vid][a] = value[a].get<int>();
        }
        seen[vid] = true;
    }
    for (std::uint32_t vid = 0; vid < R; ++vid)
        if (!seen[vid]) fail("labeling.labels", "missing registry vertex " + std::to_string(vid));

    L0Labeling phi(sub, std::move(labels));
    if (auto v = phi.properness_violation())
        throw ValidationError("labeling improper at vertex " + std::to_string(v->vertex) + ", atom " +
                              std::to_string(v->atom) + ": label " + std::to_string(v->label) +
                              " is outside the vertex support");

    SpernerSearchResult r = sperner_search(phi);
    const std::size_t M = r.decomposition.parts.size();
    rep["parts"] = M;
    {
        std::vector<std::size_t> part_of_atom(K);
        for (std::size_t a = 0; a < K; ++a) part_of_atom[a] = r.decomposition.partition.part_of_atom(a);
        rep["part_of_atom"] = part_of_atom;
    }
    {
        ordered_json parts = ordered_json::array();
        for (std::size_t m = 0; m < M; ++m) {
            const ClassicalLabeling& psi = r.decomposition.parts[m];
            std::vector<std::size_t> cl = enumerate_completely_labeled(psi);
            ordered_json p;
            p["labels"] = psi.labels();
            p["completely_labeled"] = cl;
            p["count"] = cl.size();
            p["odd"] = cl.size() % 2 == 1;
            p["chosen_cell"] = r.cell_of_part[m];
            p["vertices"] = r.vertices_of_part[m];
            parts.push_back(std::move(p));
        }
        rep["classical"] = std::move(parts);
    }
    {
        ordered_json cat;
        cat["assignment"] = r.assignment;
        cat["vertices"] = render_simplex(r.simplex, Arith::rational);
        rep["concatenated"] = std::move(cat);
    }
    return TaskResult{rep.dump(2) + "\n", std::nullopt, false};
}

TaskResult run_subdivide_task(const json& problem, const Config& cfg) {
    SpacePtr sp = parse_space(problem, cfg.mode);
    Domain dom = parse_domain(problem, sp, cfg.mode);
    if (!dom.is_simplex()) throw ValidationError("subdivide tasks need a simplex domain");
    const Simplex& s = dom.as_simplex();
    if (cfg.depth < 1) throw ValidationError("depth must be at least 1");
    const std::size_t n = s.order();
    const std::size_t K = sp->atom_count();

    std::vector<SubdivisionLevel> levels = iterated_barycentric(s, cfg.depth);
    levels.erase(levels.begin());  // level 0 is the unrefined simplex; the report covers refinements
    Rat ratio_sq = n >= 2 ? Rat(Rat(n - 1) * Rat(n - 1)) / Rat(Rat(n) * Rat(n)) : Rat(0);

    ordered_json rep;
    rep["schema"] = 1;
    rep["task"] = "subdivide";
    rep["atoms"] = K;
    rep["order"] = n;
    rep["depth"] = cfg.depth;
    rep["ratio_sq"] = rat_to_string(ratio_sq);
    {
        ordered_json counts = ordered_json::array(), regs = ordered_json::array();
        ordered_json dsq = ordered_json::array(), certified = ordered_json::array();
        Scalar<Rat> prev = s.diameter_sq();
        rep["parent_diameter_sq"] = render_scalar(prev, Arith::rational);
        for (const SubdivisionLevel& lv : levels) {
            counts.push_back(lv.cells.size());
            regs.push_back(lv.registry.size());
            dsq.push_back(render_scalar(lv.max_diameter_sq, Arith::rational));
            bool ok = true;
            for (std::size_t a = 0; a < K; ++a)
                if (lv.max_diameter_sq.at(a) > Rat(ratio_sq * prev.at(a))) ok = false;
            certified.push_back(ok);
            prev = lv.max_diameter_sq;
        }
        rep["cells"] = std::move(counts);
        rep["registry"] = std::move(regs);
        rep["max_diameter_sq"] = std::move(dsq);
        rep["contraction_certified"] = std::move(certified);
    }

    if (cfg.verify_samples > 0) {
        // Random containment probe: sampled points of the simplex must land in
        // at least one leaf cell at every atom. The seed feeds only this.
        const SubdivisionLevel& leaf = levels.back();
        std::vector<Simplex> cells;
        std::vector<BarycentricSolver> solvers;
        cells.reserve(leaf.cells.size());
        for (const auto& cell : leaf.cells) {
            std::vector<Vector<Rat>> verts;
            for (std::uint32_t vid : cell) verts.push_back(leaf.registry[vid]);
            cells.push_back(Simplex::make(std::move(verts)));
            solvers.emplace_back(cells.back());
        }
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<int> pick(0, 8);
        bool cover_ok = true;
        for (std::size_t t = 0; t < cfg.verify_samples && cover_ok; ++t) {
            std::vector<long> w(n, 0);
            long total = 0;
            while (total == 0) {
                for (std::size_t j = 0; j < n; ++j) {
                    w[j] = pick(rng);
                    total += w[j];
                }
            }
            std::vector<Rat> data(K * s.dim(), Rat(0));
            for (std::size_t j = 0; j < n; ++j) {
                if (w[j] == 0) continue;
                Rat frac(w[j], total);
                frac.canonicalize();
                for (std::size_t a = 0; a < K; ++a)
                    for (std::size_t i = 0; i < s.dim(); ++i)
                        data[a * s.dim() + i] += frac * s.vertex(j).at(a, i);
            }
            Vector<Rat> x(sp, s.dim(), std::move(data));
            for (std::size_t a = 0; a < K && cover_ok; ++a) {
                bool found = false;
                for (std::size_t c = 0; c < cells.size() && !found; ++c) {
                    auto coords = solvers[c].affine_at(a, x.row(a));
                    if (!coords) continue;
                    found = true;
                    for (const Rat& l : *coords)
                        if (sgn(l) < 0) found = false;
                }
                cover_ok = found;
            }
        }
        rep["verify_samples"] = cfg.verify_samples;
        rep["cover_ok"] = cover_ok;
    }

    TaskResult result;
    if (cfg.want_trace) {
        ordered_json tr;
        tr["schema"] = 1;
        tr["task"] = "subdivide-trace";
        ordered_json lvls = ordered_json::array();
        for (const SubdivisionLevel& lv : levels) {
            ordered_json l;
            ordered_json reg = ordered_json::array();
            for (const Vector<Rat>& p : lv.registry) reg.push_back(render_vector(p, Arith::rational));
            l["registry"] = std::move(reg);
            l["cells"] = lv.cells;
            l["max_diameter_sq"] = render_scalar(lv.max_diameter_sq, Arith::rational);
            lvls.push_back(std::move(l));
        }
        tr["levels"] = std::move(lvls);
        result.trace = tr.dump(2) + "\n";
    }
    result.report = rep.dump(2) + "\n";
    return result;
}

}  // namespace

TaskResult run_task(Task task, const std::string& problem_text,
                    const std::map<std::string, std::string>& overrides) {
    json problem;
    try {
        problem = json::parse(problem_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("problem JSON: ") + e.what());
    }
    if (!problem.is_object()) throw ValidationError("problem JSON: expected an object");
    const json& schema = need(problem, "schema", "problem");
    if (!schema.is_number_integer() || schema.get<long>() != 1)
        throw ValidationError("schema: this build reads schema 1");
    Config cfg = read_config(problem, overrides);
    switch (task) {
        case Task::solve: return run_solve_task(problem, cfg);
        case Task::sperner: return run_sperner_task(problem, cfg);
        case Task::subdivide: return run_subdivide_task(problem, cfg);
    }
    throw Error("unreachable task dispatch");
}

}  // namespace l0::io
