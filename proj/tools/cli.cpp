#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pvar/approx.hpp"
#include "pvar/extras.hpp"
#include "pvar/io.hpp"
#include "pvar/odsolve.hpp"
#include "pvar/polyfam.hpp"
#include "pvar/uncorrelate.hpp"

namespace pvar::cli {

namespace {

using Json = nlohmann::ordered_json;

struct JobSpec {
    std::string command;
    std::string weight = "uniform";
    std::vector<std::string> weight_params;
    std::vector<std::string> interval{"0", "1"};
    std::string csv;
    std::string z = "ones";
    std::string p = "1";
    long degree = 2;
    std::string target;
    std::string backend = "rational";
    std::string format = "json";
    std::string out;
    std::string family;
    std::vector<std::string> family_params;
    std::string matrix, rhs;
    std::vector<std::string> nodes;
    std::string suite = "all";
    std::string reingest;
};

struct Output {
    Json inputs = Json::object();
    Json coefficients = Json::array();
    Json residual_var_p = nullptr;
    Json residual_ls = nullptr;
    Json diagnostics = Json::object();
    bool failed = false;
};

template <class T>
Json jv(const T& v) {
    if constexpr (num<T>::exact) {
        return num<T>::str(v);
    } else {
        return v;
    }
}

template <class T>
Json jvec(const std::vector<T>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(jv(x));
    return a;
}

template <class T>
Json decimals(const std::vector<T>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(num<T>::to_double(x));
    return a;
}

template <class T>
std::vector<T> scalars(const std::vector<std::string>& v) {
    std::vector<T> out;
    for (const auto& s : v) out.push_back(io::parse_scalar<T>(s));
    return out;
}

template <class T>
std::vector<T> flatten(const std::vector<std::vector<T>>& m) {
    std::vector<T> out;
    for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
    return out;
}

template <class T>
T parse_p(const JobSpec& j) {
    T p = io::parse_scalar<T>(j.p);
    if (p < T(0) || p > T(1)) throw ConstraintViolation("--p must lie in [0, 1]");
    return p;
}

long int_param(const std::string& s) {
    auto v = io::exact_literal(s);
    if (!v || !num<Rational>::is_integer(*v)) throw ConstraintViolation("expected an integer, got '" + s + "'");
    return num<Rational>::to_long(*v);
}

/// Inputs in canonical form: scalars re-printed in the backend, irrelevant fields dropped.
template <class T>
Json canonical_inputs(const JobSpec& j) {
    Json in;
    in["backend"] = j.backend;
    auto space = [&] {
        if (!j.csv.empty()) {
            in["csv"] = j.csv;
            return;
        }
        in["weight"] = j.weight;
        in["weight_params"] = jvec(scalars<T>(j.weight_params));
        if (j.weight == "uniform") in["interval"] = jvec(scalars<T>(j.interval));
    };
    const std::string& c = j.command;
    if (c == "fit" || c == "basis" || c == "quad" || c == "bessel") {
        space();
        in["z"] = j.z;
        in["p"] = jv(parse_p<T>(j));
    }
    if (c == "fit" || c == "basis" || c == "bessel" || c == "polyfam") in["degree"] = j.degree;
    if (c == "fit" || c == "quad" || c == "bessel") in["target"] = j.target;
    if (c == "quad") in["nodes"] = jvec(scalars<T>(j.nodes));
    if (c == "polyfam") {
        in["family"] = j.family;
        in["family_params"] = jvec(scalars<T>(j.family_params));
    }
    if (c == "odsolve" || c == "vectors") {
        in["matrix"] = j.matrix;
        if (c == "odsolve") in["rhs"] = j.rhs;
        in["z"] = j.z;
        in["p"] = jv(parse_p<T>(j));
    }
    if (c == "verify") in["suite"] = j.suite;
    return in;
}

template <class T>
ProbSpace<T> make_space(const JobSpec& j) {
    auto prm = scalars<T>(j.weight_params);
    auto need = [&](std::size_t n) {
        if (prm.size() != n)
            throw ConstraintViolation("--weight " + j.weight + " takes " + std::to_string(n) + " parameter(s)");
    };
    if (j.weight == "uniform") {
        need(0);
        auto iv = scalars<T>(j.interval);
        return ProbSpace<T>::continuous(iv[0], iv[1], WeightSpec<T>::uniform());
    }
    if (j.weight == "beta") return need(2), ProbSpace<T>::beta(prm[0], prm[1]);
    if (j.weight == "jacobi") return need(2), ProbSpace<T>::jacobi(prm[0], prm[1]);
    if (j.weight == "gamma") return need(2), ProbSpace<T>::gamma(prm[0], prm[1]);
    need(1);
    return ProbSpace<T>::continuous(T(-1), T(1), WeightSpec<T>::chebyshev(static_cast<int>(int_param(j.weight_params[0]))));
}

template <class T>
std::vector<Element<T>> monomials(long n) {
    if (n < 0) throw ConstraintViolation("--degree must be nonnegative");
    std::vector<Element<T>> v;
    for (long k = 0; k <= n; ++k) v.push_back(Element<T>::monomial(k));
    return v;
}

template <class T>
Element<T> require_target(const JobSpec& j) {
    if (j.target.empty()) throw ConstraintViolation(j.command + " needs --target");
    return io::parse_expr<T>(j.target);
}

template <class T>
PCovOp<T> analytic_op(const JobSpec& j) {
    return PCovOp<T>(make_space<T>(j), io::parse_expr<T>(j.z), parse_p<T>(j));
}

template <class T>
Json poly_json(const Element<T>& e) {
    return jvec(e.coeffs());
}

template <class T>
void run_fit(const JobSpec& j, Output& o) {
    std::vector<Element<T>> basis;
    Element<T> target, z;
    ProbSpace<T> space = ProbSpace<T>::uniform01();
    if (!j.csv.empty()) {
        auto s = io::ingest_csv<T>(j.csv);
        space = ProbSpace<T>::discrete(s.x, s.j);
        if (j.degree < 0) throw ConstraintViolation("--degree must be nonnegative");
        for (long k = 0; k <= j.degree; ++k) {
            std::vector<T> col;
            for (const auto& x : s.x) col.push_back(Element<T>::monomial(k).eval_exact(x));
            basis.push_back(Element<T>::values(col));
        }
        target = Element<T>::values(s.y);
        if (s.z.empty()) {
            auto ze = io::parse_expr<T>(j.z);
            for (const auto& x : s.x) s.z.push_back(ze.eval_exact(x));
        }
        z = Element<T>::values(s.z);
        o.diagnostics["samples"] = s.x.size();
    } else {
        space = make_space<T>(j);
        basis = monomials<T>(j.degree);
        target = require_target<T>(j);
        z = io::parse_expr<T>(j.z);
    }
    PCovOp<T> op(space, z, parse_p<T>(j));
    auto r = fit(op, basis, target);
    o.coefficients = jvec(r.coefficients);
    o.residual_var_p = jv(r.residual_var_p);
    o.residual_ls = jv(r.residual_ls);
    o.diagnostics["basis_used"] = r.basis_used;
    o.diagnostics["degenerate_free_params"] = r.degenerate_free_params;
    if constexpr (num<T>::exact) {
        o.diagnostics["coefficients_decimal"] = decimals(r.coefficients);
        o.diagnostics["residual_var_p_decimal"] = num<T>::to_double(r.residual_var_p);
    }
}

template <class T>
void basis_report(const PCovOp<T>& op, const UncorrelatedBasis<T>& b, Output& o) {
    for (const auto& e : b.elements) o.coefficients.push_back(poly_json(e));
    o.diagnostics["variances"] = jvec(b.variances);
    auto rep = verify_basis(op, b);
    o.diagnostics["uncorrelated"] = rep.pass;
    o.failed = !rep.pass;
}

template <class T>
void run_basis(const JobSpec& j, Output& o, const Json* stored) {
    if (!j.csv.empty()) throw ConstraintViolation("basis needs an analytic space, not --csv");
    auto op = analytic_op<T>(j);
    UncorrelatedBasis<T> b;
    if (stored) {
        for (const auto& poly : *stored) {
            std::vector<T> c;
            for (const auto& v : poly) c.push_back(io::parse_scalar<T>(v.is_string() ? v.get<std::string>() : v.dump()));
            b.elements.push_back(Element<T>::poly(c));
            b.variances.push_back(op.var(b.elements.back()));
        }
    } else {
        b = gram_schmidt_p(op, monomials<T>(j.degree));
    }
    basis_report(op, b, o);
}

template <class T>
FamilyDescriptor<T> make_family(const JobSpec& j) {
    auto prm = scalars<T>(j.family_params);
    auto need = [&](std::size_t n) {
        if (prm.size() != n)
            throw ConstraintViolation("--family " + j.family + " takes " + std::to_string(n) + " parameter(s)");
    };
    using FD = FamilyDescriptor<T>;
    if (j.family == "beta-unified") return need(2), FD::beta_unified(prm[0], prm[1]);
    if (j.family == "beta-power") return need(1), FD::beta_power(prm[0]);
    if (j.family == "beta-ordinary") return need(1), FD::beta_ordinary(prm[0]);
    if (j.family == "jacobi-divided")
        return need(3), FD::jacobi_divided(prm[0], prm[1], static_cast<int>(int_param(j.family_params[2])));
    if (j.family == "chebyshev-divided") return need(1), FD::chebyshev_divided(static_cast<int>(int_param(j.family_params[0])));
    if (j.family == "laguerre-divided") return need(1), FD::laguerre_divided(prm[0]);
    return need(1), FD::chebyshev_shift(prm[0]);
}

template <class T>
void run_polyfam(const JobSpec& j, Output& o) {
    auto d = make_family<T>(j);
    long top = j.degree;
    if (top < 0) throw ConstraintViolation("--degree must be nonnegative");
    if (auto md = d.max_degree()) top = std::min(top, *md);
    std::vector<T> norms;
    Json computed = Json::array();
    bool exact_op = d.family != Family::ChebyshevShift && !(d.endpoint == -1 && num<T>::exact);
    bool match = true;
    for (long n = 0; n <= top; ++n) {
        auto e = family_poly(d, n);
        o.coefficients.push_back(poly_json(e));
        norms.push_back(family_norm(d, n));
        if (exact_op) {
            T v = family_op(d).var(e);
            computed.push_back(jv(v));
            match = match && num<T>::eq(v, norms.back());
        }
    }
    o.diagnostics["family"] = d.name();
    o.diagnostics["max_degree"] = d.max_degree() ? Json(*d.max_degree()) : Json(nullptr);
    o.diagnostics["norms"] = jvec(norms);
    if (d.family == Family::BetaUnified || d.family == Family::BetaPower) {
        Json comp = Json::array();
        for (long n = 0; n <= top; ++n) {
            auto g = family_companion(d, n);
            comp.push_back(g.is_polynomial() ? poly_json(g) : Json(g.label()));
        }
        o.diagnostics["companions"] = comp;
    }
    if (exact_op) {
        o.diagnostics["var_p_by_moments"] = computed;
        o.diagnostics["norms_match"] = match;
        o.failed = !match;
    }
}

template <class T>
std::vector<T> vector_arg(const std::string& s) {
    if (s.find(',') != std::string::npos || io::exact_literal(s)) return scalars<T>(io::split_csv_line(s));
    return flatten(io::read_matrix<T>(s));
}

template <class T>
void run_odsolve(const JobSpec& j, Output& o) {
    if (j.matrix.empty() || j.rhs.empty()) throw ConstraintViolation("odsolve needs --matrix and --rhs");
    OverdeterminedProblem<T> pr;
    pr.A = io::read_matrix<T>(j.matrix);
    pr.b = flatten(io::read_matrix<T>(j.rhs));
    if (j.z != "ones") pr.z = vector_arg<T>(j.z);
    pr.p = parse_p<T>(j);
    auto pv = pv_solve(pr);
    auto ls = ls_solve(pr);
    auto opv = objectives(pr, pv), ols = objectives(pr, ls);
    o.coefficients = jvec(pv);
    o.residual_var_p = jv(opv.V);
    o.residual_ls = jv(opv.E);
    o.diagnostics["ls_solution"] = jvec(ls);
    o.diagnostics["ls_objectives"] = Json{{"V", jv(ols.V)}, {"E", jv(ols.E)}};
    o.diagnostics["chain_V_pv_le_V_ls_le_E_ls"] = !(ols.V < opv.V) && !(ols.E < ols.V);
}

template <class T>
void run_quad(const JobSpec& j, Output& o) {
    if (j.nodes.empty()) throw ConstraintViolation("quad needs --nodes");
    auto op = analytic_op<T>(j);
    auto f = require_target<T>(j);
    auto nodes = scalars<T>(j.nodes);
    auto rule = pv_quad_weights_for(op, nodes, f);
    T est = rule.apply(f), exact = op.var(f);
    o.coefficients = jvec(rule.weights);
    o.diagnostics["monomial_weights"] = jvec(pv_quad_weights(op, nodes).weights);
    o.diagnostics["estimate"] = jv(est);
    o.diagnostics["var_p"] = jv(exact);
    o.diagnostics["error"] = jv(T(exact - est));
    o.diagnostics["node_polynomial_cov"] = jv(op.cov(f, node_polynomial(nodes)));
}

template <class T>
void run_bessel(const JobSpec& j, Output& o) {
    auto op = analytic_op<T>(j);
    auto f = require_target<T>(j);
    PCovOp<T> plain(op.space(), io::parse_expr<T>(j.z), T(0));
    auto phis = gram_schmidt_p(plain, monomials<T>(j.degree)).elements;
    auto terms = bessel_improved(op, phis, f);
    Json rows = Json::array();
    bool ok = true;
    for (std::size_t n = 0; n < terms.size(); ++n) {
        const auto& t = terms[n];
        bool holds = !(t.V < T(0)) && !(t.S < t.V);
        ok = ok && holds;
        rows.push_back(Json{{"n", n}, {"S", jv(t.S)}, {"R2", jv(t.R2)}, {"V", jv(t.V)}, {"lhs", jv(t.lhs)},
                            {"rhs", jv(t.rhs)}, {"bounded", holds}});
    }
    for (const auto& e : phis) o.coefficients.push_back(poly_json(e));
    o.diagnostics["terms"] = rows;
    o.diagnostics["bounded"] = ok;
    o.failed = !ok;
}

template <class T>
void run_vectors(const JobSpec& j, Output& o) {
    if (j.matrix.empty()) throw ConstraintViolation("vectors needs --matrix");
    auto rows = io::read_matrix<T>(j.matrix);
    auto zv = j.z == "ones" ? std::vector<T>(rows[0].size(), T(1)) : vector_arg<T>(j.z);
    if (zv.size() != rows[0].size()) throw ConstraintViolation("z length differs from vector dimension");
    PCovOp<T> op(ProbSpace<T>::vectors(zv.size()), Element<T>::values(zv), parse_p<T>(j));
    std::vector<Element<T>> v;
    for (const auto& r : rows) v.push_back(Element<T>::values(r));
    auto b = gram_schmidt_p(op, v);
    for (const auto& e : b.elements) o.coefficients.push_back(jvec(e.value_data()));
    o.diagnostics["variances"] = jvec(b.variances);
}

template <class T>
Json suite_entry(const std::string& name, const IdentityReport& rep) {
    return Json{{"name", name}, {"checks", rep.checks}, {"failures", rep.failures}};
}

template <class T>
void run_verify(const JobSpec& j, Output& o) {
    if (j.suite != "all" && j.suite != "identities" && j.suite != "examples")
        throw ConstraintViolation("--suite must be all, identities or examples");
    auto r = [](long a, long b) { return num<T>::from_ratio(a, b); };
    Json suites = Json::array();
    long checks = 0, failures = 0;
    auto record = [&](const std::string& name, const IdentityReport& rep) {
        suites.push_back(suite_entry<T>(name, rep));
        checks += rep.checks;
        failures += static_cast<long>(rep.failures.size());
    };
    if (j.suite != "examples") {
        using FD = FamilyDescriptor<T>;
        std::vector<FD> fams{FD::beta_power(r(1, 3)),           FD::beta_power(T(3)),        FD::beta_ordinary(r(5, 2)),
                             FD::beta_unified(r(1, 3), r(2, 5)), FD::jacobi_divided(T(0), T(0), 1),
                             FD::chebyshev_divided(3),          FD::laguerre_divided(T(1))};
        for (const auto& d : fams) record(d.name(), identity_suite(d, 5, 4));
    }
    if (j.suite != "identities") {
        IdentityReport rep;
        auto same = [&](const T& x, const T& y, const std::string& what) { detail::expect_same(rep, x, y, what); };
        OverdeterminedProblem<T> pr;
        pr.A = {{T(-1), T(1)}, {T(2), T(-1)}, {T(1), T(-2)}, {T(-1), T(2)}};
        pr.b = {T(1), T(2), T(3), T(4)};
        auto pv = pv_solve(pr), ls = ls_solve(pr);
        same(pv[0], r(8, 74), "pv x1");
        same(pv[1], r(13, 74), "pv x2");
        same(ls[0], r(9, 7), "ls x1");
        same(ls[1], T(1), "ls x2");
        same(objectives(pr, pv).V, r(35378, 7252), "V(pv)");
        same(objectives(pr, ls).V, r(53983, 7252), "V(ls)");
        PCovOp<T> op(ProbSpace<T>::uniform01(), Element<T>::monomial(1), T(1));
        auto f = fit(op, monomials<T>(2), Element<T>::power_product(T(0), r(1, 2)));
        same(f.coefficients[0], r(34, 35), "sqrt(1-x) c0");
        same(f.coefficients[1], r(-8, 35), "sqrt(1-x) c1");
        same(f.coefficients[2], r(-4, 7), "sqrt(1-x) c2");
        same(f.residual_var_p, r(1, 2450), "sqrt(1-x) residual");
        record("examples", rep);
    }
    o.diagnostics["suites"] = suites;
    o.diagnostics["checks"] = checks;
    o.diagnostics["failures"] = failures;
    o.diagnostics["pass"] = failures == 0;
    o.failed = failures != 0;
}

template <class T>
Output dispatch(const JobSpec& j, const Json* stored) {
    Output o;
    o.inputs = canonical_inputs<T>(j);
    const std::string& c = j.command;
    if (c == "fit") run_fit<T>(j, o);
    else if (c == "basis") run_basis<T>(j, o, stored);
    else if (c == "polyfam") run_polyfam<T>(j, o);
    else if (c == "odsolve") run_odsolve<T>(j, o);
    else if (c == "quad") run_quad<T>(j, o);
    else if (c == "bessel") run_bessel<T>(j, o);
    else if (c == "vectors") run_vectors<T>(j, o);
    else run_verify<T>(j, o);
    return o;
}

std::string cell(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "";
    return v.dump();
}

void flatten_csv(const Json& v, const std::string& path, std::ostream& out) {
    if (v.is_object()) {
        for (const auto& [k, x] : v.items()) flatten_csv(x, path.empty() ? k : path + "." + k, out);
    } else if (v.is_array()) {
        if (v.empty()) out << path << ",\n";
        for (std::size_t i = 0; i < v.size(); ++i) flatten_csv(v[i], path + "." + std::to_string(i), out);
    } else {
        std::string s = cell(v);
        if (s.find_first_of(",\"\n") != std::string::npos) {
            std::string q = "\"";
            for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            s = q + "\"";
        }
        out << path << "," << s << "\n";
    }
}

std::string render(const JobSpec& j, const Output& o) {
    Json doc;
    doc["command"] = j.command;
    doc["inputs"] = o.inputs;
    doc["coefficients"] = o.coefficients;
    doc["residual_var_p"] = o.residual_var_p;
    doc["residual_ls"] = o.residual_ls;
    doc["diagnostics"] = o.diagnostics;
    std::ostringstream s;
    if (j.format == "csv") {
        s << "field,value\n";
        flatten_csv(doc, "", s);
    } else {
        s << doc.dump(2) << "\n";
    }
    return s.str();
}

/// Restores a basis job from its JSON output; returns the stored polynomials.
Json load_basis(JobSpec& j) {
    std::ifstream in(j.reingest);
    if (!in) throw ParseError("cannot open '" + j.reingest + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(j.reingest + ": " + e.what());
    }
    try {
        if (doc.at("command") != "basis") throw ParseError(j.reingest + " is not basis output");
        const Json& in_ = doc.at("inputs");
        auto strings = [](const Json& a) {
            std::vector<std::string> v;
            for (const auto& x : a) v.push_back(cell(x));
            return v;
        };
        j.backend = in_.at("backend");
        j.weight = in_.at("weight");
        j.weight_params = strings(in_.at("weight_params"));
        if (in_.contains("interval")) j.interval = strings(in_.at("interval"));
        j.z = in_.at("z");
        j.p = cell(in_.at("p"));
        j.degree = in_.at("degree");
        return doc.at("coefficients");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(j.reingest + ": " + e.what());
    }
}

void add_space(CLI::App* s, JobSpec& j) {
    s->add_option("--weight", j.weight, "uniform | beta | jacobi | gamma | chebyshev")
        ->check(CLI::IsMember({"uniform", "beta", "jacobi", "gamma", "chebyshev"}));
    s->add_option("--weight-params", j.weight_params, "weight parameters, comma separated")->delimiter(',');
    s->add_option("--interval", j.interval, "interval A B for the uniform weight")->expected(2);
    s->add_option("--z", j.z, "fixed variable Z as an expression, or ones");
    s->add_option("--p", j.p, "p in [0, 1]");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    JobSpec j;
    CLI::App app{"least p-variance approximation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--backend", j.backend, "rational | float")->check(CLI::IsMember({"rational", "float"}));
    app.add_option("--format", j.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", j.out, "write results to a file instead of stdout");

    auto* fit = app.add_subcommand("fit", "least p-variance polynomial fit");
    add_space(fit, j);
    fit->add_option("--csv", j.csv, "samples with header x,y[,j][,z]");
    fit->add_option("--degree", j.degree, "polynomial degree");
    fit->add_option("--target", j.target, "function to approximate");

    auto* basis = app.add_subcommand("basis", "p-uncorrelated basis from monomials");
    add_space(basis, j);
    basis->add_option("--degree", j.degree, "highest degree");
    basis->add_option("--reingest", j.reingest, "re-verify the polynomials of an earlier basis JSON");

    auto* fam = app.add_subcommand("polyfam", "closed-form polynomial families");
    fam->add_option("--family", j.family, "family name")
        ->required()
        ->check(CLI::IsMember({"beta-unified", "beta-power", "beta-ordinary", "jacobi-divided", "chebyshev-divided",
                               "laguerre-divided", "chebyshev-shift"}));
    fam->add_option("--family-params", j.family_params, "family parameters, comma separated")->delimiter(',');
    fam->add_option("--degree", j.degree, "highest degree");

    auto* od = app.add_subcommand("odsolve", "overdetermined system by least p-variances");
    od->add_option("--matrix", j.matrix, "CSV matrix A");
    od->add_option("--rhs", j.rhs, "CSV right-hand side b");
    od->add_option("--z", j.z, "ones, a comma list, or a CSV file");
    od->add_option("--p", j.p, "p in [0, 1]");

    auto* quad = app.add_subcommand("quad", "p-variance quadrature weights");
    add_space(quad, j);
    quad->add_option("--nodes", j.nodes, "nodes, comma separated")->delimiter(',');
    quad->add_option("--target", j.target, "integrand");

    auto* bes = app.add_subcommand("bessel", "improved Bessel inequality over orthogonal polynomials");
    add_space(bes, j);
    bes->add_option("--degree", j.degree, "highest degree of the orthogonal family");
    bes->add_option("--target", j.target, "function f");

    auto* vec = app.add_subcommand("vectors", "p-uncorrelated vectors; matrix rows are V_0..V_n");
    vec->add_option("--matrix", j.matrix, "CSV rows");
    vec->add_option("--z", j.z, "ones, a comma list, or a CSV file");
    vec->add_option("--p", j.p, "p in [0, 1]");

    auto* ver = app.add_subcommand("verify", "identity and example suites");
    ver->add_option("--suite", j.suite, "all | identities | examples");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    }
    j.command = app.get_subcommands().front()->get_name();

    try {
        Json stored;
        const Json* stored_ptr = nullptr;
        if (!j.reingest.empty()) {
            stored = load_basis(j);
            stored_ptr = &stored;
        }
        std::string note;
        if (j.backend == "rational" && !j.csv.empty() && !io::csv_exact(j.csv, true)) {
            j.backend = "float";
            note = "CSV holds values that are not exact literals; using the float backend";
        }
        Output o = j.backend == "rational" ? dispatch<Rational>(j, stored_ptr) : dispatch<double>(j, stored_ptr);
        if (!note.empty()) o.diagnostics["note"] = note;
        std::string text = render(j, o);
        if (j.out.empty()) {
            out << text;
        } else {
            std::ofstream f(j.out);
            if (!(f << text)) throw ConstraintViolation("cannot write '" + j.out + "'");
        }
        return o.failed ? Numerical : Ok;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return Invalid;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return Numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Numerical;
    }
}

}  // namespace pvar::cli
