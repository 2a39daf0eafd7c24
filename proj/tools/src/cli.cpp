#include "cbtau_tools/cli.hpp"

#include "cbtau_tools/acceptance.hpp"
#include "cbtau_tools/encoding.hpp"

#include "cbtau/bilinear.hpp"
#include "cbtau/blowup.hpp"
#include "cbtau/errors.hpp"
#include "cbtau/fock.hpp"
#include "cbtau/nsr.hpp"
#include "cbtau/painleve.hpp"
#include "cbtau/virasoro.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <list>
#include <memory>
#include <sstream>

namespace cbtau::tools {

namespace {

// Bad flag value; the message starts with the flag name.
class UsageError : public ParamError {
public:
    using ParamError::ParamError;
};

struct Outcome {
    Json result;
    Json residual_max_order;  // null unless the command checks a truncated identity
    bool pass = true;
    std::optional<std::string> text;  // CSV artifacts replace the JSON document
};

// String-valued flags of one subcommand, parsed on demand so that errors name the flag.
// Every flag is echoed in canonical form.
class Args {
public:
    std::map<std::string, std::string> raw;
    std::map<std::string, bool> flags;

    std::string text(const std::string& name) { return echo(name, raw.at(name)); }

    bool given(const std::string& name) const { return !raw.at(name).empty(); }

    Scalar scalar(const std::string& name)
    {
        return guard(name, [&] {
            Scalar s = Scalar::parse(raw.at(name));
            params[key(name)] = encode(s);
            return s;
        });
    }

    Rational rational(const std::string& name)
    {
        return guard(name, [&] {
            Rational r = parse_rational(raw.at(name));
            params[key(name)] = encode(r);
            return r;
        });
    }

    long integer(const std::string& name)
    {
        return guard(name, [&] {
            long v = to_long(parse_rational(raw.at(name)));
            params[key(name)] = v;
            return v;
        });
    }

    double real(const std::string& name)
    {
        return guard(name, [&] {
            size_t used = 0;
            double v = std::stod(raw.at(name), &used);
            if (used != raw.at(name).size()) throw ParamError("not a number");
            params[key(name)] = raw.at(name);
            return v;
        });
    }

    std::array<Scalar, 4> four(const std::string& name)
    {
        return guard(name, [&] {
            std::vector<Scalar> v = parse_scalar_list(raw.at(name));
            if (v.size() != 4) throw ParamError("expected 4 comma-separated values, got " + std::to_string(v.size()));
            params[key(name)] = encode(v);
            return std::array<Scalar, 4>{v[0], v[1], v[2], v[3]};
        });
    }

    std::vector<Rational> rationals(const std::string& name)
    {
        return guard(name, [&] {
            std::vector<Rational> v = parse_rational_list(raw.at(name));
            if (v.empty()) throw ParamError("expected at least one value");
            Json j = Json::array();
            for (const auto& r : v) j.push_back(encode(r));
            params[key(name)] = j;
            return v;
        });
    }

    bool flag(const std::string& name)
    {
        params[key(name)] = flags.at(name);
        return flags.at(name);
    }

    // Flags the command did not consult are echoed verbatim.
    Json echo_all()
    {
        for (const auto& [name, value] : raw)
            if (!params.contains(key(name))) params[key(name)] = value;
        for (const auto& [name, value] : flags)
            if (!params.contains(key(name))) params[key(name)] = value;
        return params;
    }

    // Runs f, prefixing parameter errors it raises with the flag name.
    template <class F>
    auto guard(const std::string& name, F f) -> decltype(f())
    {
        try {
            return f();
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError(name + ": " + e.what());
        }
    }

private:
    static std::string key(const std::string& name) { return name.substr(2); }
    std::string echo(const std::string& name, const std::string& v)
    {
        params[key(name)] = v;
        return v;
    }
    Json params = Json::object();
};

struct Command {
    std::string name;
    CLI::App* app = nullptr;
    Args args;
    std::function<Outcome(Args&)> run;

    Command& opt(const std::string& flag, const std::string& def, const std::string& help)
    {
        args.raw[flag] = def;
        app->add_option(flag, args.raw[flag], help)->capture_default_str();
        return *this;
    }
    Command& toggle(const std::string& flag, const std::string& help)
    {
        args.flags[flag] = false;
        app->add_flag(flag, args.flags[flag], help);
        return *this;
    }
};

unsigned env_threads()
{
    const char* env = std::getenv("CBTAU_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end || v < 1 || v > 1024) throw UsageError(std::string("CBTAU_THREADS: expected a positive integer, got '") + env + "'");
    return static_cast<unsigned>(v);
}

std::string real_str(const Real& x) { return x.str(20, std::ios_base::scientific); }

Json sectors_json(const SectorSeries& s)
{
    Json out = Json::array();
    for (const auto& [m, g] : s.sectors) out.push_back(Json{{"power", m}, {"series", encode(g)}});
    return out;
}

// ---- subcommands ----

Outcome cmd_block(Args& a)
{
    VirParams vp;
    if (a.given("--c")) {
        vp.c = a.scalar("--c");
        vp.delta = a.scalar("--delta");
    } else {
        vp = VirParams::from_b_momentum(a.scalar("--b"), a.scalar("--P"));
    }
    long order = a.integer("--order");
    std::string kind = a.text("--kind");
    Outcome o;
    std::vector<Scalar> coeffs;
    if (kind == "irregular") coeffs = block_irregular_coeffs(vp, order);
    else if (kind == "regular") coeffs = block_regular_coeffs(vp, a.four("--ext"), order);
    else throw UsageError("--kind: expected regular or irregular, got '" + kind + "'");
    o.result = {{"c", encode(vp.c)}, {"delta", encode(vp.delta)}, {"coeffs", encode(coeffs)},
                {"series", encode(series_from_coeffs(Rational(0), coeffs))}};
    return o;
}

Outcome cmd_nsr_block(Args& a)
{
    NsrParams np = NsrParams::from_momentum(a.scalar("--b"), a.scalar("--P"));
    Rational order = a.rational("--order");
    std::string kind = a.text("--kind");
    Outcome o;
    o.result = {{"c", encode(np.c())}, {"delta", encode(np.delta)}};
    if (kind == "irregular") {
        std::vector<Scalar> coeffs = nsr_block_irregular_coeffs(np, order);
        o.result["coeffs"] = encode(coeffs);
        o.result["series"] = encode(series_from_coeffs(Rational(0), coeffs, rat(1, 2)));
    } else if (kind == "regular") {
        NsrBlockCoeffs bc = nsr_block_coeffs(np, a.four("--ext"), order);
        o.result["plain"] = encode(bc.plain);
        o.result["tilded"] = encode(bc.tilded);
    } else {
        throw UsageError("--kind: expected regular or irregular, got '" + kind + "'");
    }
    return o;
}

// Evaluates f, reporting parameter errors of one table entry inline.
Json entry(const std::function<Scalar()>& f)
{
    try {
        return encode(f());
    } catch (const ParamError& e) {
        return Json{{"error", e.what()}};
    }
}

Outcome cmd_blowup(Args& a)
{
    Scalar p = a.scalar("--P"), pp = a.scalar("--Pp"), alpha = a.scalar("--alpha"), b = a.scalar("--b");
    Rational n = a.rational("--n"), np = a.rational("--np");
    Scalar sigma = a.scalar("--sigma");
    std::array<Scalar, 4> theta = a.four("--theta");
    Outcome o;
    o.result["l_squared"] = encode(l_squared(b, p, alpha, pp, n, np));
    o.result["l_reduced"] = encode(l_reduced(b, p, alpha, pp, n, np));
    o.result["omega_sq_n"] = encode(omega_sq(p, n, b));
    o.result["omega_sq_np"] = encode(omega_sq(pp, np, b));
    const Rational labels[] = {rat(0), rat(1, 2), rat(1)};
    Json table = Json::array();
    for (const Rational& i : labels)
        for (const Rational& j : labels)
            table.push_back({{"n", encode(i)}, {"np", encode(j)}, {"l_squared", entry([&] { return l_squared(b, p, alpha, pp, i, j); })}});
    o.result["l_squared_table"] = table;
    Json omegas = Json::array();
    for (Rational k : {rat(-1), rat(-1, 2), rat(1, 2), rat(1), rat(3, 2)})
        omegas.push_back({{"n", encode(k)}, {"P", entry([&] { return omega_sq(p, k, b); })}, {"Pp", entry([&] { return omega_sq(pp, k, b); })}});
    o.result["omega_sq_table"] = omegas;
    Json ratios = Json::array();
    for (Rational k : {rat(1, 2), rat(1), rat(3, 2), rat(2)})
        ratios.push_back({{"n", encode(k)},
                          {"p3", entry([&] { return c_ratio_p3(sigma, k); })},
                          {"p3_s1", entry([&] { return c_ratio_p3(sigma, k, 1); })},
                          {"p6", entry([&] { return c_ratio_p6(sigma, theta, k); })}});
    o.result["c_ratios"] = ratios;
    return o;
}

Outcome cmd_oracle_l(Args& a)
{
    Scalar p = a.scalar("--P"), pp = a.scalar("--Pp"), alpha = a.scalar("--alpha"), b = a.scalar("--b");
    Rational n = a.rational("--n"), np = a.rational("--np");
    long k_max = a.integer("--k-max");
    FnsrOracle orc(b);
    Outcome o;
    Scalar oracle = orc.l_squared(p, alpha, pp, n, np);
    Scalar closed = l_squared(b, p, alpha, pp, n, np);
    o.result["oracle_l_squared"] = encode(oracle);
    o.result["closed_form_l_squared"] = encode(closed);
    o.result["agree"] = oracle == closed;
    o.pass = oracle == closed;
    Json hw = Json::array();
    for (auto [mom, lab] : {std::pair{p, n}, std::pair{pp, np}}) {
        auto rep = orc.verify_highest_weight(mom, lab, static_cast<int>(k_max));
        Scalar w1 = vir12_weight(b, mom, lab, 1), w2 = vir12_weight(b, mom, lab, 2);
        bool ok = rep.pass && rep.eigen1 == w1 && rep.eigen2 == w2;
        o.pass = o.pass && ok;
        Json r{{"P", encode(mom)}, {"n", encode(lab)}, {"pass", ok}, {"eigen1", encode(rep.eigen1)},
               {"eigen2", encode(rep.eigen2)}, {"expected1", encode(w1)}, {"expected2", encode(w2)}};
        if (!rep.pass) r["failing"] = {{"eta", rep.failing_eta}, {"k", rep.failing_k}};
        hw.push_back(r);
    }
    o.result["highest_weight"] = hw;
    return o;
}

Outcome cmd_verify(Args& a)
{
    Identity id = a.guard("--id", [&] { return parse_identity(a.text("--id")); });
    IdentityParams ps;
    ps.b = a.scalar("--b");
    ps.p = a.scalar("--P");
    ps.momenta = a.four("--momenta");
    ps.sigma = a.scalar("--sigma");
    ps.theta = a.four("--theta");
    ps.m = a.integer("--m");
    ps.extra_shells = a.integer("--extra-shells");
    Rational order = a.rational("--order");
    Residual r = verify_identity(id, ps, order);
    Outcome o;
    o.result = {{"identity", identity_name(id)}, {"residual", encode(r.value)}};
    o.residual_max_order = encode(r.order);
    o.pass = r.vanishes();
    return o;
}

FastParams fast_params(Args& a)
{
    FastParams fp;
    fp.sigma = a.scalar("--sigma");
    fp.theta = a.four("--theta");
    fp.b = a.scalar("--b");
    fp.p = a.scalar("--P");
    fp.momenta = a.four("--momenta");
    fp.threads = env_threads();
    return fp;
}

Outcome cmd_fast_block(Args& a)
{
    FastScheme scheme = a.guard("--scheme", [&] { return parse_scheme(a.text("--scheme")); });
    FastParams fp = fast_params(a);
    CoeffTable t = fast_block(scheme, fp, a.integer("--order"));
    Json entries = Json::array();
    for (const auto& [pt, v] : t.first) {
        Json e{{"i", pt.first}, {"k", pt.second}, {"first", encode(v)}};
        if (auto it = t.second.find(pt); it != t.second.end()) e["second"] = encode(it->second);
        if (scheme == FastScheme::generic_irregular || scheme == FastScheme::generic_regular)
            e["momentum"] = encode(t.lattice_momentum(pt.first, pt.second, fp.b));
        else
            e["sigma"] = encode(fp.sigma + Scalar(pt.first));
        entries.push_back(e);
    }
    Outcome o;
    o.result = {{"scheme", scheme_name(scheme)}, {"center", encode(t.center)}, {"n_max", t.n_max}, {"entries", entries}};
    return o;
}

TauSpec tau_spec(Args& a, TauKind kind)
{
    TauSpec spec;
    spec.kind = kind;
    spec.sigma = a.scalar("--sigma");
    spec.s = a.scalar("--s");
    if (kind == TauKind::p6) spec.theta = a.four("--theta");
    spec.n_max = a.rational("--order");
    if (a.given("--n-range")) spec.n_range = a.integer("--n-range");
    else spec.n_range = a.guard("--sigma", [&] { return shell_bound(spec.sigma, spec.n_max); });
    return spec;
}

Outcome cmd_tau(Args& a, TauKind kind)
{
    TauSpec spec = tau_spec(a, kind);
    std::vector<Rational> ts = a.rationals("--t");
    unsigned digits = static_cast<unsigned>(a.integer("--digits"));
    double tol = a.real("--tolerance");
    bool csv = a.guard("--format", [&] {
        std::string f = a.text("--format");
        if (f != "json" && f != "csv") throw ParamError("expected json or csv, got '" + f + "'");
        return f == "csv";
    });

    SectorSeries tau = tau_series(spec);
    SectorSeries res = tau_residual(spec, tau);
    Outcome o;
    o.pass = true;
    for (const auto& [m, g] : res.sectors) o.pass = o.pass && g.body.empty();
    o.residual_max_order = encode(spec.n_max);

    std::array<Real, 4> delta;
    Json samples = Json::array();
    std::ostringstream table;
    table << "t,zeta,residual\n";
    if (spec.sigma.is_real()) {
        for (int i = 0; i < 4; ++i) delta[i] = Real(0);
        for (const Rational& t : ts) {
            ZetaValues v = a.guard("--t", [&] { return zeta_eval(spec, t, digits, tol); });
            if (kind == TauKind::p6)
                for (int i = 0; i < 4; ++i) {
                    Real x;
                    Rational d = (spec.theta[i] * spec.theta[i]).re();
                    mpfr_set_q(x.backend().data(), d.get_mpq_t(), MPFR_RNDN);
                    delta[i] = x;
                }
            Real tr;
            mpfr_set_q(tr.backend().data(), t.get_mpq_t(), MPFR_RNDN);
            Real r = sigma_form(kind, delta, tr, v.zeta, v.dzeta, v.d2zeta);
            Json s{{"t", encode(t)}, {"zeta", real_str(v.zeta)}, {"sigma_form_residual", real_str(r)}, {"tail", real_str(v.tail)}};
            if (v.q) s["q"] = real_str(*v.q);
            if (v.p) s["p"] = real_str(*v.p);
            samples.push_back(s);
            table << rational_str(t) << "," << real_str(v.zeta) << "," << real_str(r) << "\n";
        }
    } else if (csv) {
        throw UsageError("--sigma: numeric samples need a real sigma");
    }
    o.result = {{"n_range", spec.n_range},
                {"gauge_note", "series sectors are in powers of s_hat = s g, g = tau_gauge"},
                {"series", sectors_json(tau)},
                {"residual", sectors_json(res)},
                {"residual_vanishes", o.pass},
                {"samples", samples}};
    if (spec.sigma.is_real()) o.result["tau_gauge"] = real_str(tau_gauge(spec, digits));
    if (csv) o.text = table.str();
    return o;
}

Outcome cmd_sigma_check(Args& a)
{
    std::string k = a.text("--kind");
    TauKind kind;
    if (k == "p3") kind = TauKind::p3;
    else if (k == "p6") kind = TauKind::p6;
    else throw UsageError("--kind: expected p3 or p6, got '" + k + "'");
    TauSpec spec = tau_spec(a, kind);
    std::vector<Rational> ts = a.rationals("--t");
    unsigned digits = static_cast<unsigned>(a.integer("--digits"));
    double tol = a.real("--tolerance"), max_res = a.real("--max-residual"), max_dev = a.real("--max-deviation");
    SigmaFormProblem prob = a.guard("--t", [&] { return sigma_problem_from_series(spec, ts.front(), digits); });
    SigmaReport rep = a.guard("--t", [&] { return sigma_form_residual(prob, spec, ts, tol); });
    Json samples = Json::array();
    for (const auto& s : rep.samples)
        samples.push_back({{"t", encode(s.t)},
                           {"zeta", real_str(s.zeta)},
                           {"residual", real_str(s.residual)},
                           {"rk_zeta", real_str(s.rk_zeta)},
                           {"rk_deviation", real_str(s.rk_deviation)}});
    Outcome o;
    o.result = {{"samples", samples},
                {"max_residual", real_str(rep.max_residual)},
                {"max_rk_deviation", real_str(rep.max_rk_deviation)},
                {"n_range", spec.n_range}};
    o.pass = rep.max_residual < Real(max_res) && rep.max_rk_deviation < Real(max_dev);
    return o;
}

Outcome cmd_bench(Args& a)
{
    FastScheme scheme = a.guard("--scheme", [&] { return parse_scheme(a.text("--scheme")); });
    FastParams fp = fast_params(a);
    std::vector<Rational> orders = a.rationals("--orders");
    long repeat = a.integer("--repeat");
    if (repeat < 1) throw UsageError("--repeat: expected a positive integer");
    std::ostringstream csv;
    csv << "scheme,N,wall_ms\n";
    for (const Rational& n : orders) {
        long order = a.guard("--orders", [&] { return to_long(n); });
        double best = 1e300;
        for (long r = 0; r < repeat; ++r) {
            auto t0 = std::chrono::steady_clock::now();
            fast_block(scheme, fp, order);
            best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        }
        csv << scheme_name(scheme) << "," << order << "," << best << "\n";
    }
    Outcome o;
    o.text = csv.str();
    return o;
}

Outcome cmd_selftest(Args& a, std::ostream& err)
{
    AcceptanceOptions opts;
    opts.quick = a.flag("--quick");
    opts.threads = env_threads();
    opts.seed = static_cast<std::uint64_t>(a.integer("--seed"));
    bool mut_lattice = a.flag("--mutate-s-even"), mut_op = a.flag("--mutate-d3");
    std::vector<int> ids;
    if (a.given("--criteria")) {
        for (const Rational& r : a.rationals("--criteria")) {
            long id = a.guard("--criteria", [&] { return to_long(r); });
            if (id < 1 || id > 9) throw UsageError("--criteria: no criterion " + std::to_string(id));
            ids.push_back(static_cast<int>(id));
        }
    } else {
        ids = all_criteria();
        // with a mutation switched on, the mutation criterion itself is meaningless
        if (mut_lattice || mut_op) ids.pop_back();
    }
    set_lattice_bound_mutation(mut_lattice);
    set_operator_mutation(mut_op);
    Outcome o;
    Json criteria = Json::array();
    for (int id : ids) {
        CriterionResult r = run_criterion(id, opts);
        if (mut_lattice || mut_op) {
            // run_criterion(9) resets the hooks
            set_lattice_bound_mutation(mut_lattice);
            set_operator_mutation(mut_op);
        }
        err << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.name << " ("
            << std::fixed << std::setprecision(1) << r.seconds << " s)\n";
        Json failures = Json::array();
        for (const auto& d : r.details)
            if (d.rfind("FAIL", 0) == 0) failures.push_back(d.substr(5));
        criteria.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"checks", r.details.size()}, {"failures", failures}});
        o.pass = o.pass && r.pass;
    }
    set_lattice_bound_mutation(false);
    set_operator_mutation(false);
    o.result = {{"criteria", criteria}};
    return o;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Conformal blocks, blow-up relations and Painleve tau functions"};
    app.require_subcommand(1);
    std::string out_path;
    app.add_option("--out", out_path, "write the artifact to this file instead of stdout");

    std::list<Command> commands;  // stable addresses for CLI11 bindings
    auto add = [&](const std::string& name, const std::string& help, std::function<Outcome(Args&)> run) -> Command& {
        Command& c = commands.emplace_back();
        c.name = name;
        c.app = app.add_subcommand(name, help);
        c.run = std::move(run);
        return c;
    };
    const std::string theta_default = "1/7,1/11,1/13,1/3";
    const std::string momenta_default = "1/5,2/7,3/11,1/13";

    add("block", "Virasoro block coefficients from the Gram matrices", cmd_block)
        .opt("--kind", "irregular", "regular or irregular")
        .opt("--b", "2", "b, with c = 1 + 6 (b + 1/b)^2")
        .opt("--P", "1/3", "momentum, Delta = Q^2/4 - P^2")
        .opt("--c", "", "central charge (overrides --b, --P)")
        .opt("--delta", "", "internal weight, with --c")
        .opt("--ext", "1/3,1/4,1/5,1/6", "external weights Delta_1..Delta_4 (regular)")
        .opt("--order", "6", "top level N");
    add("nsr-block", "NSR block coefficients from the Gram matrices", cmd_nsr_block)
        .opt("--kind", "irregular", "regular or irregular")
        .opt("--b", "2", "b")
        .opt("--P", "1/3", "momentum")
        .opt("--ext", "1/3,1/4,1/5,1/6", "external NS weights Delta_1..Delta_4 (regular)")
        .opt("--order", "3", "top level, a multiple of 1/2");
    add("blowup", "blow-up matrix elements l^2, Omega^2 and C-ratios", cmd_blowup)
        .opt("--P", "1/3", "bra momentum")
        .opt("--Pp", "1/4", "ket momentum")
        .opt("--alpha", "1/7", "vertex momentum")
        .opt("--b", "2", "b")
        .opt("--n", "0", "bra lattice label")
        .opt("--np", "0", "ket lattice label")
        .opt("--sigma", "1/5", "sigma for the C-ratio table")
        .opt("--theta", theta_default, "theta_0, theta_t, theta_1, theta_inf for the Painleve VI ratios");
    add("oracle-l", "free-field oracle for l^2 and the highest-weight check", cmd_oracle_l)
        .opt("--P", "1/3", "bra momentum")
        .opt("--Pp", "1/4", "ket momentum")
        .opt("--alpha", "1/7", "vertex momentum")
        .opt("--b", "2", "b")
        .opt("--n", "1/2", "bra lattice label")
        .opt("--np", "1/2", "ket lattice label")
        .opt("--k-max", "3", "highest mode checked for annihilation");
    add("verify", "residual of a named identity", cmd_verify)
        .opt("--id", "s0", "identity name")
        .opt("--b", "2", "b")
        .opt("--P", "1/3", "momentum")
        .opt("--momenta", momenta_default, "external momenta P_1..P_4 (regular identities)")
        .opt("--sigma", "1/5", "sigma (c = 1 identities)")
        .opt("--theta", "1/7,2/9,1/11,3/13", "theta_0, theta_t, theta_1, theta_inf")
        .opt("--m", "0", "power of s for the sm identity")
        .opt("--extra-shells", "0", "additional lattice shells")
        .opt("--order", "3", "relative order");
    add("fast-block", "block tables from the bilinear recursions", cmd_fast_block)
        .opt("--scheme", "c1-irregular", "c1-irregular, c1-regular, generic-irregular or generic-regular")
        .opt("--sigma", "1/5", "sigma (c = 1 schemes)")
        .opt("--theta", "1/7,2/9,1/11,3/13", "theta_0, theta_t, theta_1, theta_inf (c1-regular)")
        .opt("--b", "2", "b (generic schemes)")
        .opt("--P", "1/3", "momentum (generic schemes)")
        .opt("--momenta", momenta_default, "external momenta (generic-regular)")
        .opt("--order", "8", "top level N");
    for (auto [name, kind] : {std::pair{"tau3", TauKind::p3}, std::pair{"tau6", TauKind::p6}}) {
        TauKind k = kind;
        Command& c = add(name, k == TauKind::p3 ? "Painleve III tau function" : "Painleve VI tau function",
                         [k](Args& a) { return cmd_tau(a, k); });
        c.opt("--sigma", "1/5", "sigma")
            .opt("--s", "1", "integration constant s")
            .opt("--order", "6", "relative block order N_max")
            .opt("--n-range", "", "largest |n| (default: shells with (sigma+n)^2 <= sigma^2 + N_max)")
            .opt("--t", "1/100,1/50,1/20", "sample points for zeta")
            .opt("--digits", "60", "decimal digits for numeric evaluation")
            .opt("--tolerance", "1e-10", "largest accepted relative tail")
            .opt("--format", "json", "json, or csv for the (t, zeta, residual) table");
        if (k == TauKind::p6) c.opt("--theta", theta_default, "theta_0, theta_t, theta_1, theta_inf");
    }
    add("sigma-check", "sigma-form residual and Runge-Kutta cross-check", cmd_sigma_check)
        .opt("--kind", "p3", "p3 or p6")
        .opt("--sigma", "1/5", "sigma")
        .opt("--s", "1", "integration constant s")
        .opt("--theta", theta_default, "theta_0, theta_t, theta_1, theta_inf (p6)")
        .opt("--order", "8", "relative block order N_max")
        .opt("--n-range", "", "largest |n|")
        .opt("--t", "1/100,1/50,1/20", "sample points; the first is the initial point")
        .opt("--digits", "60", "decimal digits")
        .opt("--tolerance", "1e-10", "largest accepted relative tail")
        .opt("--max-residual", "1e-8", "pass threshold for the series residual")
        .opt("--max-deviation", "1e-6", "pass threshold for the RK deviation");
    add("bench", "fast-scheme timings as CSV", cmd_bench)
        .opt("--scheme", "c1-irregular", "scheme")
        .opt("--sigma", "1/5", "sigma")
        .opt("--theta", "1/7,2/9,1/11,3/13", "theta")
        .opt("--b", "2", "b")
        .opt("--P", "1/3", "momentum")
        .opt("--momenta", momenta_default, "external momenta")
        .opt("--orders", "10,20,30,40,50", "levels N")
        .opt("--repeat", "1", "repetitions; the fastest is reported");
    add("selftest", "acceptance criteria 1-9", [&err](Args& a) { return cmd_selftest(a, err); })
        .opt("--criteria", "", "comma-separated subset")
        .opt("--seed", "20240611", "seed for random parameter points")
        .toggle("--quick", "smaller fast-scheme orders")
        .toggle("--mutate-s-even", "shift the s_even lattice bound by one")
        .toggle("--mutate-d3", "change the D^0 coefficient of D^III");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_param;
    }

    for (Command& c : commands) {
        if (!c.app->parsed()) continue;
        try {
            Outcome o = c.run(c.args);
            std::string artifact;
            if (o.text) {
                artifact = *o.text;
            } else {
                Json doc{{"command", c.name},
                         {"params", c.args.echo_all()},
                         {"result", o.result},
                         {"residual_max_order", o.residual_max_order},
                         {"pass", o.pass}};
                artifact = doc.dump(2) + "\n";
            }
            if (out_path.empty()) {
                out << artifact;
            } else {
                std::ofstream f(out_path);
                if (!f) {
                    err << "error: --out: cannot open '" << out_path << "'\n";
                    return exit_param;
                }
                f << artifact;
            }
            return o.pass ? exit_ok : exit_identity_fail;
        } catch (const ParamError& e) {
            err << "error: " << e.what() << "\n";
            return exit_param;
        } catch (const CutoffError& e) {
            err << "error: " << e.what() << "\n";
            return exit_param;
        } catch (const std::exception& e) {
            err << "internal error: " << e.what() << "\n";
            return exit_internal;
        }
    }
    return exit_param;
}

}  // namespace cbtau::tools
