// Command-line driver: formal group laws, endomorphisms, torsion
// certificates, norm criteria, norm-field actions, the fixed-point and
// descent functors, two-tower reconstruction, the comparison functors, and
// the property suites.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "phigamma/verify.hpp"

using namespace phigamma;

namespace {

constexpr const char* kSchema = "# phigamma schema 1";

struct CommonFlags {
    std::string config_path;
    RunConfig cfg;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key=value configuration file");
        app->add_option("--p", p_, "prime");
        app->add_option("--r", r_, "residue degree of F");
        app->add_option("--s", s_, "inertia degree of K/F");
        app->add_option("--f", f_, "Frobenius series: standard|multiplicative|c1,c2,...");
        app->add_option("--K", K_, "extension: unram | eis:c0,c1,...");
        app->add_option("--N", N_, "degree cutoff");
        app->add_option("--M", M_, "uniformizer-adic precision");
        app->add_option("--seed", seed_, "seed for randomized suites");
    }

    RunConfig resolve() {
        RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (p_) apply_override(c, "p", std::to_string(*p_));
        if (r_) apply_override(c, "r", std::to_string(*r_));
        if (s_) apply_override(c, "s", std::to_string(*s_));
        if (f_) apply_override(c, "f", *f_);
        if (K_) apply_override(c, "K", *K_);
        if (N_) apply_override(c, "N", std::to_string(*N_));
        if (M_) apply_override(c, "M", std::to_string(*M_));
        if (seed_) apply_override(c, "seed", std::to_string(*seed_));
        c.validate();
        return c;
    }

  private:
    std::optional<int> p_, r_, s_, N_, M_;
    std::optional<std::string> f_, K_;
    std::optional<unsigned long long> seed_;
};

ModuleSpec read_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open module spec " + path);
    return parse_module_spec(in);
}

std::string mat_text(const Mat<TruncSeries<LocalRing>>& m) {
    std::ostringstream os;
    for (const auto& row : m) {
        for (size_t j = 0; j < row.size(); ++j) os << (j ? " | " : "") << row[j].to_text();
        os << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Lubin-Tate norm-field and coefficient-ring toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string suite = "all";
    std::string spec_path;
    long long a_value = 2;
    int torsion_level = 1;
    std::string norm_case = "sqrt-minus-p";
    std::string chi_text = "2";
    std::string series_text = "u";
    int fault_digit = -1;

    auto* c_group = app.add_subcommand("group-law", "print the group law F(X,Y)");
    auto* c_ltmul = app.add_subcommand("lt-mul", "print the endomorphism [a](X)");
    c_ltmul->add_option("--a", a_value, "multiplier a (integer)");
    auto* c_tors = app.add_subcommand("torsion", "torsion polynomial and Eisenstein certificate");
    c_tors->add_option("--n", torsion_level, "torsion level");
    auto* c_norm = app.add_subcommand("norm-check", "norm criterion for nested towers");
    c_norm->add_option("--case", norm_case, "unram | sqrt-minus-p | sqrt-p");
    auto* c_gamma = app.add_subcommand("gamma-act", "apply u -> [c](u) mod pi to a series");
    c_gamma->add_option("--c", chi_text, "chi-value (integer in O_F)");
    c_gamma->add_option("--x", series_text, "series over the residue field");
    auto* c_vsolve = app.add_subcommand("v-solve", "Frobenius fixed points of a module");
    c_vsolve->add_option("--spec", spec_path, "module spec file")->required();
    auto* c_desc = app.add_subcommand("d-descend", "finite-level descent of a Galois matrix");
    c_desc->add_option("--spec", spec_path, "module spec file (E side, generator matrix)")
        ->required();
    auto* c_proj = app.add_subcommand("projlim", "diagonal embedding and reconstruction");
    c_proj->add_option("--fault", fault_digit, "inject a fault at this digit");
    auto* c_comp = app.add_subcommand("compare", "transport a module across the two towers");
    c_comp->add_option("--spec", spec_path, "module spec file (A side)")->required();
    auto* c_verify = app.add_subcommand("verify", "run property suites");
    c_verify->add_option("--suite", suite,
                         "group-law | gamma-phi | vd-charp | lift | two-tower | all");

    for (auto* c : {c_group, c_ltmul, c_tors, c_norm, c_gamma, c_vsolve, c_desc, c_proj, c_comp,
                    c_verify})
        flags.attach(c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg = flags.resolve();
        std::cout << kSchema << '\n';

        if (c_group->parsed()) {
            Contexts cx = build_contexts(cfg);
            std::cout << group_law(cx.lt).to_text() << '\n';
            return 0;
        }
        if (c_ltmul->parsed()) {
            Contexts cx = build_contexts(cfg);
            LocalInt a = LocalInt::from_int(cx.lt.ring.ctx, a_value);
            std::cout << lt_mul(cx.lt, a).to_text("X") << '\n';
            return 0;
        }
        if (c_tors->parsed()) {
            Contexts cx = build_contexts(cfg);
            auto t = torsion_polynomial(cx.lt, torsion_level);
            std::cout << "degree " << t.degree << '\n';
            for (int i = 0; i <= t.degree; ++i)
                std::cout << "coeff " << i << ' ' << t.coeffs[static_cast<size_t>(i)].to_text()
                          << '\n';
            std::cout << "eisenstein " << (t.eisenstein ? "yes" : "no") << '\n';
            return 0;
        }
        if (c_norm->parsed()) {
            auto OF = make_local_ring(make_field(cfg.p, cfg.r), cfg.M);
            LocalInt pi = LocalInt::uniformizer(OF);
            ExtKF ext;
            LocalInt w = pi;
            if (norm_case == "unram") {
                ext = make_unramified_ext(OF, cfg.s);
                w = ext_embed(ext, pi);
            } else if (norm_case == "sqrt-minus-p") {
                ext = make_eisenstein_ext(OF, {cfg.p, 0});
                w = LocalInt::uniformizer(ext.K);
            } else if (norm_case == "sqrt-p") {
                ext = make_eisenstein_ext(OF, {-cfg.p, 0});
                w = LocalInt::uniformizer(ext.K);
            } else {
                throw Error("norm-check: unknown case " + norm_case);
            }
            LocalInt n = norm(w, ext);
            std::cout << "norm " << n.to_text() << '\n';
            std::cout << "criterion " << (lt_extension_criterion(pi, w, ext) ? "true" : "false")
                      << '\n';
            return 0;
        }
        if (c_gamma->parsed()) {
            Contexts cx = build_contexts(cfg);
            LocalInt c = LocalInt::from_int(cx.lt.ring.ctx, std::stoll(chi_text));
            auto x = parse_gseries(series_text, cx.kK, cfg.N);
            std::cout << gamma_action(c, x, cx.lt).to_text() << '\n';
            return 0;
        }
        if (c_vsolve->parsed()) {
            Contexts cx = build_contexts(cfg);
            auto spec = read_spec(spec_path);
            if (spec.char0) {
                TwoTowerDesc tt = build_two_tower(cfg, cx);
                auto M = build_module_char0(spec, cfg, cx, tt);
                const CoeffRingDesc& A = spec.side_pi ? tt.Api : tt.Avarpi;
                auto v = functor_V_lift(M, A);
                std::cout << "level " << v.cst->total_degree_over_kK() << " growths "
                          << v.growth_steps << '\n';
                for (const auto& vec : v.basis) {
                    for (size_t i = 0; i < vec.size(); ++i)
                        std::cout << (i ? " | " : "") << vec[i].to_text();
                    std::cout << '\n';
                }
                std::cout << "verified " << (verify_V_lift(M, A, v) ? "yes" : "no") << '\n';
            } else {
                auto M = build_module_charp(spec, cfg, cx);
                auto v = functor_V(M);
                std::cout << "mode " << (v.constant_mode ? "constant" : "series") << " level "
                          << ext_degree(v.ext) << '\n';
                std::cout << "dim " << v.basis.size() << " solutions " << v.count << '\n';
                std::cout << "verified " << (verify_V(M, v) ? "yes" : "no") << '\n';
            }
            return 0;
        }
        if (c_desc->parsed()) {
            Contexts cx = build_contexts(cfg);
            auto spec = read_spec(spec_path);
            if (spec.char0) throw UnsupportedModeError("d-descend expects an E-side spec");
            // the generator matrix lives over k' = F_(p^(rs*2)) by default level 2
            FieldDesc kp = make_field(cfg.p, cx.rs * 2);
            Mat<FieldElem> C;
            for (const auto& row : spec.rows) {
                std::vector<FieldElem> r;
                for (const auto& e : row) r.push_back(parse_field_elem(e, kp));
                C.push_back(std::move(r));
            }
            auto res = functor_D_unramified(cx.kK, 2, C, cx.rs, cfg.N);
            std::cout << "level " << res.level << " rational "
                      << (res.descended_to_k ? "yes" : "no") << '\n';
            for (const auto& row : res.B) {
                for (size_t j = 0; j < row.size(); ++j)
                    std::cout << (j ? " | " : "") << row[j].to_text();
                std::cout << '\n';
            }
            for (const auto& row : res.module.phi) {
                for (size_t j = 0; j < row.size(); ++j)
                    std::cout << (j ? " | " : "") << row[j].to_text();
                std::cout << '\n';
            }
            return 0;
        }
        if (c_proj->parsed()) {
            Contexts cx = build_contexts(cfg);
            if (cfg.K.empty()) throw UnsupportedModeError("projlim needs K different from F");
            TwoTowerDesc tt = build_two_tower(cfg, cx);
            SplitMix rng(cfg.seed);
            auto w = random_aseries(tt.Api.base.ctx, -1, 4, rng);
            auto s = diagonal_sequence(tt, w, -2, 2);
            if (fault_digit >= 0) {
                LocalInt pert = LocalInt::uniformizer(tt.Api.base.ctx).pow(fault_digit);
                s.entries[0].set(0, 0, s.entries[0].coeff(0, 0) + pert);
            }
            ReconstructResult rec;
            try {
                rec = projlim_reconstruct(tt, s);
            } catch (const Error& e) {
                std::cout << "detected: " << e.what() << '\n';
                return 1;
            }
            std::cout << "window [" << rec.window_lo << ',' << rec.window_hi << "] digits "
                      << rec.digits << (rec.stabilized ? " stabilized" : " NOT-stabilized")
                      << '\n';
            std::cout << rec.value.to_text("y") << '\n';
            std::cout << "round-trip "
                      << (series_eq_mod(rec.value, w, ring_precision(tt.Api.base.ctx)) ? "exact"
                                                                                       : "FAIL")
                      << '\n';
            return series_eq_mod(rec.value, w, ring_precision(tt.Api.base.ctx)) ? 0 : 1;
        }
        if (c_comp->parsed()) {
            Contexts cx = build_contexts(cfg);
            if (cfg.K.empty()) throw UnsupportedModeError("compare needs K different from F");
            TwoTowerDesc tt = build_two_tower(cfg, cx);
            auto spec = read_spec(spec_path);
            if (!spec.char0) throw UnsupportedModeError("compare expects an A-side module");
            auto D = build_module_char0(spec, cfg, cx, tt);
            auto fwd = spec.side_pi ? functor_Phi(D, tt) : functor_Psi(D, tt);
            std::cout << (spec.side_pi ? "Phi(D):\n" : "Psi(D):\n") << mat_text(fwd.module.phi);
            std::cout << "notes " << fwd.notes << '\n';
            auto back = spec.side_pi ? functor_Psi(fwd.module, tt) : functor_Phi(fwd.module, tt);
            std::cout << (spec.side_pi ? "Psi(Phi(D)):\n" : "Phi(Psi(D)):\n")
                      << mat_text(back.module.phi);
            bool iso = modules_isomorphic(back.module, D);
            std::cout << "round-trip " << (iso ? "isomorphic" : "not isomorphic") << '\n';
            return iso ? 0 : 1;
        }
        if (c_verify->parsed()) {
            bool ok = run_verify_suite(cfg, suite, std::cout);
            return ok ? 0 : 1;
        }
        return 2;
    } catch (const UnsupportedModeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NotEtaleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
