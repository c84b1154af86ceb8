#include "phigamma/textio.hpp"

#include <fstream>
#include <sstream>

namespace phigamma {

namespace {

bool is_prime_int(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::validate() const {
    if (!is_prime_int(p)) throw Error("config: p must be prime");
    if (r < 1 || s < 1) throw Error("config: r and s must be >= 1");
    if (N < 2) throw Error("config: N must be >= 2");
    if (M < 1) throw Error("config: M must be >= 1");
    if (f_choice != "standard" && f_choice != "multiplicative") {
        for (char c : f_choice)
            if (!std::isdigit(static_cast<unsigned char>(c)) && c != ',' && c != '-')
                throw Error("config: f must be standard, multiplicative, or integer coefficients");
    }
    if (f_choice == "multiplicative" && r != 1)
        throw Error("config: multiplicative f requires r = 1");
    if (!K.empty() && K != "unram" && K.rfind("eis:", 0) != 0)
        throw Error("config: K must be empty, unram, or eis:c0,c1,...");
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "p")
        cfg.p = std::stoi(value);
    else if (key == "r")
        cfg.r = std::stoi(value);
    else if (key == "s")
        cfg.s = std::stoi(value);
    else if (key == "f")
        cfg.f_choice = value;
    else if (key == "K")
        cfg.K = value;
    else if (key == "N")
        cfg.N = std::stoi(value);
    else if (key == "M")
        cfg.M = std::stoi(value);
    else if (key == "seed")
        cfg.seed = std::stoull(value);
    else
        throw Error("config: unknown key '" + key + "'");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config: expected key=value, got '" + line + "'");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

Contexts build_contexts(const RunConfig& cfg) {
    cfg.validate();
    Contexts cx;
    cx.kF = make_field(cfg.p, cfg.r);
    cx.rs = cfg.r * cfg.s;
    cx.kK = make_field(cfg.p, cx.rs);
    cx.OF_work = lt_working_ring(cx.kF, cfg.M, cfg.N);
    if (cfg.f_choice == "standard")
        cx.lt = make_lt_standard(cx.OF_work, cfg.N);
    else if (cfg.f_choice == "multiplicative")
        cx.lt = make_lt_multiplicative(cx.OF_work, cfg.N);
    else {
        std::vector<long long> cs;
        for (const auto& t : split(cfg.f_choice, ','))
            if (!trim(t).empty()) cs.push_back(std::stoll(trim(t)));
        cx.lt = make_lt_explicit(cx.OF_work, cs, cfg.N);
    }
    cx.OF = make_local_ring(cx.kF, cfg.M);
    if (cfg.K.empty()) {
        if (cfg.s != 1) throw Error("config: s > 1 needs K=unram");
        cx.OK = cx.OF;
    } else if (cfg.K == "unram") {
        auto e = make_unramified_ext(cx.OF, cfg.s);
        cx.ext = e;
        cx.OK = e.K;
    } else {
        if (cfg.s != 1) throw Error("config: eisenstein K assumes s = 1");
        std::vector<long long> cs;
        for (const auto& t : split(cfg.K.substr(4), ','))
            if (!trim(t).empty()) cs.push_back(std::stoll(trim(t)));
        auto e = make_eisenstein_ext(cx.OF, cs);
        cx.ext = e;
        cx.OK = e.K;
    }
    return cx;
}

TwoTowerDesc build_two_tower(const RunConfig& cfg, const Contexts& cx) {
    CoeffRingDesc Api = make_coeff_ring(LocalRing{cx.OK}, cx.lt, cfg.s, cfg.N);
    // varpi-side Lubin-Tate data over O_K: standard series with q = p^(rs)
    std::vector<long long> eis;
    if (cx.ext && cx.ext->e_rel > 1) eis = ring_eisenstein(cx.OK);
    auto OKw = lt_working_ring(cx.kK, ring_precision(cx.OK), cfg.N, eis);
    LTData ltw = make_lt_standard(OKw, cfg.N);
    return make_two_tower(Api, ltw, cx.ext);
}

LocalInt random_local(const LocalRingPtr& r, SplitMix& rng) {
    const FieldDesc k = ring_residue(r);
    long long q = 1;
    for (int i = 0; i < k.m; ++i) q *= k.p;
    LocalInt x = LocalInt::zero(r);
    LocalInt w = LocalInt::uniformizer(r);
    LocalInt pw = LocalInt::one(r);
    for (int i = 0; i < ring_precision(r); ++i) {
        x = x + LocalInt::teichmuller(r, FieldElem::from_code(k, rng.uniform(static_cast<int>(q)))) * pw;
        pw = pw * w;
    }
    return x;
}

TruncSeries<LocalRing> random_aseries(const LocalRingPtr& r, int lo, int prec, SplitMix& rng) {
    TruncSeries<LocalRing> s(LocalRing{r}, lo, prec);
    for (int e = lo; e < prec; ++e) s.set(e, random_local(r, rng));
    return s;
}

TruncSeries<GFRing> random_gseries(const FieldDesc& k, int lo, int prec, SplitMix& rng) {
    long long q = 1;
    for (int i = 0; i < k.m; ++i) q *= k.p;
    TruncSeries<GFRing> s(GFRing{k}, lo, prec);
    for (int e = lo; e < prec; ++e)
        s.set(e, FieldElem::from_code(k, rng.uniform(static_cast<int>(q))));
    return s;
}

// ---- parsing -----------------------------------------------------------------------

FieldElem parse_field_elem(const std::string& text0, const FieldDesc& k) {
    std::string text = trim(text0);
    if (text.empty()) throw Error("parse: empty field element");
    if (text[0] != '[') {
        // integer literal
        return FieldElem::from_int(k, std::stoll(text));
    }
    if (text.back() != ']') throw Error("parse: unbalanced digits '" + text + "'");
    std::vector<int> digits;
    for (const auto& t : split(text.substr(1, text.size() - 2), ','))
        if (!trim(t).empty()) digits.push_back(std::stoi(trim(t)));
    if (static_cast<int>(digits.size()) > k.m) throw Error("parse: too many digits for the field");
    return FieldElem::from_coeffs(k, digits);
}

LocalInt parse_local_int(const std::string& text0, const LocalRingPtr& r) {
    std::string text = trim(text0);
    if (text.rfind("loc:[", 0) != 0) {
        return LocalInt::from_int(r, std::stoll(text));
    }
    if (text.back() != ']') throw Error("parse: unbalanced loc digits");
    std::string body = text.substr(5, text.size() - 6);
    const FieldDesc k = ring_residue(r);
    LocalInt out = LocalInt::zero(r);
    LocalInt w = LocalInt::uniformizer(r);
    LocalInt pw = LocalInt::one(r);
    for (const auto& t : split(body, ';')) {
        if (trim(t).empty()) continue;
        out = out + LocalInt::teichmuller(r, parse_field_elem(trim(t), k)) * pw;
        pw = pw * w;
    }
    return out;
}

namespace {

// split a series expression into terms at top level " + ", dropping "O(...)"
std::vector<std::string> series_terms(const std::string& text, int* prec_out) {
    std::vector<std::string> terms;
    for (auto& t : split(text, '+')) {
        std::string u = trim(t);
        if (u.empty()) continue;
        if (u.rfind("O(", 0) == 0) {
            auto caret = u.find('^');
            if (caret != std::string::npos && prec_out) {
                std::string num = u.substr(caret + 1);
                num = num.substr(0, num.find(')'));
                *prec_out = std::stoi(num);
            }
            continue;
        }
        terms.push_back(u);
    }
    return terms;
}

// "u^k*rest", "u*rest", "u^k", "u", or "rest": returns (exp, coeff-string)
std::pair<int, std::string> split_term(const std::string& term) {
    if (term.rfind("u", 0) != 0) return {0, term};
    size_t pos = 1;
    int e = 1;
    if (pos < term.size() && term[pos] == '^') {
        size_t end = pos + 1;
        while (end < term.size() && (std::isdigit(static_cast<unsigned char>(term[end])) || term[end] == '-'))
            ++end;
        e = std::stoi(term.substr(pos + 1, end - pos - 1));
        pos = end;
    }
    if (pos >= term.size()) return {e, ""};
    if (term[pos] != '*') throw Error("parse: expected '*' after the variable in '" + term + "'");
    return {e, trim(term.substr(pos + 1))};
}

}  // namespace

TruncSeries<GFRing> parse_gseries(const std::string& text, const FieldDesc& k, int default_prec) {
    int prec = default_prec;
    auto terms = series_terms(text, &prec);
    TruncSeries<GFRing> s(GFRing{k}, 0, prec);
    for (const auto& t : terms) {
        auto [e, cs] = split_term(t);
        FieldElem c = cs.empty() ? FieldElem::one(k) : parse_field_elem(cs, k);
        s.set(e, s.coeff(e) + c);
        if (e < s.lo()) s = s.with_window(e, prec);
    }
    return s;
}

TruncSeries<LocalRing> parse_aseries(const std::string& text, const LocalRingPtr& r,
                                     int default_prec) {
    int prec = default_prec;
    auto terms = series_terms(text, &prec);
    TruncSeries<LocalRing> s(LocalRing{r}, 0, prec);
    for (const auto& t : terms) {
        auto [e, cs] = split_term(t);
        LocalInt c = cs.empty() ? LocalInt::one(r) : parse_local_int(cs, r);
        s.set(e, s.coeff(e) + c);
        if (e < s.lo()) s = s.with_window(e, prec);
    }
    return s;
}

ModuleSpec parse_module_spec(std::istream& in) {
    ModuleSpec spec;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            std::istringstream hs(line);
            std::string w, rank_s, over, base, side, which;
            hs >> w >> rank_s >> over >> base >> side >> which;
            if (w != "rank" || over != "over" || side != "side")
                throw Error("module spec: header must be 'rank d over {E|A} side {pi|varpi}'");
            spec.rank = std::stoi(rank_s);
            if (base == "A")
                spec.char0 = true;
            else if (base == "E")
                spec.char0 = false;
            else
                throw Error("module spec: base must be E or A");
            if (which == "pi")
                spec.side_pi = true;
            else if (which == "varpi")
                spec.side_pi = false;
            else
                throw Error("module spec: side must be pi or varpi");
            have_header = true;
            continue;
        }
        std::vector<std::string> row;
        for (auto& e : split(line, '|')) row.push_back(trim(e));
        spec.rows.push_back(std::move(row));
    }
    if (!have_header) throw Error("module spec: missing header");
    if (static_cast<int>(spec.rows.size()) != spec.rank)
        throw Error("module spec: expected one row per line, rank rows total");
    for (const auto& r : spec.rows)
        if (static_cast<int>(r.size()) != spec.rank)
            throw Error("module spec: ragged matrix row");
    return spec;
}

PhiGammaP build_module_charp(const ModuleSpec& spec, const RunConfig& cfg, const Contexts& cx) {
    if (spec.char0) throw Error("module spec: expected an E-side module");
    PhiGammaP M;
    M.base = GFRing{cx.kK};
    M.rank = spec.rank;
    M.rs = cx.rs;
    for (const auto& row : spec.rows) {
        std::vector<TruncSeries<GFRing>> out;
        for (const auto& e : row) out.push_back(parse_gseries(e, cx.kK, cfg.N));
        M.phi.push_back(std::move(out));
    }
    return M;
}

PhiGamma0 build_module_char0(const ModuleSpec& spec, const RunConfig& cfg, const Contexts& cx,
                             const TwoTowerDesc& tt) {
    if (!spec.char0) throw Error("module spec: expected an A-side module");
    const CoeffRingDesc& A = spec.side_pi ? tt.Api : tt.Avarpi;
    PhiGamma0 M;
    M.base = A.base;
    M.rank = spec.rank;
    M.rs = cx.rs;
    for (const auto& row : spec.rows) {
        std::vector<TruncSeries<LocalRing>> out;
        for (const auto& e : row) out.push_back(parse_aseries(e, A.base.ctx, cfg.N));
        M.phi.push_back(std::move(out));
    }
    return M;
}

}  // namespace phigamma
