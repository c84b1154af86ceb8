#pragma once

// Run configuration (key=value files plus flag overrides), deterministic
// randomness, and parsers for the line-oriented text formats used by the
// command-line driver.

#include <iosfwd>
#include <string>
#include <vector>

#include "phigamma/lift0.hpp"
#include "phigamma/twotower.hpp"

namespace phigamma {

// splitmix64; the seed fully determines every randomized suite
struct SplitMix {
    unsigned long long s = 0;
    explicit SplitMix(unsigned long long seed) : s(seed) {}
    unsigned long long next() {
        s += 0x9e3779b97f4a7c15ULL;
        unsigned long long z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    int uniform(int n) { return static_cast<int>(next() % static_cast<unsigned long long>(n)); }
};

struct RunConfig {
    int p = 3;
    int r = 1;
    int s = 1;
    std::string f_choice = "standard";  // standard | multiplicative | c1,c2,...
    std::string K = "";                 // "" (= F) | "unram" | "eis:c0,c1,..."
    int N = 8;
    int M = 4;
    unsigned long long seed = 1;

    void validate() const;  // throws Error on bad parameters
};

// key=value lines; '#' comments; unknown keys rejected
RunConfig load_config(const std::string& path);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// assembled contexts from a configuration
struct Contexts {
    LocalRingPtr OF_work;   // O_F at working precision
    LTData lt;              // pi-side Lubin-Tate data
    LocalRingPtr OF;        // O_F at precision M
    LocalRingPtr OK;        // O_K at its precision (e*M when ramified)
    std::optional<ExtKF> ext;  // K/F when K is an extension
    FieldDesc kF, kK;
    int rs = 1;
};
Contexts build_contexts(const RunConfig& cfg);

// the varpi-side tower on top of the contexts (requires K != F or s == 1)
TwoTowerDesc build_two_tower(const RunConfig& cfg, const Contexts& cx);

// deterministic random helpers used by suites
LocalInt random_local(const LocalRingPtr& r, SplitMix& rng);
TruncSeries<LocalRing> random_aseries(const LocalRingPtr& r, int lo, int prec, SplitMix& rng);
TruncSeries<GFRing> random_gseries(const FieldDesc& k, int lo, int prec, SplitMix& rng);

// ---- text parsing --------------------------------------------------------------

// "[d0,d1,...]" digits over F_p
FieldElem parse_field_elem(const std::string& text, const FieldDesc& k);
// "loc:[fe;fe;...]" (tau-digits) or an integer literal
LocalInt parse_local_int(const std::string& text, const LocalRingPtr& r);
// sum of terms "u^k*<coeff>", "u*<coeff>", "<coeff>"; optional "+ O(u^k)"
TruncSeries<GFRing> parse_gseries(const std::string& text, const FieldDesc& k, int default_prec);
TruncSeries<LocalRing> parse_aseries(const std::string& text, const LocalRingPtr& r,
                                     int default_prec);

struct ModuleSpec {
    int rank = 1;
    bool char0 = false;   // E = residue side, A = lifted side
    bool side_pi = true;  // pi | varpi
    std::vector<std::vector<std::string>> rows;  // raw entries
};
// header "rank d over {E|A} side {pi|varpi}", then one row per line with
// entries separated by '|'
ModuleSpec parse_module_spec(std::istream& in);

PhiGammaP build_module_charp(const ModuleSpec& spec, const RunConfig& cfg, const Contexts& cx);
PhiGamma0 build_module_char0(const ModuleSpec& spec, const RunConfig& cfg, const Contexts& cx,
                             const TwoTowerDesc& tt);

}  // namespace phigamma
