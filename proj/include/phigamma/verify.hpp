#pragma once

// Property-suite runner behind the `verify` command. One line per property;
// identical configuration and seed give byte-identical reports.

#include <iosfwd>
#include <string>

#include "phigamma/textio.hpp"

namespace phigamma {

// suites: group-law, gamma-phi, vd-charp, lift, two-tower, all.
// Returns true when every property passed. Throws Error on unknown suites.
bool run_verify_suite(const RunConfig& cfg, const std::string& suite, std::ostream& os);

}  // namespace phigamma
