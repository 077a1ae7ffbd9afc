#pragma once

#include <iosfwd>

namespace pfrac {

/// Fast invariant/oracle sweep behind the `check` CLI subcommand: tensor
/// split identities, stress-energy consistency, model function values,
/// quasi-brittle constants, the convergence norm, and a mesh round trip.
/// Prints one line per check; returns the number of failures.
int run_self_check(std::ostream& os);

} // namespace pfrac
