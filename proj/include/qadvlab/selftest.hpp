#pragma once

#include <iosfwd>

namespace qadvlab::selftest {

// Runs the module invariant suites, printing one line per suite.
// Returns true when every suite passes.
bool run_all(std::ostream& os);

} // namespace qadvlab::selftest
