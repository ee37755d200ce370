#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dynrg {

/// Subcommands: simulate, estimate, campaign, mgf, cov, check.
/// Returns 0 on success, 1 on usage or configuration errors and 2 on
/// computational errors (with a JSON error body on `out`).
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, char** argv);

}  // namespace dynrg
