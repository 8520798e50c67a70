#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bagbound {

/// Entry point of the `bagbound` tool. `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors and 1 on runtime errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace bagbound
