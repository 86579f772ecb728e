#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrst::cli {

/// Runs the mrst command line on `args` (program name excluded). Tables and
/// CSV go to `out`, progress and the one-line diagnostic to `err`. Returns the
/// process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace mrst::cli
