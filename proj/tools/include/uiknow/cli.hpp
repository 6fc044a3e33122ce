#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "uiknow/environment.hpp"

namespace uiknow::cli {

/// Runs one command line. `args` excludes the program name.
/// Returns 0 on success, 1 on domain errors, 2 on usage errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// `tcp://host:port`, `exec:<command line>`, or a sim model JSON path.
std::unique_ptr<Environment> open_environment(const std::string& spec, const std::string& app_id);

}  // namespace uiknow::cli
