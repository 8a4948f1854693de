#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "provsparql/translator.hpp"

namespace provsparql {

enum ExitCode : int { kExitOk = 0, kExitUser = 1, kExitIo = 2 };

struct CliHooks {
  /// Translator used by `check`; tests substitute a broken one.
  QueryTranslator translator = translate_query;
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const CliHooks& hooks = {});

}  // namespace provsparql
