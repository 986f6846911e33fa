#pragma once

namespace mubcert {

/// Entry point of the `mubcert` tool. Returns the process exit code:
/// 0 success, 1 negative result, 2 usage or input error, 3 resource cap hit.
int run_cli(int argc, const char* const* argv);

}  // namespace mubcert
