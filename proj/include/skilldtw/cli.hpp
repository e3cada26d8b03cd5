#pragma once

namespace skilldtw {

// Entry point of the skilldtw tool. Returns 0 on success, 1 on usage errors
// and 2 on data errors.
int run_cli(int argc, char** argv);

}  // namespace skilldtw
