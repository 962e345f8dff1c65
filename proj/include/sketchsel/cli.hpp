#pragma once

namespace sketchsel {

// Front door for the sketchsel tool. Subcommands: gen-graph, gen-signals,
// design, evaluate, sweep, export-sdp, selftest. Returns the process exit
// code: 0 success, 1 user error, 2 numeric failure.
int dispatch(int argc, const char* const* argv);

}  // namespace sketchsel
