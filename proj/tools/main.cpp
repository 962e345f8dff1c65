#include "sketchsel/cli.hpp"

int main(int argc, char** argv) { return sketchsel::dispatch(argc, argv); }
