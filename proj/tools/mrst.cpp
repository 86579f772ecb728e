#include "mrst/cli/app.hpp"

int main(int argc, char** argv) { return mrst::cli::main(argc, argv); }
