#include "chrtc/cli.hpp"

int main(int argc, char** argv) { return chrtc::cli::main(argc, argv); }
