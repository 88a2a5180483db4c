#include "sdpcut/cli.hpp"

int main(int argc, char** argv) { return sdpcut::run_cli(argc, argv); }
