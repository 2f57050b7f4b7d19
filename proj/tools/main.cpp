#include "nodeclass/cli.hpp"

int main(int argc, char** argv) { return nodeclass::run_cli(argc, argv); }
