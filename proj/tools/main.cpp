#include "dssnal/cli.hpp"

int main(int argc, char** argv) { return dssnal::run_cli(argc, argv); }
