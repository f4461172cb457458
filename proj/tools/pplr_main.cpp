#include "pplr/cli.hpp"

int main(int argc, char** argv) { return pplr::run_cli(argc, argv); }
