#include "fatlas/cli.hpp"

int main(int argc, char** argv) { return fatlas::run_cli(argc, argv); }
