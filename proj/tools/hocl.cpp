#include "hocl/cli.hpp"

int main(int argc, char** argv) { return hocl::run_cli(argc, argv); }
