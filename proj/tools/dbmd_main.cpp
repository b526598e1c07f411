#include "dbmd/cli.hpp"

int main(int argc, char** argv) { return dbmd::run_cli(argc, argv); }
