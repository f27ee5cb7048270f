#include "shrinker/cli.hpp"

int main(int argc, char** argv) { return shrinker::run_cli(argc, argv); }
