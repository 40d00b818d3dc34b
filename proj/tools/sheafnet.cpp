#include "sheafnet/cli.hpp"

int main(int argc, char** argv) { return sheafnet::cli::run(argc, argv); }
