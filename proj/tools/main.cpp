#include "cli.hpp"

int main(int argc, char** argv) { return cmplab::cli::run(argc, argv); }
